#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsmote/dataset.hpp"

namespace tsmote {

struct SmoothingConfig {
    std::size_t window = 25;
    std::size_t poly_order = 5;
    bool enabled = true;

    void validate() const;
};

/// Savitzky-Golay smoothing on a nonuniform grid. Each point takes the value
/// of a least-squares polynomial fitted to the window centred on it; points
/// within window/2 of either end use the nearest full window, evaluated at
/// their own time.
std::vector<double> savgol_nonuniform(std::span<const double> times,
                                      std::span<const double> values,
                                      const SmoothingConfig& config);

/// Applies savgol_nonuniform per sample per feature against grid_times.
/// Fixed-prefix features pass through unchanged.
ImputedTensor smooth_tensor(const ImputedTensor& tensor, const SmoothingConfig& config);

} // namespace tsmote
