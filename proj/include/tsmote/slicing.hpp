#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tsmote/dataset.hpp"

namespace tsmote {

enum class GridTimePolicy { midpoint, median_of_observations };

GridTimePolicy parse_grid_time_policy(const std::string& text);
std::string to_string(GridTimePolicy policy);

struct TimeBounds {
    double t_min = 0.0;
    double t_max = 0.0;

    double span() const { return t_max - t_min; }
};

struct BoundsOverride {
    std::optional<double> t_min;
    std::optional<double> t_max;
};

/// Slice boundaries live in elapsed time (t - t_min). Slices are half-open
/// [b_i, b_{i+1}) except the last, which is closed above.
struct SliceGrid {
    std::size_t n_slices = 0;
    std::vector<double> boundaries;   // n_slices + 1, boundaries[0] == 0
    std::vector<double> grid_times;   // elapsed time, one per slice
    GridTimePolicy policy = GridTimePolicy::median_of_observations;
    TimeBounds bounds;
    std::vector<std::size_t> occupancy; // observations per slice at build time

    std::vector<double> slice_widths() const;

    /// grid_times shifted back into original time units.
    std::vector<double> absolute_grid_times() const;

    /// max - min occupancy.
    std::size_t occupancy_spread() const;

    /// Slice index for an elapsed time. Throws DataError for tau < 0; clamps
    /// tau beyond the last boundary into the final slice.
    std::size_t slice_of(double elapsed) const;
};

/// Parallel to dataset.samples[i].observations.
using SliceAssignment = std::vector<std::vector<std::size_t>>;

/// Minimum and maximum observation time over the whole dataset, optionally
/// overridden. Throws ConfigError when an override leaves t_max <= t_min.
TimeBounds compute_time_bounds(const TimeSeriesDataset& dataset,
                               const BoundsOverride& override_bounds = {});

/// Equal-count partition of all elapsed observation times into n_slices
/// contiguous groups. Group sizes differ by at most one (earliest slices take
/// the remainder) unless duplicate timestamps force a split to move forward.
SliceGrid build_slice_grid(const TimeSeriesDataset& dataset, std::size_t n_slices,
                           GridTimePolicy policy = GridTimePolicy::median_of_observations,
                           const BoundsOverride& override_bounds = {});

SliceAssignment assign_slices(const TimeSeriesDataset& dataset, const SliceGrid& grid);

} // namespace tsmote
