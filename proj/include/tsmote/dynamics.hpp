#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "tsmote/dataset.hpp"
#include "tsmote/slicing.hpp"

namespace tsmote {

enum class TimeDistribution { uniform, exponential };

TimeDistribution parse_time_distribution(const std::string& text);
std::string to_string(TimeDistribution dist);

struct OscillatorConfig {
    double omega_x = 1.0;
    double omega_y = 2.0;
    double delta = 0.0;
    double noise_sigma = 0.05;
    std::size_t n_samples = 100;
    std::size_t min_observations = 5;
    std::size_t max_observations = 20;
    TimeDistribution time_dist = TimeDistribution::uniform;
    std::optional<double> exponential_rate; // default 3 / t_max
    std::uint64_t seed = 0;
    std::string class_label;
    std::string id_prefix = "s";

    double t_max() const;
    void validate() const;
};

/// Noise-free position at time t: (sin(wx t), sin(wy t + delta)).
std::pair<double, double> oscillator_position(const OscillatorConfig& config, double t);

/// Samples with 5..20 irregular observation times each; exponential times
/// above t_max are redrawn.
TimeSeriesDataset generate_oscillator_dataset(const OscillatorConfig& config);

struct TwoClassConfig {
    double omega_x = 1.0;
    double ratio_a = 2.0; // class "0": omega_y = 2 omega_x
    double ratio_b = 4.0; // class "1": omega_y = 4 omega_x
    double noise_sigma = 0.1;
    std::size_t train_a = 270;
    std::size_t train_b = 180;
    std::size_t test_a = 30;
    std::size_t test_b = 20;
    TimeDistribution time_dist = TimeDistribution::uniform;
    std::size_t n_slices = 50;
    GridTimePolicy policy = GridTimePolicy::median_of_observations;
};

struct TwoClassExperiment {
    TimeSeriesDataset train;
    TimeSeriesDataset test; // observed exactly at the absolute grid times
    SliceGrid grid;         // built class-blind on train
};

TwoClassExperiment generate_two_class_experiment(std::uint64_t seed,
                                                 const TwoClassConfig& config = {});

} // namespace tsmote
