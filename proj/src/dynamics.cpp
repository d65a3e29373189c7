#include "tsmote/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tsmote/error.hpp"
#include "tsmote/random.hpp"

namespace tsmote {

TimeDistribution parse_time_distribution(const std::string& text) {
    if (text == "uniform") return TimeDistribution::uniform;
    if (text == "exponential") return TimeDistribution::exponential;
    throw ConfigError("unknown time distribution '" + text + "' (uniform | exponential)");
}

std::string to_string(TimeDistribution dist) {
    return dist == TimeDistribution::uniform ? "uniform" : "exponential";
}

double OscillatorConfig::t_max() const {
    return std::max(2.0 * std::numbers::pi / omega_x, 2.0 * std::numbers::pi / omega_y);
}

void OscillatorConfig::validate() const {
    if (!(omega_x > 0.0) || !(omega_y > 0.0)) throw ConfigError("oscillator frequencies must be positive");
    if (!(noise_sigma >= 0.0)) throw ConfigError("noise sigma must be non-negative");
    if (min_observations < 1 || min_observations > max_observations) {
        throw ConfigError("observation count range must satisfy 1 <= min <= max");
    }
    if (exponential_rate && !(*exponential_rate > 0.0)) throw ConfigError("exponential rate must be positive");
}

std::pair<double, double> oscillator_position(const OscillatorConfig& config, double t) {
    return {std::sin(config.omega_x * t), std::sin(config.omega_y * t + config.delta)};
}

namespace {

Observation noisy_observation(const OscillatorConfig& config, double t, Rng& rng) {
    auto [x, y] = oscillator_position(config, t);
    if (config.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, config.noise_sigma);
        x += noise(rng);
        y += noise(rng);
    }
    return {t, {x, y}};
}

std::optional<std::string> label_of(const std::string& label) {
    if (label.empty()) return std::nullopt;
    return label;
}

} // namespace

TimeSeriesDataset generate_oscillator_dataset(const OscillatorConfig& config) {
    config.validate();
    const double t_max = config.t_max();
    const double rate = config.exponential_rate.value_or(3.0 / t_max);

    TimeSeriesDataset dataset;
    dataset.n_features = 2;
    dataset.feature_names = {"x", "y"};
    for (std::size_t i = 0; i < config.n_samples; ++i) {
        Rng rng = derive_stream(config.seed, "oscillator", {i});
        const std::size_t m =
            config.min_observations + uniform_index(rng, config.max_observations - config.min_observations + 1);
        std::vector<double> times(m);
        for (auto& t : times) {
            if (config.time_dist == TimeDistribution::uniform) {
                t = t_max * uniform01(rng);
            } else {
                do {
                    t = -std::log1p(-uniform01(rng)) / rate;
                } while (t > t_max);
            }
        }
        std::sort(times.begin(), times.end());

        Sample sample;
        sample.id = config.id_prefix + std::to_string(i);
        sample.class_label = label_of(config.class_label);
        for (double t : times) sample.observations.push_back(noisy_observation(config, t, rng));
        dataset.samples.push_back(std::move(sample));
    }
    return dataset;
}

TwoClassExperiment generate_two_class_experiment(std::uint64_t seed, const TwoClassConfig& config) {
    struct ClassSpec {
        double ratio;
        std::size_t train;
        std::size_t test;
        std::string label;
    };
    const ClassSpec classes[2] = {{config.ratio_a, config.train_a, config.test_a, "0"},
                                  {config.ratio_b, config.train_b, config.test_b, "1"}};

    TwoClassExperiment exp;
    exp.train.n_features = exp.test.n_features = 2;
    exp.train.feature_names = exp.test.feature_names = {"x", "y"};

    std::vector<OscillatorConfig> oscillators;
    for (std::size_t c = 0; c < 2; ++c) {
        OscillatorConfig osc;
        osc.omega_x = config.omega_x;
        osc.omega_y = classes[c].ratio * config.omega_x;
        osc.noise_sigma = config.noise_sigma;
        osc.n_samples = classes[c].train;
        osc.time_dist = config.time_dist;
        osc.seed = derive_stream(seed, "train", {c})();
        osc.class_label = classes[c].label;
        osc.id_prefix = "train_" + classes[c].label + "_";
        const auto part = generate_oscillator_dataset(osc);
        exp.train.samples.insert(exp.train.samples.end(), part.samples.begin(), part.samples.end());
        oscillators.push_back(osc);
    }

    exp.grid = build_slice_grid(exp.train, config.n_slices, config.policy);
    const auto grid_times = exp.grid.absolute_grid_times();
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < classes[c].test; ++i) {
            Rng rng = derive_stream(seed, "test", {c, i});
            Sample sample;
            sample.id = "test_" + classes[c].label + "_" + std::to_string(i);
            sample.class_label = classes[c].label;
            for (double t : grid_times) sample.observations.push_back(noisy_observation(oscillators[c], t, rng));
            exp.test.samples.push_back(std::move(sample));
        }
    }
    return exp;
}

} // namespace tsmote
