#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsmote/dataset.hpp"

namespace fixtures {

using tsmote::Observation;
using tsmote::Sample;
using tsmote::TimeSeriesDataset;
using tsmote::Value;

inline Sample sample(std::string id, std::optional<std::string> label,
                     std::vector<std::pair<double, std::vector<Value>>> rows) {
    Sample s;
    s.id = std::move(id);
    s.class_label = std::move(label);
    for (auto& [t, v] : rows) s.observations.push_back(Observation{t, std::move(v)});
    return s;
}

inline TimeSeriesDataset dataset(std::size_t n_features, std::vector<Sample> samples) {
    TimeSeriesDataset d;
    d.n_features = n_features;
    for (std::size_t k = 0; k < n_features; ++k) d.feature_names.push_back("f_" + std::to_string(k));
    d.samples = std::move(samples);
    return d;
}

// One feature, value equal to the time, one sample per time list.
inline TimeSeriesDataset from_times(const std::vector<std::vector<double>>& times,
                                    std::optional<std::string> label = std::nullopt) {
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<std::pair<double, std::vector<Value>>> rows;
        for (double t : times[i]) rows.push_back({t, {t}});
        samples.push_back(sample("s" + std::to_string(i), label, rows));
    }
    return dataset(1, std::move(samples));
}

} // namespace fixtures
