#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tsmote {

/// A feature value that may be missing.
using Value = std::optional<double>;

struct Observation {
    double time = 0.0;
    std::vector<Value> values;

    bool has_nulls() const;
    bool all_null() const;
};

struct Sample {
    std::string id;
    std::optional<std::string> class_label;
    std::vector<Observation> observations; // ascending by time
    std::size_t fixed_prefix_len = 0;      // leading time-independent features
};

struct TimeSeriesDataset {
    std::vector<Sample> samples;
    std::size_t n_features = 0;
    std::vector<std::string> feature_names;

    std::size_t total_observations() const;
    bool labeled() const;

    /// Distinct class labels in order of first appearance. Unlabeled datasets
    /// are treated as a single class with an empty label.
    std::vector<std::string> class_labels() const;

    /// Index into class_labels() for every sample.
    std::vector<std::size_t> class_index() const;
};

/// Dense (samples x slices x features) array produced by the imputation map.
struct ImputedTensor {
    std::vector<std::string> sample_ids;
    std::vector<std::optional<std::string>> class_labels;
    std::vector<double> grid_times;
    std::vector<std::string> feature_names;
    std::size_t n_features = 0;
    std::size_t fixed_prefix_len = 0;
    std::vector<double> data; // row-major [sample][slice][feature]

    std::size_t n_samples() const { return sample_ids.size(); }
    std::size_t n_slices() const { return grid_times.size(); }

    double& at(std::size_t sample, std::size_t slice, std::size_t feature) {
        return data[(sample * n_slices() + slice) * n_features + feature];
    }
    double at(std::size_t sample, std::size_t slice, std::size_t feature) const {
        return data[(sample * n_slices() + slice) * n_features + feature];
    }
};

struct ValidationIssue {
    std::string kind;
    std::string sample_id;
    std::optional<std::size_t> observation;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> violations;
    std::vector<ValidationIssue> warnings;

    bool ok() const { return violations.empty(); }
    bool has_violation(const std::string& kind) const;
    bool has_warning(const std::string& kind) const;
};

struct ValidationContext {
    std::optional<std::size_t> n_slices;
};

/// Report-only structural check. Never throws.
ValidationReport validate_dataset(const TimeSeriesDataset& dataset,
                                  const ValidationContext& context = {});

struct DatasetStats {
    std::size_t n_samples = 0;
    std::size_t n_features = 0;
    std::size_t total_observations = 0;
    std::vector<std::size_t> observations_per_sample;
    std::vector<double> null_fraction; // per feature, nulls / total observations
    double time_min = 0.0;
    double time_max = 0.0;
};

DatasetStats dataset_stats(const TimeSeriesDataset& dataset);

/// Throws DataError listing the first few violations when the report is not ok.
void require_valid(const ValidationReport& report);

/// Stable-sorts every sample's observations by time.
void sort_observations(TimeSeriesDataset& dataset);

} // namespace tsmote
