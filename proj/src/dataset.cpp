#include "tsmote/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "tsmote/error.hpp"

namespace tsmote {

bool Observation::has_nulls() const {
    return std::any_of(values.begin(), values.end(), [](const Value& v) { return !v; });
}

bool Observation::all_null() const {
    return std::none_of(values.begin(), values.end(), [](const Value& v) { return v.has_value(); });
}

std::size_t TimeSeriesDataset::total_observations() const {
    std::size_t total = 0;
    for (const auto& s : samples) total += s.observations.size();
    return total;
}

bool TimeSeriesDataset::labeled() const {
    return !samples.empty() &&
           std::all_of(samples.begin(), samples.end(),
                       [](const Sample& s) { return s.class_label.has_value(); });
}

std::vector<std::string> TimeSeriesDataset::class_labels() const {
    std::vector<std::string> labels;
    for (const auto& s : samples) {
        const std::string label = s.class_label.value_or("");
        if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
    }
    return labels;
}

std::vector<std::size_t> TimeSeriesDataset::class_index() const {
    const auto labels = class_labels();
    std::vector<std::size_t> index;
    index.reserve(samples.size());
    for (const auto& s : samples) {
        const std::string label = s.class_label.value_or("");
        index.push_back(static_cast<std::size_t>(
            std::find(labels.begin(), labels.end(), label) - labels.begin()));
    }
    return index;
}

bool ValidationReport::has_violation(const std::string& kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const ValidationIssue& i) { return i.kind == kind; });
}

bool ValidationReport::has_warning(const std::string& kind) const {
    return std::any_of(warnings.begin(), warnings.end(),
                       [&](const ValidationIssue& i) { return i.kind == kind; });
}

ValidationReport validate_dataset(const TimeSeriesDataset& dataset, const ValidationContext& context) {
    ValidationReport report;
    auto violation = [&](std::string kind, const std::string& id, std::optional<std::size_t> obs,
                         std::string message) {
        report.violations.push_back({std::move(kind), id, obs, std::move(message)});
    };
    auto warning = [&](std::string kind, const std::string& id, std::optional<std::size_t> obs,
                       std::string message) {
        report.warnings.push_back({std::move(kind), id, obs, std::move(message)});
    };

    if (dataset.samples.empty()) {
        violation("empty_dataset", "", std::nullopt, "dataset has no samples");
        return report;
    }
    if (!dataset.feature_names.empty() && dataset.feature_names.size() != dataset.n_features) {
        violation("feature_names", "", std::nullopt, "feature_names length does not match n_features");
    }

    std::size_t labeled = 0;
    std::set<std::string> seen_ids;
    for (const auto& sample : dataset.samples) {
        if (sample.class_label) ++labeled;
        if (!seen_ids.insert(sample.id).second) {
            violation("duplicate_sample_id", sample.id, std::nullopt, "sample id appears more than once");
        }
        if (sample.observations.empty()) {
            violation("empty_sample", sample.id, std::nullopt, "sample has no observations");
            continue;
        }
        if (sample.fixed_prefix_len > dataset.n_features) {
            violation("fixed_prefix", sample.id, std::nullopt, "fixed_prefix_len exceeds n_features");
        }

        std::vector<Value> fixed(std::min(sample.fixed_prefix_len, dataset.n_features));
        bool fixed_conflict = false;
        for (std::size_t mu = 0; mu < sample.observations.size(); ++mu) {
            const auto& obs = sample.observations[mu];
            if (!std::isfinite(obs.time)) {
                violation("non_finite_time", sample.id, mu, "observation time is not finite");
            }
            if (obs.values.size() != dataset.n_features) {
                std::ostringstream msg;
                msg << "observation has " << obs.values.size() << " values, expected "
                    << dataset.n_features;
                violation("wrong_width", sample.id, mu, msg.str());
                continue;
            }
            if (obs.all_null()) {
                violation("all_null_observation", sample.id, mu, "every feature of the observation is null");
            }
            for (const auto& v : obs.values) {
                if (v && !std::isfinite(*v)) {
                    violation("non_finite_value", sample.id, mu, "feature value is not finite");
                    break;
                }
            }
            for (std::size_t k = 0; k < fixed.size(); ++k) {
                const auto& v = obs.values[k];
                if (!v) continue;
                if (!fixed[k]) fixed[k] = v;
                else if (*fixed[k] != *v) fixed_conflict = true;
            }
            if (mu > 0) {
                const double prev = sample.observations[mu - 1].time;
                if (obs.time < prev) {
                    violation("unsorted_times", sample.id, mu, "observation times are not ascending");
                } else if (obs.time == prev) {
                    warning("duplicate_timestamp", sample.id, mu,
                            "two observations share a timestamp; they will be averaged");
                }
            }
        }
        if (fixed_conflict) {
            violation("fixed_prefix_inconsistent", sample.id, std::nullopt,
                      "time-independent features change across observations");
        }
    }
    if (labeled != 0 && labeled != dataset.samples.size()) {
        violation("partial_labels", "", std::nullopt, "class labels present on some samples only");
    }

    if (context.n_slices) {
        const std::size_t n_classes = std::max<std::size_t>(1, dataset.class_labels().size());
        const std::size_t needed = 2 * *context.n_slices * n_classes;
        const std::size_t total = dataset.total_observations();
        if (total < needed) {
            std::ostringstream msg;
            msg << "insufficient observations for " << *context.n_slices << " slices: " << total
                << " < " << needed;
            warning("insufficient_observations", "", std::nullopt, msg.str());
        }
    }
    return report;
}

DatasetStats dataset_stats(const TimeSeriesDataset& dataset) {
    DatasetStats stats;
    stats.n_samples = dataset.samples.size();
    stats.n_features = dataset.n_features;
    std::vector<std::size_t> nulls(dataset.n_features, 0);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& sample : dataset.samples) {
        stats.observations_per_sample.push_back(sample.observations.size());
        stats.total_observations += sample.observations.size();
        for (const auto& obs : sample.observations) {
            lo = std::min(lo, obs.time);
            hi = std::max(hi, obs.time);
            for (std::size_t k = 0; k < obs.values.size() && k < nulls.size(); ++k) {
                if (!obs.values[k]) ++nulls[k];
            }
        }
    }
    stats.null_fraction.resize(dataset.n_features, 0.0);
    if (stats.total_observations > 0) {
        for (std::size_t k = 0; k < nulls.size(); ++k) {
            stats.null_fraction[k] =
                static_cast<double>(nulls[k]) / static_cast<double>(stats.total_observations);
        }
        stats.time_min = lo;
        stats.time_max = hi;
    }
    return stats;
}

void require_valid(const ValidationReport& report) {
    if (report.ok()) return;
    std::ostringstream msg;
    msg << "dataset failed validation (" << report.violations.size() << " violations)";
    const std::size_t shown = std::min<std::size_t>(report.violations.size(), 5);
    for (std::size_t i = 0; i < shown; ++i) {
        const auto& v = report.violations[i];
        msg << "; " << v.kind;
        if (!v.sample_id.empty()) msg << " [" << v.sample_id << "]";
        msg << ": " << v.message;
    }
    throw DataError(msg.str());
}

void sort_observations(TimeSeriesDataset& dataset) {
    for (auto& sample : dataset.samples) {
        std::stable_sort(sample.observations.begin(), sample.observations.end(),
                         [](const Observation& a, const Observation& b) { return a.time < b.time; });
    }
}

} // namespace tsmote
