#include "tsmote/imputation.hpp"

#include <algorithm>
#include <sstream>

#include "tsmote/error.hpp"

namespace tsmote {

ImputationMethod parse_imputation_method(const std::string& text) {
    if (text == "tsmote") return ImputationMethod::tsmote;
    if (text == "slice_mean" || text == "mean") return ImputationMethod::slice_mean;
    if (text == "slice_median" || text == "median") return ImputationMethod::slice_median;
    throw ConfigError("unknown imputation method '" + text + "' (tsmote | slice_mean | slice_median)");
}

std::string to_string(ImputationMethod method) {
    switch (method) {
    case ImputationMethod::tsmote: return "tsmote";
    case ImputationMethod::slice_mean: return "slice_mean";
    case ImputationMethod::slice_median: return "slice_median";
    }
    return "tsmote";
}

std::vector<Value> fixed_prefix_values(const Sample& sample) {
    std::vector<Value> fixed(sample.fixed_prefix_len);
    for (const auto& obs : sample.observations) {
        for (std::size_t k = 0; k < fixed.size() && k < obs.values.size(); ++k) {
            if (!fixed[k] && obs.values[k]) fixed[k] = obs.values[k];
        }
    }
    return fixed;
}

namespace {

std::string slot_context(const Sample& sample, std::size_t slice) {
    std::ostringstream out;
    out << "sample '" << sample.id << "' slice " << slice;
    return out.str();
}

void check_assignment(const Sample& sample, const std::vector<std::size_t>& sample_slices) {
    if (sample_slices.size() != sample.observations.size()) {
        throw ConfigError("slice assignment of sample '" + sample.id + "' does not match its observations");
    }
}

std::vector<double> known_fixed_values(const Sample& sample) {
    std::vector<double> out;
    for (const auto& v : fixed_prefix_values(sample)) {
        if (!v) throw DataError("sample '" + sample.id + "' has an unresolved time-independent feature");
        out.push_back(*v);
    }
    return out;
}

} // namespace

Sample replace_nulls(const Sample& sample, std::size_t class_index,
                     const std::vector<std::size_t>& sample_slices, SyntheticPool& pool,
                     const ImputationConfig& config) {
    check_assignment(sample, sample_slices);
    const bool has_nulls = std::any_of(sample.observations.begin(), sample.observations.end(),
                                       [](const Observation& o) { return o.has_nulls(); });
    if (!has_nulls) return sample;
    if (!config.allow_null_feature_imputation) {
        throw ConfigError("sample '" + sample.id +
                          "' has null features; replacing them per feature destroys correlations "
                          "between variables, so it requires allow_null_feature_imputation "
                          "(only valid when features are independent)");
    }
    const auto fixed = fixed_prefix_values(sample);
    Sample out = sample;
    for (std::size_t mu = 0; mu < out.observations.size(); ++mu) {
        auto& obs = out.observations[mu];
        if (!obs.has_nulls()) continue;
        const std::size_t s = sample_slices[mu];
        const auto drawn = pool.cell(class_index, s).draw(config.replacement, slot_context(sample, s));
        for (std::size_t k = 0; k < obs.values.size(); ++k) {
            if (obs.values[k]) continue;
            obs.values[k] = (k < fixed.size() && fixed[k]) ? *fixed[k] : drawn[k];
        }
    }
    return out;
}

GridRow reshape_to_grid(const Sample& sample, const std::vector<std::size_t>& sample_slices,
                        std::size_t n_slices) {
    check_assignment(sample, sample_slices);
    GridRow row(n_slices);
    std::vector<std::size_t> counts(n_slices, 0);
    for (std::size_t mu = 0; mu < sample.observations.size(); ++mu) {
        const auto& obs = sample.observations[mu];
        const std::size_t s = sample_slices[mu];
        if (s >= n_slices) throw ConfigError("slice index out of range for sample '" + sample.id + "'");
        if (obs.has_nulls()) throw DataError("sample '" + sample.id + "' still has nulls at reshape");
        if (!row[s]) row[s] = std::vector<double>(obs.values.size(), 0.0);
        for (std::size_t k = 0; k < obs.values.size(); ++k) (*row[s])[k] += *obs.values[k];
        ++counts[s];
    }
    for (std::size_t s = 0; s < n_slices; ++s) {
        if (row[s] && counts[s] > 1) {
            for (auto& v : *row[s]) v /= static_cast<double>(counts[s]);
        }
    }
    return row;
}

std::vector<std::vector<double>> fill_missing_slices(const GridRow& row, std::size_t class_index,
                                                     SyntheticPool& pool,
                                                     const std::vector<double>& fixed_values,
                                                     const ImputationConfig& config) {
    std::vector<std::vector<double>> out(row.size());
    for (std::size_t s = 0; s < row.size(); ++s) {
        if (row[s]) {
            out[s] = *row[s];
        } else {
            std::ostringstream context;
            context << "class '" << pool.classes.at(class_index) << "' slice " << s;
            out[s] = pool.cell(class_index, s).draw(config.replacement, context.str());
        }
        // also undoes rounding from averaging degenerate slots
        for (std::size_t k = 0; k < fixed_values.size() && k < out[s].size(); ++k) out[s][k] = fixed_values[k];
    }
    return out;
}

SliceStatistics compute_slice_statistics(const TimeSeriesDataset& dataset,
                                         const SliceAssignment& assignment, std::size_t n_slices,
                                         ImputationMethod statistic, bool class_blind) {
    if (statistic == ImputationMethod::tsmote) throw ConfigError("tsmote is not a slice statistic");
    SliceStatistics stats;
    stats.n_classes = class_blind ? 1 : dataset.class_labels().size();
    stats.n_slices = n_slices;
    stats.n_features = dataset.n_features;
    const auto classes = dataset.class_index();

    std::vector<std::vector<double>> bins(stats.n_classes * n_slices * stats.n_features);
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const std::size_t c = class_blind ? 0 : classes[i];
        const auto& sample = dataset.samples[i];
        for (std::size_t mu = 0; mu < sample.observations.size(); ++mu) {
            const auto& values = sample.observations[mu].values;
            for (std::size_t k = 0; k < values.size(); ++k) {
                if (values[k]) bins[(c * n_slices + assignment[i][mu]) * stats.n_features + k].push_back(*values[k]);
            }
        }
    }
    stats.values.resize(bins.size());
    for (std::size_t b = 0; b < bins.size(); ++b) {
        auto& v = bins[b];
        if (v.empty()) continue;
        if (statistic == ImputationMethod::slice_mean) {
            double sum = 0.0;
            for (double x : v) sum += x;
            stats.values[b] = sum / static_cast<double>(v.size());
        } else {
            std::sort(v.begin(), v.end());
            const std::size_t n = v.size();
            stats.values[b] = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
        }
    }
    return stats;
}

std::vector<std::vector<bool>> observed_mask(const TimeSeriesDataset& dataset,
                                             const SliceAssignment& assignment,
                                             std::size_t n_slices) {
    std::vector<std::vector<bool>> mask;
    mask.reserve(dataset.samples.size());
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        std::vector<bool> row(n_slices, false);
        for (std::size_t s : assignment[i]) row[s] = true;
        mask.push_back(std::move(row));
    }
    return mask;
}

namespace {

ImputedTensor empty_tensor(const TimeSeriesDataset& dataset, const SliceGrid& grid) {
    ImputedTensor tensor;
    tensor.grid_times = grid.absolute_grid_times();
    tensor.n_features = dataset.n_features;
    tensor.feature_names = dataset.feature_names;
    if (tensor.feature_names.empty()) {
        for (std::size_t k = 0; k < dataset.n_features; ++k) tensor.feature_names.push_back("f_" + std::to_string(k));
    }
    for (const auto& sample : dataset.samples) {
        tensor.sample_ids.push_back(sample.id);
        tensor.class_labels.push_back(sample.class_label);
        tensor.fixed_prefix_len = std::max(tensor.fixed_prefix_len, sample.fixed_prefix_len);
    }
    tensor.data.assign(tensor.n_samples() * tensor.n_slices() * tensor.n_features, 0.0);
    return tensor;
}

void store_row(ImputedTensor& tensor, std::size_t i, const std::vector<std::vector<double>>& rows) {
    for (std::size_t s = 0; s < rows.size(); ++s) {
        for (std::size_t k = 0; k < tensor.n_features; ++k) tensor.at(i, s, k) = rows[s][k];
    }
}

void check_inputs(const TimeSeriesDataset& dataset, const SliceGrid& grid, const SliceAssignment& assignment) {
    require_valid(validate_dataset(dataset));
    if (assignment.size() != dataset.samples.size()) throw ConfigError("assignment does not match dataset");
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        check_assignment(dataset.samples[i], assignment[i]);
        for (std::size_t s : assignment[i]) {
            if (s >= grid.n_slices) throw ConfigError("slice index out of range for sample '" + dataset.samples[i].id + "'");
        }
    }
}

Sample baseline_replace_nulls(const Sample& sample, std::size_t c, const std::vector<std::size_t>& slices,
                              const SliceStatistics& stats) {
    const auto fixed = fixed_prefix_values(sample);
    Sample out = sample;
    for (std::size_t mu = 0; mu < out.observations.size(); ++mu) {
        auto& values = out.observations[mu].values;
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (values[k]) continue;
            if (k < fixed.size() && fixed[k]) {
                values[k] = fixed[k];
                continue;
            }
            values[k] = stats.at(c, slices[mu], k);
            if (!values[k]) throw DataError("no observed values to impute from for " + slot_context(sample, slices[mu]));
        }
    }
    return out;
}

} // namespace

ImputedTensor impute_dataset(const TimeSeriesDataset& dataset, const SliceGrid& grid,
                             const SliceAssignment& assignment,
                             const SynthesisConfig& synthesis_config,
                             const ImputationConfig& imputation_config,
                             SyntheticPool* pool_out) {
    check_inputs(dataset, grid, assignment);
    const std::size_t n_slices = grid.n_slices;
    const auto classes = dataset.class_index();
    ImputedTensor tensor = empty_tensor(dataset, grid);

    if (imputation_config.method == ImputationMethod::tsmote) {
        const bool any_nulls = std::any_of(dataset.samples.begin(), dataset.samples.end(), [](const Sample& s) {
            return std::any_of(s.observations.begin(), s.observations.end(),
                               [](const Observation& o) { return o.has_nulls(); });
        });
        if (any_nulls && !imputation_config.allow_null_feature_imputation) {
            throw ConfigError("dataset has null features; replacing them per feature destroys correlations "
                              "between variables, so it requires allow_null_feature_imputation "
                              "(only valid when features are independent)");
        }
        SynthesisConfig cfg = synthesis_config;
        cfg.replacement = imputation_config.replacement;
        cfg.reserve_for_nulls = any_nulls;
        SyntheticPool pool = generate_pool(dataset, grid, assignment, cfg);
        for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
            const Sample clean = replace_nulls(dataset.samples[i], classes[i], assignment[i], pool, imputation_config);
            const auto fixed = known_fixed_values(clean);
            const GridRow row = reshape_to_grid(clean, assignment[i], n_slices);
            store_row(tensor, i, fill_missing_slices(row, classes[i], pool, fixed, imputation_config));
        }
        if (pool_out) *pool_out = std::move(pool);
        return tensor;
    }

    const SliceStatistics stats = compute_slice_statistics(dataset, assignment, n_slices, imputation_config.method,
                                                           imputation_config.class_blind_baselines);
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const std::size_t c = imputation_config.class_blind_baselines ? 0 : classes[i];
        const Sample clean = baseline_replace_nulls(dataset.samples[i], c, assignment[i], stats);
        const auto fixed = known_fixed_values(clean);
        const GridRow row = reshape_to_grid(clean, assignment[i], n_slices);
        std::vector<std::vector<double>> filled(n_slices);
        for (std::size_t s = 0; s < n_slices; ++s) {
            if (row[s]) {
                filled[s] = *row[s];
            } else {
                filled[s].resize(dataset.n_features);
                for (std::size_t k = 0; k < dataset.n_features; ++k) {
                    const auto v = stats.at(c, s, k);
                    if (!v) throw DataError("no observed values to impute from for " + slot_context(dataset.samples[i], s));
                    filled[s][k] = *v;
                }
            }
            for (std::size_t k = 0; k < fixed.size(); ++k) filled[s][k] = fixed[k];
        }
        store_row(tensor, i, filled);
    }
    return tensor;
}

ImputedTensor tensor_from_complete(const TimeSeriesDataset& dataset, const SliceGrid& grid,
                                   const SliceAssignment& assignment) {
    check_inputs(dataset, grid, assignment);
    ImputedTensor tensor = empty_tensor(dataset, grid);
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const auto& sample = dataset.samples[i];
        const GridRow row = reshape_to_grid(sample, assignment[i], grid.n_slices);
        std::vector<std::vector<double>> rows;
        for (std::size_t s = 0; s < row.size(); ++s) {
            if (!row[s]) throw DataError("sample '" + sample.id + "' has no observation in slice " + std::to_string(s));
            rows.push_back(*row[s]);
        }
        const auto fixed = known_fixed_values(sample);
        for (auto& r : rows) {
            for (std::size_t k = 0; k < fixed.size(); ++k) r[k] = fixed[k];
        }
        store_row(tensor, i, rows);
    }
    return tensor;
}

} // namespace tsmote
