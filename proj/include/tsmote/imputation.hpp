#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsmote/dataset.hpp"
#include "tsmote/slicing.hpp"
#include "tsmote/synthesis.hpp"

namespace tsmote {

enum class ImputationMethod { tsmote, slice_mean, slice_median };

ImputationMethod parse_imputation_method(const std::string& text);
std::string to_string(ImputationMethod method);

struct ImputationConfig {
    ImputationMethod method = ImputationMethod::tsmote;
    Replacement replacement = Replacement::without_replacement;
    // Caller asserts features are independent, so per-feature replacement of
    // nulls does not destroy correlations that matter.
    bool allow_null_feature_imputation = false;
    // Baseline statistics pooled over all classes instead of per class.
    bool class_blind_baselines = false;
};

/// A sample laid onto the slice grid; empty optionals are missing slots.
using GridRow = std::vector<std::optional<std::vector<double>>>;

/// The sample's time-independent prefix: first non-null value per fixed
/// feature, or nullopt when never observed.
std::vector<Value> fixed_prefix_values(const Sample& sample);

/// Replaces each observation's null components with the matching components
/// of one pool vector drawn from the sample's (class, slice) cell. Fixed-prefix
/// nulls take the sample's own fixed value when it is known.
Sample replace_nulls(const Sample& sample, std::size_t class_index,
                     const std::vector<std::size_t>& sample_slices, SyntheticPool& pool,
                     const ImputationConfig& config);

/// The imputation map: slot n holds the observation whose time falls in slice
/// n, the componentwise mean when several do, and nothing when none does.
/// Requires a null-free sample.
GridRow reshape_to_grid(const Sample& sample, const std::vector<std::size_t>& sample_slices,
                        std::size_t n_slices);

/// Fills missing slots with pool draws from (class_index, slot) and overwrites
/// the fixed prefix of each drawn vector with the sample's own values.
std::vector<std::vector<double>> fill_missing_slices(const GridRow& row, std::size_t class_index,
                                                     SyntheticPool& pool,
                                                     const std::vector<double>& fixed_values,
                                                     const ImputationConfig& config);

/// Per (class, slice, feature) mean or median of observed non-null values.
struct SliceStatistics {
    std::size_t n_classes = 0;
    std::size_t n_slices = 0;
    std::size_t n_features = 0;
    std::vector<std::optional<double>> values;

    std::optional<double> at(std::size_t class_index, std::size_t slice, std::size_t feature) const {
        return values[(class_index * n_slices + slice) * n_features + feature];
    }
};

SliceStatistics compute_slice_statistics(const TimeSeriesDataset& dataset,
                                         const SliceAssignment& assignment, std::size_t n_slices,
                                         ImputationMethod statistic, bool class_blind);

/// true where sample i had at least one original observation in slice n.
std::vector<std::vector<bool>> observed_mask(const TimeSeriesDataset& dataset,
                                             const SliceAssignment& assignment,
                                             std::size_t n_slices);

/// Full pipeline: (null replacement ->) reshape -> fill, one dense trajectory
/// per sample. Grid times in the result are absolute.
ImputedTensor impute_dataset(const TimeSeriesDataset& dataset, const SliceGrid& grid,
                             const SliceAssignment& assignment,
                             const SynthesisConfig& synthesis_config,
                             const ImputationConfig& imputation_config,
                             SyntheticPool* pool_out = nullptr);

/// Reshape of a dataset that already covers every slice (no synthesis).
ImputedTensor tensor_from_complete(const TimeSeriesDataset& dataset, const SliceGrid& grid,
                                   const SliceAssignment& assignment);

} // namespace tsmote
