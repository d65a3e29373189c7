#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsmote/dataset.hpp"
#include "tsmote/lambda.hpp"
#include "tsmote/random.hpp"
#include "tsmote/slicing.hpp"

namespace tsmote {

enum class Replacement { with_replacement, without_replacement };

Replacement parse_replacement(const std::string& text);
std::string to_string(Replacement replacement);

struct SynthesisConfig {
    std::size_t k_neighbors = 5;
    LambdaSpec lambda = LambdaSpec::uniform();
    double surplus_factor = 1.0;
    std::uint64_t seed = 0;
    Replacement replacement = Replacement::without_replacement;
    // Reserve pool draws for observations whose nulls will be replaced.
    bool reserve_for_nulls = false;
    std::size_t threads = 1;
};

/// Nearest neighbours along one feature direction. Sorting is done once so
/// repeated queries cost O(k + ties).
class ColumnNeighbors {
public:
    explicit ColumnNeighbors(std::span<const double> values);

    std::size_t size() const { return values_.size(); }

    /// Indices of the k values closest to values[query], excluding query
    /// itself, ordered by (distance, index). k is capped at size() - 1.
    std::vector<std::size_t> query(std::size_t query_index, std::size_t k) const;

private:
    std::vector<double> values_;
    std::vector<std::size_t> order_;    // indices sorted by (value, index)
    std::vector<std::size_t> position_; // inverse of order_
};

/// k nearest neighbours of values[query_index] by |values[j] - values[query]|,
/// ties broken by smaller index. When k >= values.size() it is reduced to
/// size - 1 and a warning is appended to `warnings` (if given).
std::vector<std::size_t> knn_1d(std::span<const double> values, std::size_t query_index,
                                std::size_t k, std::vector<std::string>* warnings = nullptr);

/// Per-feature SMOTE inside one time slice.
///
/// Each feature k is generated from the non-null column-k entries: seeds are
/// visited round-robin, each seed's neighbours are visited in turn, and the
/// synthetic component is z + lambda * (y - z). A full cycle of (entries x K)
/// draws enumerates every (seed, neighbour) pair exactly once. When the slice
/// has no nulls the same seed row is used for every component of a vector.
std::vector<std::vector<double>> synthesize_slice(const std::vector<std::vector<Value>>& slice_obs,
                                                  const SynthesisConfig& config, std::size_t count,
                                                  Rng& rng, const std::string& context = {},
                                                  std::vector<std::string>* warnings = nullptr);

/// Synthetic vectors for one (class, slice) cell plus its draw bookkeeping.
class PoolCell {
public:
    PoolCell() = default;
    PoolCell(std::vector<std::vector<double>> vectors, std::size_t required, Rng draw_rng);

    const std::vector<std::vector<double>>& vectors() const { return vectors_; }
    std::size_t required() const { return required_; }
    std::size_t remaining() const { return remaining_; }
    bool empty() const { return vectors_.empty(); }

    /// Random pool vector. Without replacement a drawn vector is never
    /// returned again; throws PoolUnderflowError when exhausted.
    std::vector<double> draw(Replacement replacement, const std::string& context = {});

private:
    std::vector<std::vector<double>> vectors_;
    std::vector<std::size_t> order_;
    std::size_t required_ = 0;
    std::size_t remaining_ = 0;
    Rng rng_;
};

struct SyntheticPool {
    std::vector<std::string> classes;
    std::size_t n_slices = 0;
    std::vector<PoolCell> cells; // class-major
    std::vector<std::string> warnings;

    PoolCell& cell(std::size_t class_index, std::size_t slice) {
        return cells[class_index * n_slices + slice];
    }
    const PoolCell& cell(std::size_t class_index, std::size_t slice) const {
        return cells[class_index * n_slices + slice];
    }
};

/// Draws each (class, slice) cell must be able to serve: samples of the class
/// with no observation in the slice, plus (when reserve_for_nulls) the cell's
/// observations that contain nulls.
std::vector<std::size_t> required_draws(const TimeSeriesDataset& dataset,
                                        const SliceAssignment& assignment, std::size_t n_slices,
                                        bool reserve_for_nulls);

/// Builds the per-class, per-slice pool. The grid is shared by all classes;
/// synthesis never mixes classes. Each cell uses its own RNG stream so the
/// result does not depend on config.threads.
SyntheticPool generate_pool(const TimeSeriesDataset& dataset, const SliceGrid& grid,
                            const SliceAssignment& assignment, const SynthesisConfig& config);

} // namespace tsmote
