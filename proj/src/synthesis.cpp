#include "tsmote/synthesis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include "tsmote/error.hpp"

namespace tsmote {

Replacement parse_replacement(const std::string& text) {
    if (text == "with" || text == "with_replacement") return Replacement::with_replacement;
    if (text == "without" || text == "without_replacement") return Replacement::without_replacement;
    throw ConfigError("unknown replacement policy '" + text + "' (with | without)");
}

std::string to_string(Replacement replacement) {
    return replacement == Replacement::with_replacement ? "with" : "without";
}

ColumnNeighbors::ColumnNeighbors(std::span<const double> values)
    : values_(values.begin(), values.end()), order_(values.size()), position_(values.size()) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
        return values_[a] < values_[b] || (values_[a] == values_[b] && a < b);
    });
    for (std::size_t i = 0; i < order_.size(); ++i) position_[order_[i]] = i;
}

std::vector<std::size_t> ColumnNeighbors::query(std::size_t query_index, std::size_t k) const {
    const std::size_t n = values_.size();
    k = std::min(k, n == 0 ? 0 : n - 1);
    if (k == 0) return {};

    const double v = values_[query_index];
    auto dist = [&](std::size_t sorted_pos) { return std::abs(values_[order_[sorted_pos]] - v); };
    const std::size_t p = position_[query_index];

    // k-th smallest distance by merging outward from p
    std::size_t left = p;      // next left candidate is left - 1
    std::size_t right = p + 1; // next right candidate is right
    double kth = 0.0;
    for (std::size_t taken = 0; taken < k; ++taken) {
        const bool take_left = right == n || (left > 0 && dist(left - 1) <= dist(right));
        if (take_left) {
            kth = dist(left - 1);
            --left;
        } else {
            kth = dist(right);
            ++right;
        }
    }

    // everything within kth, then order by (distance, index)
    std::vector<std::pair<double, std::size_t>> candidates;
    for (std::size_t i = p; i > 0 && dist(i - 1) <= kth; --i) candidates.emplace_back(dist(i - 1), order_[i - 1]);
    for (std::size_t i = p + 1; i < n && dist(i) <= kth; ++i) candidates.emplace_back(dist(i), order_[i]);
    std::sort(candidates.begin(), candidates.end());
    candidates.resize(k);

    std::vector<std::size_t> out;
    out.reserve(k);
    for (const auto& c : candidates) out.push_back(c.second);
    return out;
}

std::vector<std::size_t> knn_1d(std::span<const double> values, std::size_t query_index, std::size_t k,
                                std::vector<std::string>* warnings) {
    if (query_index >= values.size()) throw ConfigError("knn query index out of range");
    if (k >= values.size()) {
        if (warnings) {
            std::ostringstream msg;
            msg << "slice too sparse: k=" << k << " reduced to " << values.size() - 1;
            warnings->push_back(msg.str());
        }
        k = values.size() - 1;
    }
    return ColumnNeighbors(values).query(query_index, k);
}

std::vector<std::vector<double>> synthesize_slice(const std::vector<std::vector<Value>>& slice_obs,
                                                  const SynthesisConfig& config, std::size_t count, Rng& rng,
                                                  const std::string& context, std::vector<std::string>* warnings) {
    if (count == 0) return {};
    if (config.k_neighbors < 1) throw ConfigError("k_neighbors must be at least 1");
    if (slice_obs.empty()) throw DataError("cannot synthesize from an empty slice " + context);
    const std::size_t n_features = slice_obs.front().size();
    const std::size_t rows = slice_obs.size();

    bool any_null = false;
    for (const auto& row : slice_obs) {
        if (row.size() != n_features) throw DataError("ragged observation widths in slice " + context);
        any_null = any_null || std::any_of(row.begin(), row.end(), [](const Value& v) { return !v; });
    }

    // one seed order shared by every feature when rows are complete
    std::vector<std::size_t> shared_order;
    if (!any_null) {
        shared_order.resize(rows);
        std::iota(shared_order.begin(), shared_order.end(), std::size_t{0});
        std::shuffle(shared_order.begin(), shared_order.end(), rng);
    }

    std::vector<std::vector<double>> out(count, std::vector<double>(n_features, 0.0));
    for (std::size_t k = 0; k < n_features; ++k) {
        std::vector<double> column;
        column.reserve(rows);
        for (const auto& row : slice_obs) {
            if (row[k]) column.push_back(*row[k]);
        }
        const std::size_t m = column.size();
        if (m < 2) {
            std::ostringstream msg;
            msg << "feature " << k << " has " << m << " non-null value(s) in slice " << context
                << "; at least 2 are needed (use fewer slices)";
            throw DataError(msg.str());
        }
        const std::size_t neighbors_per_seed = std::min(config.k_neighbors, m - 1);
        if (neighbors_per_seed < config.k_neighbors && warnings) {
            std::ostringstream msg;
            msg << "slice " << context << " feature " << k << " too sparse: k=" << config.k_neighbors
                << " reduced to " << neighbors_per_seed;
            warnings->push_back(msg.str());
        }

        std::vector<std::size_t> seed_order;
        if (!any_null) {
            seed_order = shared_order;
        } else {
            seed_order.resize(m);
            std::iota(seed_order.begin(), seed_order.end(), std::size_t{0});
            std::shuffle(seed_order.begin(), seed_order.end(), rng);
        }

        const ColumnNeighbors index(column);
        std::vector<std::vector<std::size_t>> neighbors(m); // per seed, in visiting order
        for (std::size_t j = 0; j < count; ++j) {
            const std::size_t seed = seed_order[j % m];
            auto& nb = neighbors[seed];
            if (nb.empty()) {
                nb = index.query(seed, neighbors_per_seed);
                std::shuffle(nb.begin(), nb.end(), rng);
            }
            const std::size_t rank = (j / m) % neighbors_per_seed;
            const double z = column[seed];
            const double y = column[nb[rank]];
            const double lambda = config.lambda.sample(rng);
            // clamp removes rounding excursions outside [min(z,y), max(z,y)]
            out[j][k] = std::clamp(z + lambda * (y - z), std::min(z, y), std::max(z, y));
        }
    }
    return out;
}

PoolCell::PoolCell(std::vector<std::vector<double>> vectors, std::size_t required, Rng draw_rng)
    : vectors_(std::move(vectors)), order_(vectors_.size()), required_(required),
      remaining_(vectors_.size()), rng_(std::move(draw_rng)) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
}

std::vector<double> PoolCell::draw(Replacement replacement, const std::string& context) {
    if (replacement == Replacement::with_replacement) {
        if (vectors_.empty()) throw PoolUnderflowError("synthetic pool is empty for " + context);
        return vectors_[uniform_index(rng_, vectors_.size())];
    }
    if (remaining_ == 0) {
        std::ostringstream msg;
        msg << "pool underflow for " << context << ": all " << vectors_.size()
            << " synthetic vectors consumed; raise the surplus factor or sample with replacement";
        throw PoolUnderflowError(msg.str());
    }
    const std::size_t i = uniform_index(rng_, remaining_);
    std::swap(order_[i], order_[remaining_ - 1]);
    --remaining_;
    return vectors_[order_[remaining_]];
}

std::vector<std::size_t> required_draws(const TimeSeriesDataset& dataset, const SliceAssignment& assignment,
                                        std::size_t n_slices, bool reserve_for_nulls) {
    const auto classes = dataset.class_index();
    const std::size_t n_classes = dataset.class_labels().size();
    std::vector<std::size_t> required(n_classes * n_slices, 0);
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const auto& sample = dataset.samples[i];
        std::vector<bool> present(n_slices, false);
        for (std::size_t mu = 0; mu < sample.observations.size(); ++mu) {
            const std::size_t s = assignment[i][mu];
            present[s] = true;
            if (reserve_for_nulls && sample.observations[mu].has_nulls()) ++required[classes[i] * n_slices + s];
        }
        for (std::size_t s = 0; s < n_slices; ++s) {
            if (!present[s]) ++required[classes[i] * n_slices + s];
        }
    }
    return required;
}

SyntheticPool generate_pool(const TimeSeriesDataset& dataset, const SliceGrid& grid,
                            const SliceAssignment& assignment, const SynthesisConfig& config) {
    if (config.k_neighbors < 1) throw ConfigError("k_neighbors must be at least 1");
    if (!(config.surplus_factor >= 1.0)) throw ConfigError("surplus factor must be >= 1");
    if (assignment.size() != dataset.samples.size()) throw ConfigError("assignment does not match dataset");

    const std::size_t n_slices = grid.n_slices;
    SyntheticPool pool;
    pool.classes = dataset.class_labels();
    pool.n_slices = n_slices;
    const std::size_t n_cells = pool.classes.size() * n_slices;
    pool.cells.resize(n_cells);

    const auto classes = dataset.class_index();
    std::vector<std::vector<std::vector<Value>>> members(n_cells);
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const auto& sample = dataset.samples[i];
        for (std::size_t mu = 0; mu < sample.observations.size(); ++mu) {
            members[classes[i] * n_slices + assignment[i][mu]].push_back(sample.observations[mu].values);
        }
    }
    const auto required = required_draws(dataset, assignment, n_slices, config.reserve_for_nulls);

    std::vector<std::vector<std::string>> cell_warnings(n_cells);
    std::vector<std::exception_ptr> errors(n_cells);
    auto build_cell = [&](std::size_t cell) {
        const std::size_t c = cell / n_slices;
        const std::size_t s = cell % n_slices;
        try {
            const std::size_t need = required[cell];
            Rng draw_rng = derive_stream(config.seed, "pool-draw", {c, s});
            if (need == 0) {
                pool.cells[cell] = PoolCell({}, 0, std::move(draw_rng));
                return;
            }
            std::ostringstream label;
            label << "(class '" << pool.classes[c] << "', slice " << s << ")";
            if (members[cell].size() < 2) {
                std::ostringstream msg;
                msg << "cell " << label.str() << " has " << members[cell].size()
                    << " observation(s) but needs synthetic data for " << need
                    << " draw(s); use fewer slices";
                throw DataError(msg.str());
            }
            const auto size = static_cast<std::size_t>(
                std::ceil(config.surplus_factor * static_cast<double>(need) - 1e-9));
            Rng gen_rng = derive_stream(config.seed, "pool-generate", {c, s});
            auto vectors = synthesize_slice(members[cell], config, size, gen_rng, label.str(), &cell_warnings[cell]);
            pool.cells[cell] = PoolCell(std::move(vectors), need, std::move(draw_rng));
        } catch (...) {
            errors[cell] = std::current_exception();
        }
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(config.threads, n_cells));
    if (threads == 1) {
        for (std::size_t cell = 0; cell < n_cells; ++cell) build_cell(cell);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (std::size_t t = 0; t < threads; ++t) {
            workers.emplace_back([&] {
                for (std::size_t cell = next++; cell < n_cells; cell = next++) build_cell(cell);
            });
        }
        for (auto& w : workers) w.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    for (auto& w : cell_warnings) pool.warnings.insert(pool.warnings.end(), w.begin(), w.end());
    return pool;
}

} // namespace tsmote
