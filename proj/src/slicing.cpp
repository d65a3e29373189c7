#include "tsmote/slicing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tsmote/error.hpp"

namespace tsmote {

GridTimePolicy parse_grid_time_policy(const std::string& text) {
    if (text == "midpoint") return GridTimePolicy::midpoint;
    if (text == "median" || text == "median_of_observations") return GridTimePolicy::median_of_observations;
    throw ConfigError("unknown grid-time policy '" + text + "' (midpoint | median)");
}

std::string to_string(GridTimePolicy policy) {
    return policy == GridTimePolicy::midpoint ? "midpoint" : "median";
}

std::vector<double> SliceGrid::slice_widths() const {
    std::vector<double> widths;
    for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) widths.push_back(boundaries[i + 1] - boundaries[i]);
    return widths;
}

std::vector<double> SliceGrid::absolute_grid_times() const {
    std::vector<double> out;
    out.reserve(grid_times.size());
    for (double g : grid_times) out.push_back(bounds.t_min + g);
    return out;
}

std::size_t SliceGrid::occupancy_spread() const {
    if (occupancy.empty()) return 0;
    const auto [lo, hi] = std::minmax_element(occupancy.begin(), occupancy.end());
    return *hi - *lo;
}

std::size_t SliceGrid::slice_of(double elapsed) const {
    if (elapsed < 0.0 || std::isnan(elapsed)) {
        std::ostringstream msg;
        msg << "observation at elapsed time " << elapsed << " precedes t_min = " << bounds.t_min;
        throw DataError(msg.str());
    }
    if (elapsed >= boundaries.back()) return n_slices - 1;
    // first boundary strictly greater than elapsed closes the slice
    const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), elapsed);
    return static_cast<std::size_t>(it - boundaries.begin()) - 1;
}

TimeBounds compute_time_bounds(const TimeSeriesDataset& dataset, const BoundsOverride& override_bounds) {
    if (dataset.total_observations() == 0) throw DataError("dataset has no observations");
    TimeBounds bounds{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& sample : dataset.samples) {
        for (const auto& obs : sample.observations) {
            bounds.t_min = std::min(bounds.t_min, obs.time);
            bounds.t_max = std::max(bounds.t_max, obs.time);
        }
    }
    if (override_bounds.t_min) bounds.t_min = *override_bounds.t_min;
    if (override_bounds.t_max) bounds.t_max = *override_bounds.t_max;
    if ((override_bounds.t_min || override_bounds.t_max) && !(bounds.t_max > bounds.t_min)) {
        std::ostringstream msg;
        msg << "time bounds override leaves t_max (" << bounds.t_max << ") <= t_min (" << bounds.t_min << ")";
        throw ConfigError(msg.str());
    }
    return bounds;
}

namespace {

double median_of_sorted(const double* first, std::size_t n) {
    return n % 2 == 1 ? first[n / 2] : 0.5 * (first[n / 2 - 1] + first[n / 2]);
}

} // namespace

SliceGrid build_slice_grid(const TimeSeriesDataset& dataset, std::size_t n_slices, GridTimePolicy policy,
                           const BoundsOverride& override_bounds) {
    if (n_slices < 1) throw ConfigError("number of slices must be at least 1");
    const TimeBounds bounds = compute_time_bounds(dataset, override_bounds);
    if (!(bounds.t_max > bounds.t_min)) {
        throw DataError("all observation times are equal; cannot build a slice grid");
    }
    const double span = bounds.span();

    std::vector<double> elapsed;
    elapsed.reserve(dataset.total_observations());
    for (const auto& sample : dataset.samples) {
        for (const auto& obs : sample.observations) {
            const double tau = obs.time - bounds.t_min;
            if (tau < 0.0) {
                throw DataError("sample '" + sample.id + "' has an observation before t_min");
            }
            // observations past an overridden t_max are clamped at assignment
            // and do not shape the partition
            if (tau <= span) elapsed.push_back(tau);
        }
    }
    const std::size_t n = elapsed.size();
    if (n < 2 * n_slices) {
        std::ostringstream msg;
        msg << "fewer than 2 observations per slice on average: " << n << " observations for "
            << n_slices << " slices (need at least " << 2 * n_slices << "); use fewer slices";
        throw DataError(msg.str());
    }
    std::sort(elapsed.begin(), elapsed.end());

    // Split positions: split g sits between elapsed[s_g - 1] and elapsed[s_g].
    // Nominal sizes are base (+1 for the first `rem` groups); a split that would
    // separate equal timestamps moves forward past the tie.
    const std::size_t base = n / n_slices;
    const std::size_t rem = n % n_slices;
    std::vector<std::size_t> splits;
    splits.reserve(n_slices + 1);
    splits.push_back(0);
    std::size_t nominal = 0;
    for (std::size_t g = 1; g < n_slices; ++g) {
        nominal += base + (g - 1 < rem ? 1 : 0);
        std::size_t s = std::max(nominal, splits.back() + 1);
        while (s < n && elapsed[s - 1] == elapsed[s]) ++s;
        if (s >= n) {
            std::ostringstream msg;
            msg << "too many duplicate timestamps to form " << n_slices
                << " slices with positive width; use fewer slices";
            throw DataError(msg.str());
        }
        splits.push_back(s);
    }
    splits.push_back(n);

    SliceGrid grid;
    grid.n_slices = n_slices;
    grid.policy = policy;
    grid.bounds = bounds;
    grid.boundaries.resize(n_slices + 1);
    grid.boundaries.front() = 0.0;
    grid.boundaries.back() = span;
    for (std::size_t g = 1; g < n_slices; ++g) {
        const std::size_t s = splits[g];
        grid.boundaries[g] = 0.5 * (elapsed[s - 1] + elapsed[s]);
    }
    for (std::size_t g = 0; g < n_slices; ++g) {
        if (!(grid.boundaries[g + 1] > grid.boundaries[g])) {
            throw DataError("slice boundaries are not strictly increasing; use fewer slices");
        }
    }

    grid.occupancy.resize(n_slices);
    grid.grid_times.resize(n_slices);
    for (std::size_t g = 0; g < n_slices; ++g) {
        const std::size_t lo = splits[g];
        const std::size_t hi = splits[g + 1];
        grid.occupancy[g] = hi - lo;
        if (policy == GridTimePolicy::midpoint) {
            grid.grid_times[g] = 0.5 * (grid.boundaries[g] + grid.boundaries[g + 1]);
        } else {
            grid.grid_times[g] = median_of_sorted(elapsed.data() + lo, hi - lo);
        }
    }
    // observations clamped from beyond an overridden t_max land in the last slice
    grid.occupancy.back() += dataset.total_observations() - n;
    return grid;
}

SliceAssignment assign_slices(const TimeSeriesDataset& dataset, const SliceGrid& grid) {
    SliceAssignment assignment;
    assignment.reserve(dataset.samples.size());
    for (const auto& sample : dataset.samples) {
        std::vector<std::size_t> slices;
        slices.reserve(sample.observations.size());
        for (const auto& obs : sample.observations) {
            try {
                slices.push_back(grid.slice_of(obs.time - grid.bounds.t_min));
            } catch (const DataError& e) {
                throw DataError("sample '" + sample.id + "': " + e.what());
            }
        }
        assignment.push_back(std::move(slices));
    }
    return assignment;
}

} // namespace tsmote
