#include "tsmote/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "tsmote/error.hpp"

namespace tsmote {

void SmoothingConfig::validate() const {
    if (window < 3 || window % 2 == 0) throw ConfigError("smoothing window must be odd and at least 3");
    if (poly_order >= window) throw ConfigError("smoothing polynomial order must be below the window size");
}

namespace {

// Row i of the (banded) smoothing operator: weights over [start, start + window).
struct SmootherRow {
    std::size_t start = 0;
    Eigen::VectorXd weights;
};

std::vector<SmootherRow> smoother_rows(std::span<const double> times, const SmoothingConfig& config) {
    config.validate();
    const std::size_t n = times.size();
    const std::size_t w = config.window;
    if (n < w) {
        std::ostringstream msg;
        msg << "series has " << n << " points but the smoothing window is " << w
            << "; use a smaller window or disable smoothing";
        throw ConfigError(msg.str());
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(times[i] > times[i - 1])) throw DataError("smoothing needs strictly increasing times");
    }

    const std::size_t half = w / 2;
    const std::size_t terms = config.poly_order + 1;
    std::vector<SmootherRow> rows(n);
    std::size_t cached_start = n; // fits reused by boundary points
    Eigen::MatrixXd coefficients; // terms x w, maps window values to polynomial coefficients
    double centre = 0.0, scale = 1.0;

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t start = std::min(i < half ? 0 : i - half, n - w);
        if (start != cached_start) {
            centre = times[start + half];
            scale = std::max(centre - times[start], times[start + w - 1] - centre);
            Eigen::MatrixXd design(w, terms);
            for (std::size_t r = 0; r < w; ++r) {
                const double u = (times[start + r] - centre) / scale;
                double p = 1.0;
                for (std::size_t j = 0; j < terms; ++j, p *= u) design(r, j) = p;
            }
            coefficients = design.householderQr().solve(Eigen::MatrixXd::Identity(w, w));
            cached_start = start;
        }
        Eigen::RowVectorXd basis(terms);
        const double u = (times[i] - centre) / scale;
        double p = 1.0;
        for (std::size_t j = 0; j < terms; ++j, p *= u) basis(j) = p;
        rows[i].start = start;
        rows[i].weights = (basis * coefficients).transpose();
    }
    return rows;
}

std::vector<double> apply_rows(const std::vector<SmootherRow>& rows, std::span<const double> values,
                               std::size_t stride, std::size_t offset) {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double acc = 0.0;
        for (Eigen::Index r = 0; r < rows[i].weights.size(); ++r) {
            acc += rows[i].weights(r) * values[(rows[i].start + static_cast<std::size_t>(r)) * stride + offset];
        }
        out[i] = acc;
    }
    return out;
}

} // namespace

std::vector<double> savgol_nonuniform(std::span<const double> times, std::span<const double> values,
                                      const SmoothingConfig& config) {
    if (times.size() != values.size()) throw ConfigError("times and values differ in length");
    if (!config.enabled) return {values.begin(), values.end()};
    return apply_rows(smoother_rows(times, config), values, 1, 0);
}

ImputedTensor smooth_tensor(const ImputedTensor& tensor, const SmoothingConfig& config) {
    if (!config.enabled) return tensor;
    const auto rows = smoother_rows(tensor.grid_times, config);
    ImputedTensor out = tensor;
    const std::size_t n_slices = tensor.n_slices();
    const std::size_t nf = tensor.n_features;
    for (std::size_t i = 0; i < tensor.n_samples(); ++i) {
        const std::span<const double> block(tensor.data.data() + i * n_slices * nf, n_slices * nf);
        for (std::size_t k = tensor.fixed_prefix_len; k < nf; ++k) {
            const auto smoothed = apply_rows(rows, block, nf, k);
            for (std::size_t s = 0; s < n_slices; ++s) out.at(i, s, k) = smoothed[s];
        }
    }
    return out;
}

} // namespace tsmote
