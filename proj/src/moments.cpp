#include "tsmote/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsmote/error.hpp"
#include "tsmote/synthesis.hpp"

namespace tsmote {

double theoretical_cov_factor(const LambdaSpec& spec) {
    const double e = spec.mean();
    return 1.0 + 2.0 * (spec.variance() + e * e - e);
}

namespace {

Eigen::MatrixXd population_cov(const SliceMatrix& x, const Eigen::VectorXd& mean) {
    const Eigen::MatrixXd centred = x.rowwise() - mean.transpose();
    return centred.transpose() * centred / static_cast<double>(x.rows());
}

} // namespace

MomentReport empirical_moments(const SliceMatrix& original, const SliceMatrix& synthetic,
                               const std::optional<LambdaSpec>& lambda) {
    if (original.rows() < 2 || synthetic.rows() < 2) throw DataError("moment estimates need at least 2 rows");
    if (original.cols() != synthetic.cols()) throw DataError("original and synthetic widths differ");
    const auto n_o = static_cast<double>(original.rows());
    const auto n_s = static_cast<double>(synthetic.rows());
    const Eigen::Index d = original.cols();

    MomentReport r;
    r.mean_original = original.colwise().mean().transpose();
    r.mean_synthetic = synthetic.colwise().mean().transpose();
    r.cov_original = population_cov(original, r.mean_original);
    r.cov_synthetic = population_cov(synthetic, r.mean_synthetic);
    r.mean_error = r.mean_synthetic - r.mean_original;

    r.mean_error_se.resize(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const double var_o = r.cov_original(k, k) * n_o / (n_o - 1.0);
        const double var_s = r.cov_synthetic(k, k) * n_s / (n_s - 1.0);
        r.mean_error_se(k) = std::sqrt(var_o / n_o + var_s / n_s);
    }

    // SE of each covariance entry from the spread of centred products
    const Eigen::MatrixXd centred = synthetic.rowwise() - r.mean_synthetic.transpose();
    r.cov_synthetic_se.resize(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            const Eigen::ArrayXd prod = centred.col(a).array() * centred.col(b).array();
            const double m = prod.mean();
            const double var = (prod - m).square().sum() / (n_s - 1.0);
            r.cov_synthetic_se(a, b) = std::sqrt(var / n_s);
        }
    }
    r.cov_ratio = r.cov_synthetic.array() / r.cov_original.array();
    if (lambda) r.theoretical_factor = theoretical_cov_factor(*lambda);
    return r;
}

std::vector<std::vector<std::size_t>> knn_graph(const SliceMatrix& points, std::size_t k) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (k < 1 || k >= n) throw ConfigError("K must satisfy 1 <= K < number of points");
    std::vector<std::vector<std::size_t>> graph(n);
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t mu = 0; mu < n; ++mu) {
        dist.clear();
        for (std::size_t nu = 0; nu < n; ++nu) {
            if (nu == mu) continue;
            dist.emplace_back((points.row(static_cast<Eigen::Index>(nu)) - points.row(static_cast<Eigen::Index>(mu))).squaredNorm(), nu);
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        for (std::size_t j = 0; j < k; ++j) graph[mu].push_back(dist[j].second);
    }
    return graph;
}

DegreeCheck neighbor_degree_check(const SliceMatrix& points, std::size_t k) {
    const auto graph = knn_graph(points, k);
    DegreeCheck check;
    check.in_degree.assign(graph.size(), 0);
    for (const auto& out : graph) {
        for (std::size_t nu : out) ++check.in_degree[nu];
    }
    check.in_degree_sum = std::accumulate(check.in_degree.begin(), check.in_degree.end(), std::size_t{0});
    check.edge_count = graph.size() * k;
    return check;
}

VectorSmoteResult vector_smote(const SliceMatrix& original, std::size_t k, std::size_t repeats,
                               const LambdaSpec& lambda, Rng& rng) {
    VectorSmoteResult result;
    result.graph = knn_graph(original, k);
    const auto n = static_cast<std::size_t>(original.rows());
    result.synthetic.resize(static_cast<Eigen::Index>(n * k * repeats), original.cols());
    result.draws.reserve(n * k * repeats);
    Eigen::Index row = 0;
    for (std::size_t r = 0; r < repeats; ++r) {
        for (std::size_t mu = 0; mu < n; ++mu) {
            for (std::size_t nu : result.graph[mu]) {
                const double l = lambda.sample(rng);
                const auto seed = original.row(static_cast<Eigen::Index>(mu));
                result.synthetic.row(row++) = seed + l * (original.row(static_cast<Eigen::Index>(nu)) - seed);
                result.draws.push_back({mu, nu, l});
            }
        }
    }
    return result;
}

Eigen::VectorXd error_term_from_graph(const SliceMatrix& original, const std::vector<SmoteDraw>& draws) {
    if (draws.empty()) throw DataError("no SMOTE draws");
    const auto n = static_cast<std::size_t>(original.rows());
    const auto total = static_cast<double>(draws.size());
    // weight of each original point in (mean of synthetic - mean of original)
    std::vector<double> seed_count(n, 0.0), in_weight(n, 0.0), out_weight(n, 0.0);
    for (const auto& d : draws) {
        seed_count[d.seed] += 1.0;
        out_weight[d.seed] += d.lambda;
        in_weight[d.neighbor] += d.lambda;
    }
    Eigen::VectorXd error = Eigen::VectorXd::Zero(original.cols());
    for (std::size_t mu = 0; mu < n; ++mu) {
        const double w = (seed_count[mu] + in_weight[mu] - out_weight[mu]) / total - 1.0 / static_cast<double>(n);
        error += w * original.row(static_cast<Eigen::Index>(mu)).transpose();
    }
    return error;
}

namespace {

double population_variance(const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size());
}

} // namespace

VarianceCheck mean_imputation_variance_check(const std::vector<double>& values, std::size_t n_slices) {
    if (values.empty() || n_slices < 1) throw ConfigError("need values and at least one slice");
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    std::vector<double> padded = values;
    padded.resize(values.size() * n_slices, mean);
    VarianceCheck check;
    check.sigma2 = population_variance(values);
    check.predicted = check.sigma2 / static_cast<double>(n_slices);
    check.observed = population_variance(padded);
    return check;
}

VarianceCheck smote_padding_variance_check(const std::vector<double>& values, std::size_t n_slices,
                                           std::size_t k, const LambdaSpec& lambda, Rng& rng) {
    if (values.size() < 2 || n_slices < 1) throw ConfigError("need at least 2 values and one slice");
    std::vector<std::vector<Value>> column;
    for (double v : values) column.push_back({v});
    SynthesisConfig config;
    config.k_neighbors = k;
    config.lambda = lambda;
    const std::size_t pad = values.size() * (n_slices - 1);
    const auto synthetic = synthesize_slice(column, config, pad, rng, "variance-check");
    std::vector<double> padded = values;
    for (const auto& row : synthetic) padded.push_back(row[0]);

    const double nt = static_cast<double>(n_slices);
    VarianceCheck check;
    check.sigma2 = population_variance(values);
    check.predicted = check.sigma2 / nt + (1.0 - 1.0 / nt) * theoretical_cov_factor(lambda) * check.sigma2;
    check.observed = population_variance(padded);
    return check;
}

MonteCarloEstimate summarize(const std::vector<double>& values) {
    MonteCarloEstimate est;
    est.n = values.size();
    if (values.empty()) return est;
    est.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(est.n);
    if (est.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - est.mean) * (v - est.mean);
        est.se = std::sqrt(ss / static_cast<double>(est.n - 1) / static_cast<double>(est.n));
    }
    return est;
}

} // namespace tsmote
