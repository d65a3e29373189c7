#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tsmote/lambda.hpp"
#include "tsmote/random.hpp"

namespace tsmote {

/// Rows are points, columns are features.
using SliceMatrix = Eigen::MatrixXd;

/// Contraction factor of the synthetic covariance relative to the original,
/// 1 + 2 (var + E^2 - E), valid when a seed and its neighbour are independent.
double theoretical_cov_factor(const LambdaSpec& spec);

struct MomentReport {
    Eigen::VectorXd mean_original;
    Eigen::VectorXd mean_synthetic;
    Eigen::MatrixXd cov_original;  // population (1/n) covariance
    Eigen::MatrixXd cov_synthetic; // population (1/n) covariance
    Eigen::VectorXd mean_error;    // mean_synthetic - mean_original
    Eigen::VectorXd mean_error_se; // two-sample standard error
    Eigen::MatrixXd cov_synthetic_se;
    Eigen::MatrixXd cov_ratio;     // entrywise cov_synthetic / cov_original
    std::optional<double> theoretical_factor;
};

MomentReport empirical_moments(const SliceMatrix& original, const SliceMatrix& synthetic,
                               const std::optional<LambdaSpec>& lambda = std::nullopt);

/// Directed Euclidean kNN graph: row mu lists the K nearest other rows
/// (ties by smaller index).
std::vector<std::vector<std::size_t>> knn_graph(const SliceMatrix& points, std::size_t k);

struct DegreeCheck {
    std::size_t in_degree_sum = 0; // sum of k_mu
    std::size_t edge_count = 0;    // D * K
    std::vector<std::size_t> in_degree;
};

DegreeCheck neighbor_degree_check(const SliceMatrix& points, std::size_t k);

/// One synthetic vector of classic (vector) SMOTE: shared lambda and shared
/// neighbour across all features.
struct SmoteDraw {
    std::size_t seed = 0;
    std::size_t neighbor = 0;
    double lambda = 0.0;
};

struct VectorSmoteResult {
    SliceMatrix synthetic;
    std::vector<SmoteDraw> draws;
    std::vector<std::vector<std::size_t>> graph;
};

/// Enumerates every (mu, I in Omega(mu)) pair `repeats` times, giving
/// D * K * repeats rows. k == D - 1 makes every other point a neighbour.
VectorSmoteResult vector_smote(const SliceMatrix& original, std::size_t k, std::size_t repeats,
                               const LambdaSpec& lambda, Rng& rng);

/// Mean error term computed from the graph: (1/DKR) sum_mu (in-weight -
/// out-weight) x_mu, where in-weight sums lambda over edges into mu.
Eigen::VectorXd error_term_from_graph(const SliceMatrix& original,
                                      const std::vector<SmoteDraw>& draws);

struct VarianceCheck {
    double sigma2 = 0.0;    // population variance of the slice
    double predicted = 0.0;
    double observed = 0.0;
};

/// Pads a slice of n values with (N - n) copies of its mean, N = n * n_slices,
/// and compares the padded variance with sigma^2 / n_slices.
VarianceCheck mean_imputation_variance_check(const std::vector<double>& values,
                                             std::size_t n_slices);

/// Same slice padded with (N - n) per-feature SMOTE values instead. The
/// prediction is sigma^2 / n_T + (1 - 1/n_T) * factor * sigma^2 with the
/// factor from theoretical_cov_factor.
VarianceCheck smote_padding_variance_check(const std::vector<double>& values,
                                           std::size_t n_slices, std::size_t k,
                                           const LambdaSpec& lambda, Rng& rng);

/// Sample mean and standard error of a list of repeated measurements.
struct MonteCarloEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

MonteCarloEstimate summarize(const std::vector<double>& values);

} // namespace tsmote
