#include "moment_suite.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <random>
#include <thread>

#include "tsmote/io.hpp"
#include "tsmote/moments.hpp"
#include "tsmote/synthesis.hpp"

namespace tsmote::cli {

using nlohmann::json;

namespace {

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    std::vector<std::exception_ptr> errors(n);
    auto guarded = [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) guarded(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) guarded(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

SliceMatrix correlated_gaussian(std::size_t rows, std::size_t dims, double rho, Rng& rng) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(dims), static_cast<Eigen::Index>(dims), rho);
    cov.diagonal().setOnes();
    const Eigen::MatrixXd l = cov.llt().matrixL();
    std::normal_distribution<double> z;
    SliceMatrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dims));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        Eigen::VectorXd v(x.cols());
        for (Eigen::Index k = 0; k < x.cols(); ++k) v(k) = z(rng);
        x.row(i) = (l * v).transpose();
    }
    return x;
}

SliceMatrix draw_data(const std::string& dist, std::size_t rows, std::size_t dims, Rng& rng) {
    SliceMatrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dims));
    std::normal_distribution<double> normal;
    std::exponential_distribution<double> expo(1.0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index k = 0; k < x.cols(); ++k) {
            if (dist == "normal") x(i, k) = normal(rng);
            else if (dist == "exponential") x(i, k) = expo(rng);
            else x(i, k) = (uniform01(rng) < 0.5 ? -3.0 : 3.0) + normal(rng); // bimodal
        }
    }
    return x;
}

std::vector<std::vector<Value>> as_rows(const SliceMatrix& x) {
    std::vector<std::vector<Value>> rows;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        std::vector<Value> r;
        for (Eigen::Index k = 0; k < x.cols(); ++k) r.emplace_back(x(i, k));
        rows.push_back(std::move(r));
    }
    return rows;
}

SliceMatrix as_matrix(const std::vector<std::vector<double>>& rows) {
    SliceMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < rows[i].size(); ++k) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
    return x;
}

const std::vector<std::string> kCovLambdas = {"uniform", "beta:2,5", "point:0.3", "point:0", "point:1"};
const std::vector<std::string> kMeanLambdas = {"uniform", "beta:2,5", "point:0.3"};
const std::vector<std::string> kDataDists = {"normal", "exponential", "bimodal"};

} // namespace

json run_moment_suite(const MomentSuiteConfig& config) {
    const std::size_t reps = config.repetitions;
    json checks = json::array();
    json factors = json::object();
    bool all_pass = true;
    auto record = [&](json check) {
        all_pass = all_pass && check["pass"].get<bool>();
        checks.push_back(std::move(check));
    };

    // covariance factor: vector SMOTE on the complete neighbour graph
    constexpr std::size_t dims = 5;
    json example_report;
    for (std::size_t li = 0; li < kCovLambdas.size(); ++li) {
        const LambdaSpec lambda = LambdaSpec::parse(kCovLambdas[li]);
        const double factor = theoretical_cov_factor(lambda);
        // complete graph without self-pairs: exact expectation given the data
        const double d = static_cast<double>(config.points);
        const double finite_factor = 1.0 - (1.0 - factor) * d / (d - 1.0);
        std::vector<Eigen::MatrixXd> ratios(reps);
        std::vector<double> rep_z(reps, 0.0);
        std::vector<char> rep_pass(reps, 0);
        parallel_for(reps, config.threads, [&](std::size_t r) {
            Rng rng = derive_stream(config.seed, "cov-factor", {li, r});
            const SliceMatrix x = correlated_gaussian(config.points, dims, 0.6, rng);
            const auto smote = vector_smote(x, config.points - 1, 1, lambda, rng);
            const auto report = empirical_moments(x, smote.synthetic, lambda);
            ratios[r] = report.cov_ratio;
            const Eigen::ArrayXXd se = report.cov_synthetic_se.array() / report.cov_original.array().abs();
            const Eigen::ArrayXXd dev = (report.cov_ratio.array() - factor).abs();
            rep_pass[r] = (dev <= (3.0 * se).max(1e-9)).all();
            rep_z[r] = (dev / se.max(1e-12)).maxCoeff();
            if (li == 0 && r == 0) example_report = to_json(report);
        });
        const double max_rep_z = *std::max_element(rep_z.begin(), rep_z.end());
        double max_mean_z = 0.0, diag_mean = 0.0;
        bool mean_pass = true;
        for (Eigen::Index a = 0; a < static_cast<Eigen::Index>(dims); ++a) {
            for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(dims); ++b) {
                std::vector<double> v;
                for (const auto& m : ratios) v.push_back(m(a, b));
                const auto est = summarize(v);
                const double dev = std::abs(est.mean - finite_factor);
                mean_pass = mean_pass && dev <= std::max(3.0 * est.se, 1e-9);
                if (est.se > 1e-12) max_mean_z = std::max(max_mean_z, dev / est.se);
                if (a == b) diag_mean += est.mean / static_cast<double>(dims);
            }
        }
        bool pass = mean_pass && std::all_of(rep_pass.begin(), rep_pass.end(), [](char p) { return p != 0; });
        if (lambda.kind() == LambdaSpec::Kind::point_mass && (lambda.a() == 0.0 || lambda.a() == 1.0)) {
            pass = pass && factor == 1.0;
        }
        factors[kCovLambdas[li]] = {{"theoretical", factor},
                                    {"finite_sample", finite_factor},
                                    {"measured_diagonal_mean", diag_mean}};
        record({{"name", "cov_factor " + kCovLambdas[li]},
                {"pass", pass},
                {"theoretical", factor},
                {"finite_sample", finite_factor},
                {"measured_diagonal_mean", diag_mean},
                {"max_abs_z_per_repetition", max_rep_z},
                {"max_abs_z_mean_vs_finite_sample", max_mean_z}});
    }

    // mean preservation with the per-feature kernel (K = 5)
    for (std::size_t di = 0; di < kDataDists.size(); ++di) {
        for (std::size_t li = 0; li < kMeanLambdas.size(); ++li) {
            const LambdaSpec lambda = LambdaSpec::parse(kMeanLambdas[li]);
            std::vector<double> worst(reps, 0.0);
            parallel_for(reps, config.threads, [&](std::size_t r) {
                Rng rng = derive_stream(config.seed, "mean", {di, li, r});
                const SliceMatrix x = draw_data(kDataDists[di], config.points, 2, rng);
                SynthesisConfig sc;
                sc.k_neighbors = 5;
                sc.lambda = lambda;
                const auto syn = synthesize_slice(as_rows(x), sc, config.synthetic_points, rng, "moment-suite");
                const auto report = empirical_moments(x, as_matrix(syn));
                worst[r] = (report.mean_error.array().abs() / report.mean_error_se.array()).maxCoeff();
            });
            const double max_z = *std::max_element(worst.begin(), worst.end());
            record({{"name", "mean_preservation " + kDataDists[di] + " " + kMeanLambdas[li]},
                    {"pass", max_z <= 3.0},
                    {"max_abs_z", max_z}});
        }
    }

    // error term: graph form equals the measured mean shift and averages to zero
    for (std::size_t li = 0; li < kMeanLambdas.size(); ++li) {
        const LambdaSpec lambda = LambdaSpec::parse(kMeanLambdas[li]);
        constexpr std::size_t rows = 200;
        std::vector<Eigen::VectorXd> errors(reps);
        std::vector<double> identity_gap(reps, 0.0);
        parallel_for(reps, config.threads, [&](std::size_t r) {
            Rng rng = derive_stream(config.seed, "error-term", {li, r});
            const SliceMatrix x = draw_data("exponential", rows, 2, rng);
            const auto smote = vector_smote(x, rows - 1, 1, lambda, rng);
            errors[r] = error_term_from_graph(x, smote.draws);
            const Eigen::VectorXd measured = smote.synthetic.colwise().mean() - x.colwise().mean();
            identity_gap[r] = (errors[r] - measured).cwiseAbs().maxCoeff();
        });
        bool pass = *std::max_element(identity_gap.begin(), identity_gap.end()) <= 1e-10;
        double max_z = 0.0;
        for (Eigen::Index k = 0; k < 2; ++k) {
            std::vector<double> v;
            for (const auto& e : errors) v.push_back(e(k));
            const auto est = summarize(v);
            const double z = est.se > 0.0 ? std::abs(est.mean) / est.se : 0.0;
            max_z = std::max(max_z, z);
            // point masses on the complete graph cancel exactly, leaving rounding only
            pass = pass && std::abs(est.mean) <= std::max(3.0 * est.se, 1e-12);
        }
        record({{"name", "error_term " + kMeanLambdas[li]}, {"pass", pass}, {"max_abs_z", max_z}});
    }

    // edge-count identity
    {
        bool pass = true;
        std::size_t slices = 0;
        for (std::size_t i = 0; i < 100; ++i) {
            Rng rng = derive_stream(config.seed, "edges", {i});
            const std::size_t rows = 10 + uniform_index(rng, 91);
            const SliceMatrix x = draw_data("normal", rows, 3, rng);
            for (std::size_t k : {1, 3, 5}) {
                const auto check = neighbor_degree_check(x, k);
                pass = pass && check.in_degree_sum == check.edge_count && check.edge_count == rows * k;
                ++slices;
            }
        }
        record({{"name", "edge_count_identity"}, {"pass", pass}, {"slices", slices}});
    }

    // mean padding shrinks the variance by n_T
    {
        bool pass = true;
        double max_gap = 0.0;
        for (std::size_t n_t : {1, 2, 4, 10, 50}) {
            Rng rng = derive_stream(config.seed, "var-bad", {n_t});
            std::vector<double> values;
            for (std::size_t i = 0; i < 40; ++i) values.push_back(uniform01(rng) * 10.0 - 5.0);
            const auto check = mean_imputation_variance_check(values, n_t);
            const double gap = std::abs(check.observed - check.predicted);
            max_gap = std::max(max_gap, gap);
            pass = pass && gap <= 1e-12 * std::max(1.0, check.sigma2);
        }
        record({{"name", "mean_imputation_variance"}, {"pass", pass}, {"max_abs_gap", max_gap}});
    }

    // SMOTE padding keeps most of it
    {
        constexpr std::size_t rows = 100;
        constexpr std::size_t n_t = 5;
        std::vector<double> observed(reps), predicted(reps);
        parallel_for(reps, config.threads, [&](std::size_t r) {
            Rng rng = derive_stream(config.seed, "var-good", {r});
            std::normal_distribution<double> normal;
            std::vector<double> values(rows);
            for (auto& v : values) v = normal(rng);
            const auto check = smote_padding_variance_check(values, n_t, rows - 1, LambdaSpec::uniform(), rng);
            observed[r] = check.observed / check.sigma2;
            predicted[r] = check.predicted / check.sigma2;
        });
        const auto est = summarize(observed);
        const double target = predicted.front();
        record({{"name", "smote_padding_variance"},
                {"pass", std::abs(est.mean - target) <= 3.0 * est.se},
                {"observed_over_sigma2", est.mean},
                {"predicted_over_sigma2", target},
                {"se", est.se}});
    }

    return {{"verdict", all_pass ? "pass" : "fail"},
            {"seed", config.seed},
            {"repetitions", reps},
            {"cov_factor", factors},
            {"checks", checks},
            {"example_report", example_report}};
}

} // namespace tsmote::cli
