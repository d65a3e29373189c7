#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tsmote/dataset.hpp"
#include "tsmote/dynamics.hpp"
#include "tsmote/imputation.hpp"
#include "tsmote/smoothing.hpp"
#include "tsmote/synthesis.hpp"

namespace tsmote {

/// z-score parameters learned from training rows only.
class Normalizer {
public:
    static Normalizer fit(const Eigen::MatrixXd& features);

    Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;

    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::VectorXd& stddev() const { return stddev_; }

private:
    Eigen::VectorXd mean_;
    Eigen::VectorXd stddev_;
};

struct LogisticConfig {
    double learning_rate = 0.1;
    std::size_t iterations = 5000;
    double l2 = 1e-4;
};

struct LogisticModel {
    Normalizer normalizer;
    Eigen::VectorXd weights;
    double bias = 0.0;
    LogisticConfig config;

    /// P(label == 1) for each row of raw (unnormalised) features.
    Eigen::VectorXd predict_proba(const Eigen::MatrixXd& features) const;
};

/// Full-batch gradient descent on mean cross-entropy + (l2/2)|w|^2 from a
/// zero start. Features are z-normalised internally with train statistics.
LogisticModel fit_logistic(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                           const LogisticConfig& config = {});

/// Rank-statistic AUC with midranks for ties. Throws DataError when labels
/// contain a single class.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct Evaluation {
    double accuracy = 0.0;
    double auc = 0.0;
};

Evaluation evaluate(const LogisticModel& model, const Eigen::MatrixXd& features,
                    const std::vector<int>& labels);

enum class FeatureLayout { flattened, endpoint };

FeatureLayout parse_feature_layout(const std::string& text);
std::string to_string(FeatureLayout layout);

/// One row per sample: all slots (slot-major) or only the last slot.
Eigen::MatrixXd tensor_features(const ImputedTensor& tensor, FeatureLayout layout);

/// Labels as 0/1 by position in `classes`.
std::vector<int> binary_labels(const std::vector<std::optional<std::string>>& labels,
                               const std::vector<std::string>& classes);

struct ComparisonConfig {
    TwoClassConfig experiment;
    SynthesisConfig synthesis;
    SmoothingConfig smoothing;
    bool smooth_test = true;
    bool class_blind_baselines = false;
    FeatureLayout layout = FeatureLayout::flattened;
    LogisticConfig logistic;
    std::size_t repetitions = 10;
    std::size_t threads = 1;
    std::vector<ImputationMethod> methods = {ImputationMethod::tsmote, ImputationMethod::slice_mean,
                                             ImputationMethod::slice_median};
};

struct ComparisonRow {
    ImputationMethod method = ImputationMethod::tsmote;
    std::vector<double> accuracy; // one per repetition
    std::vector<double> auc;

    double mean_accuracy() const;
    double mean_auc() const;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    std::vector<std::uint64_t> seeds;

    const ComparisonRow& row(ImputationMethod method) const;
};

/// For each repetition seed: generate the two-class experiment, impute train
/// with every method, smooth, fit on train, score on the grid-generated test.
ComparisonTable run_imputer_comparison(std::uint64_t seed, const ComparisonConfig& config);

} // namespace tsmote
