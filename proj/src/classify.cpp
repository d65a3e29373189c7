#include "tsmote/classify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "tsmote/error.hpp"
#include "tsmote/random.hpp"

namespace tsmote {

Normalizer Normalizer::fit(const Eigen::MatrixXd& features) {
    if (features.rows() < 1) throw DataError("cannot normalise an empty feature matrix");
    Normalizer n;
    n.mean_ = features.colwise().mean().transpose();
    const Eigen::MatrixXd centred = features.rowwise() - n.mean_.transpose();
    n.stddev_ = (centred.array().square().colwise().sum() / static_cast<double>(features.rows())).sqrt().transpose();
    for (Eigen::Index j = 0; j < n.stddev_.size(); ++j) {
        if (!(n.stddev_(j) > 1e-12 * std::max(1.0, std::abs(n.mean_(j))))) {
            throw DataError("feature column " + std::to_string(j) + " has zero variance in the training data");
        }
    }
    return n;
}

Eigen::MatrixXd Normalizer::apply(const Eigen::MatrixXd& features) const {
    if (features.cols() != mean_.size()) throw DataError("feature width differs from the fitted normaliser");
    return (features.rowwise() - mean_.transpose()).array().rowwise() / stddev_.transpose().array();
}

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace

Eigen::VectorXd LogisticModel::predict_proba(const Eigen::MatrixXd& features) const {
    const Eigen::VectorXd z = (normalizer.apply(features) * weights).array() + bias;
    return z.unaryExpr([](double v) { return sigmoid(v); });
}

LogisticModel fit_logistic(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                           const LogisticConfig& config) {
    if (static_cast<std::size_t>(features.rows()) != labels.size()) throw DataError("feature rows and labels differ in count");
    if (!features.allFinite()) throw DataError("features contain NaN or infinite values");
    std::size_t positives = 0;
    for (int y : labels) {
        if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
        positives += static_cast<std::size_t>(y);
    }
    if (positives == 0 || positives == labels.size()) throw DataError("training labels need both classes");

    LogisticModel model;
    model.config = config;
    model.normalizer = Normalizer::fit(features);
    const Eigen::MatrixXd x = model.normalizer.apply(features);
    Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i)) = labels[i];

    const double n = static_cast<double>(labels.size());
    model.weights = Eigen::VectorXd::Zero(x.cols());
    for (std::size_t it = 0; it < config.iterations; ++it) {
        const Eigen::VectorXd z = (x * model.weights).array() + model.bias;
        const Eigen::VectorXd residual = z.unaryExpr([](double v) { return sigmoid(v); }) - y;
        const Eigen::VectorXd grad = x.transpose() * residual / n + config.l2 * model.weights;
        model.weights -= config.learning_rate * grad;
        model.bias -= config.learning_rate * residual.mean();
    }
    return model;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw DataError("scores and labels differ in count");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double positive_rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j); // ranks i+1..j
        for (std::size_t r = i; r < j; ++r) {
            if (labels[order[r]] == 1) {
                positive_rank_sum += midrank;
                ++positives;
            }
        }
        i = j;
    }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) throw DataError("AUC is undefined when only one class is present");
    const double p = static_cast<double>(positives);
    return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

Evaluation evaluate(const LogisticModel& model, const Eigen::MatrixXd& features, const std::vector<int>& labels) {
    const Eigen::VectorXd proba = model.predict_proba(features);
    if (static_cast<std::size_t>(proba.size()) != labels.size()) throw DataError("feature rows and labels differ in count");
    std::vector<double> scores(proba.data(), proba.data() + proba.size());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if ((scores[i] >= 0.5 ? 1 : 0) == labels[i]) ++correct;
    }
    Evaluation e;
    e.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
    e.auc = roc_auc(scores, labels);
    return e;
}

FeatureLayout parse_feature_layout(const std::string& text) {
    if (text == "flat" || text == "flattened") return FeatureLayout::flattened;
    if (text == "endpoint") return FeatureLayout::endpoint;
    throw ConfigError("unknown feature layout '" + text + "' (flat | endpoint)");
}

std::string to_string(FeatureLayout layout) {
    return layout == FeatureLayout::flattened ? "flat" : "endpoint";
}

Eigen::MatrixXd tensor_features(const ImputedTensor& tensor, FeatureLayout layout) {
    const auto n = static_cast<Eigen::Index>(tensor.n_samples());
    const std::size_t per_sample = tensor.n_slices() * tensor.n_features;
    if (layout == FeatureLayout::flattened) {
        Eigen::MatrixXd x(n, static_cast<Eigen::Index>(per_sample));
        for (Eigen::Index i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < per_sample; ++j) x(i, static_cast<Eigen::Index>(j)) = tensor.data[static_cast<std::size_t>(i) * per_sample + j];
        }
        return x;
    }
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(tensor.n_features));
    const std::size_t last = tensor.n_slices() - 1;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < tensor.n_features; ++k) x(i, static_cast<Eigen::Index>(k)) = tensor.at(static_cast<std::size_t>(i), last, k);
    }
    return x;
}

std::vector<int> binary_labels(const std::vector<std::optional<std::string>>& labels,
                               const std::vector<std::string>& classes) {
    if (classes.size() != 2) throw DataError("binary classification needs exactly two classes");
    std::vector<int> out;
    out.reserve(labels.size());
    for (const auto& label : labels) {
        if (!label) throw DataError("unlabelled sample in classification data");
        const auto it = std::find(classes.begin(), classes.end(), *label);
        if (it == classes.end()) throw DataError("unknown class label '" + *label + "'");
        out.push_back(static_cast<int>(it - classes.begin()));
    }
    return out;
}

namespace {

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// test observations sit exactly on the grid, one per slot
ImputedTensor grid_tensor(const TimeSeriesDataset& test, const SliceGrid& grid) {
    ImputedTensor tensor;
    tensor.grid_times = grid.absolute_grid_times();
    tensor.n_features = test.n_features;
    tensor.feature_names = test.feature_names;
    for (const auto& sample : test.samples) {
        if (sample.observations.size() != grid.n_slices) {
            throw DataError("test sample '" + sample.id + "' is not on the slice grid");
        }
        tensor.sample_ids.push_back(sample.id);
        tensor.class_labels.push_back(sample.class_label);
        for (const auto& obs : sample.observations) {
            for (const auto& v : obs.values) tensor.data.push_back(v.value());
        }
    }
    return tensor;
}

} // namespace

double ComparisonRow::mean_accuracy() const { return mean_of(accuracy); }

double ComparisonRow::mean_auc() const { return mean_of(auc); }

const ComparisonRow& ComparisonTable::row(ImputationMethod method) const {
    for (const auto& r : rows) {
        if (r.method == method) return r;
    }
    throw ConfigError("comparison table has no row for " + to_string(method));
}

ComparisonTable run_imputer_comparison(std::uint64_t seed, const ComparisonConfig& config) {
    if (config.repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (config.methods.empty()) throw ConfigError("no imputation methods selected");
    if (config.smoothing.enabled) config.smoothing.validate();

    ComparisonTable table;
    for (std::size_t r = 0; r < config.repetitions; ++r) table.seeds.push_back(derive_stream(seed, "repetition", {r})());
    const std::size_t n_methods = config.methods.size();
    std::vector<Evaluation> results(config.repetitions * n_methods);
    std::vector<std::exception_ptr> errors(config.repetitions);

    auto run_rep = [&](std::size_t r) {
        try {
            const std::uint64_t rep_seed = table.seeds[r];
            const auto exp = generate_two_class_experiment(rep_seed, config.experiment);
            const auto assignment = assign_slices(exp.train, exp.grid);
            const auto classes = exp.train.class_labels();

            ImputedTensor test = grid_tensor(exp.test, exp.grid);
            if (config.smooth_test) test = smooth_tensor(test, config.smoothing);
            const Eigen::MatrixXd x_test = tensor_features(test, config.layout);
            const auto y_test = binary_labels(test.class_labels, classes);

            for (std::size_t m = 0; m < n_methods; ++m) {
                SynthesisConfig synth = config.synthesis;
                synth.seed = derive_stream(rep_seed, "synthesis")();
                synth.threads = 1;
                ImputationConfig imp;
                imp.method = config.methods[m];
                imp.replacement = synth.replacement;
                imp.class_blind_baselines = config.class_blind_baselines;
                const ImputedTensor train =
                    smooth_tensor(impute_dataset(exp.train, exp.grid, assignment, synth, imp), config.smoothing);
                const auto model = fit_logistic(tensor_features(train, config.layout),
                                                binary_labels(train.class_labels, classes), config.logistic);
                results[r * n_methods + m] = evaluate(model, x_test, y_test);
            }
        } catch (...) {
            errors[r] = std::current_exception();
        }
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(config.threads, config.repetitions));
    if (threads == 1) {
        for (std::size_t r = 0; r < config.repetitions; ++r) run_rep(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (std::size_t t = 0; t < threads; ++t) {
            workers.emplace_back([&] {
                for (std::size_t r = next++; r < config.repetitions; r = next++) run_rep(r);
            });
        }
        for (auto& w : workers) w.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    for (std::size_t m = 0; m < n_methods; ++m) {
        ComparisonRow row;
        row.method = config.methods[m];
        for (std::size_t r = 0; r < config.repetitions; ++r) {
            row.accuracy.push_back(results[r * n_methods + m].accuracy);
            row.auc.push_back(results[r * n_methods + m].auc);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace tsmote
