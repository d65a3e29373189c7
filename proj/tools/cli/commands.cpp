#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "moment_suite.hpp"
#include "tsmote/classify.hpp"
#include "tsmote/dynamics.hpp"
#include "tsmote/error.hpp"
#include "tsmote/imputation.hpp"
#include "tsmote/io.hpp"
#include "tsmote/slicing.hpp"
#include "tsmote/smoothing.hpp"
#include "tsmote/synthesis.hpp"

namespace tsmote::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string input;
    std::string grid;
    std::string out_dir;
    std::string class_column = "class";
    std::size_t fixed_features = 0;
    std::optional<double> t_min;
    std::optional<double> t_max;
    std::uint64_t seed = 0;
    std::size_t slices = 50;
    std::string grid_time = "median";
    std::size_t k = 5;
    double surplus = 1.0;
    std::string lambda = "uniform";
    std::string replacement = "without";
    std::string method = "tsmote";
    bool allow_null = false;
    bool smooth = false;
    std::size_t window = 25;
    std::size_t order = 5;
    std::size_t threads = 1;
    std::string time_dist = "uniform";
    std::string features = "flat";
    std::size_t repetitions = 10;
    bool class_blind = false;
};

void add_input(CLI::App* app, Options& o) {
    app->add_option("--input", o.input, "long-format CSV (sample_id, time, [class,] features)")->required();
    app->add_option("--class-column", o.class_column, "name of the class column");
    app->add_option("--fixed-features", o.fixed_features, "leading time-independent features");
}

void add_grid(CLI::App* app, Options& o) {
    app->add_option("--slices", o.slices, "number of time slices");
    app->add_option("--grid-time", o.grid_time, "grid time per slice: midpoint | median");
    app->add_option("--t-min", o.t_min, "override the start of the time window");
    app->add_option("--t-max", o.t_max, "override the end of the time window");
}

void add_synthesis(CLI::App* app, Options& o) {
    app->add_option("--k", o.k, "nearest neighbours per seed");
    app->add_option("--surplus", o.surplus, "pool size / required draws (>= 1)");
    app->add_option("--lambda", o.lambda, "interpolation weight: uniform | beta:A,B | point:C");
    app->add_option("--replacement", o.replacement, "pool draws: with | without");
}

void add_smoothing(CLI::App* app, Options& o) {
    app->add_flag("--smooth,!--no-smooth", o.smooth, "Savitzky-Golay smoothing of imputed trajectories");
    app->add_option("--window", o.window, "smoothing window (odd)");
    app->add_option("--order", o.order, "smoothing polynomial order");
}

void add_common(CLI::App* app, Options& o, bool seed_required, bool out_required) {
    auto* seed = app->add_option("--seed", o.seed, "random seed");
    if (seed_required) seed->required();
    auto* out = app->add_option("--out-dir", o.out_dir, "directory for all output files");
    if (out_required) out->required();
    app->add_option("--threads", o.threads, "worker threads");
}

void write_file(const Options& o, const std::string& name, const std::function<void(std::ostream&)>& body) {
    if (o.out_dir.empty()) return;
    fs::create_directories(o.out_dir);
    const fs::path path = fs::path(o.out_dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    body(out);
    if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

void write_json(const Options& o, const std::string& name, const json& j) {
    write_file(o, name, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

json warnings_json(const ValidationReport& report, const std::vector<std::string>& extra = {}) {
    json out = json::array();
    for (const auto& w : report.warnings) out.push_back(w.kind + ": " + w.message);
    for (const auto& w : extra) out.push_back(w);
    return out;
}

struct Loaded {
    TimeSeriesDataset dataset;
    ValidationReport report;
};

Loaded load_dataset(const Options& o) {
    CsvReadOptions read;
    read.class_column = o.class_column;
    read.fixed_prefix_len = o.fixed_features;
    Loaded loaded{read_dataset_csv(fs::path(o.input), read), {}};
    for (auto& s : loaded.dataset.samples) s.fixed_prefix_len = o.fixed_features;
    loaded.report = validate_dataset(loaded.dataset, ValidationContext{o.slices});
    require_valid(loaded.report);
    return loaded;
}

SliceGrid read_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open grid '" + path + "'");
    try {
        return grid_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ParseError("grid JSON: " + std::string(e.what()));
    }
}

SliceGrid make_grid(const TimeSeriesDataset& dataset, const Options& o) {
    return build_slice_grid(dataset, o.slices, parse_grid_time_policy(o.grid_time), BoundsOverride{o.t_min, o.t_max});
}

int cmd_slice(const Options& o, std::ostream& out) {
    const auto loaded = load_dataset(o);
    const SliceGrid grid = make_grid(loaded.dataset, o);
    const auto assignment = assign_slices(loaded.dataset, grid);
    write_json(o, "grid.json", grid_to_json(grid));
    write_file(o, "assignment.csv", [&](std::ostream& f) { write_assignment_csv(f, loaded.dataset, assignment, grid); });
    out << json{{"command", "slice"},
                {"n_slices", grid.n_slices},
                {"occupancy_spread", grid.occupancy_spread()},
                {"warnings", warnings_json(loaded.report)}}
               .dump()
        << '\n';
    return kOk;
}

int cmd_impute(const Options& o, std::ostream& out) {
    const auto loaded = load_dataset(o);
    const auto& dataset = loaded.dataset;
    const SliceGrid grid = o.grid.empty() ? make_grid(dataset, o) : read_grid(o.grid);
    const auto assignment = assign_slices(dataset, grid);

    SynthesisConfig synth;
    synth.k_neighbors = o.k;
    synth.lambda = LambdaSpec::parse(o.lambda);
    synth.surplus_factor = o.surplus;
    synth.seed = o.seed;
    synth.replacement = parse_replacement(o.replacement);
    synth.threads = o.threads;
    ImputationConfig imp;
    imp.method = parse_imputation_method(o.method);
    imp.replacement = synth.replacement;
    imp.allow_null_feature_imputation = o.allow_null;

    SmoothingConfig smoothing{o.window, o.order, o.smooth};
    if (smoothing.enabled) smoothing.validate();

    SyntheticPool pool;
    ImputedTensor tensor = impute_dataset(dataset, grid, assignment, synth, imp, &pool);
    tensor = smooth_tensor(tensor, smoothing);

    const auto mask = observed_mask(dataset, assignment, grid.n_slices);
    write_json(o, "grid.json", grid_to_json(grid));
    write_file(o, "imputed.csv", [&](std::ostream& f) { write_tensor_csv(f, tensor); });
    write_json(o, "imputed.json", tensor_to_json(tensor, grid));
    write_file(o, "mask.csv", [&](std::ostream& f) {
        f << "sample_id,slice_index,observed\n";
        for (std::size_t i = 0; i < mask.size(); ++i) {
            for (std::size_t s = 0; s < mask[i].size(); ++s) {
                f << csv_escape(dataset.samples[i].id) << ',' << s << ',' << (mask[i][s] ? 1 : 0) << '\n';
            }
        }
    });
    if (imp.method == ImputationMethod::tsmote) {
        write_file(o, "pool.csv", [&](std::ostream& f) { write_pool_csv(f, pool, grid, tensor.feature_names); });
    }
    out << json{{"command", "impute"},
                {"method", to_string(imp.method)},
                {"shape", {tensor.n_samples(), tensor.n_slices(), tensor.n_features}},
                {"smoothed", smoothing.enabled},
                {"warnings", warnings_json(loaded.report, pool.warnings)}}
               .dump()
        << '\n';
    return kOk;
}

int cmd_verify_moments(const Options& o, std::ostream& out) {
    MomentSuiteConfig config;
    config.seed = o.seed;
    config.repetitions = o.repetitions;
    config.threads = o.threads;
    if (config.repetitions < 2) throw ConfigError("verify-moments needs at least 2 repetitions");
    const json result = run_moment_suite(config);
    write_json(o, "moments.json", result);
    json failed = json::array();
    for (const auto& c : result["checks"]) {
        if (!c["pass"].get<bool>()) failed.push_back(c["name"]);
    }
    out << json{{"command", "verify-moments"},
                {"verdict", result["verdict"]},
                {"cov_factor", result["cov_factor"]},
                {"failed", failed}}
               .dump()
        << '\n';
    return result["verdict"] == "pass" ? kOk : kVerificationFailed;
}

TwoClassConfig experiment_config(const Options& o) {
    TwoClassConfig config;
    config.n_slices = o.slices;
    config.policy = parse_grid_time_policy(o.grid_time);
    config.time_dist = parse_time_distribution(o.time_dist);
    return config;
}

int cmd_demo_oscillator(const Options& o, std::ostream& out) {
    const auto exp = generate_two_class_experiment(o.seed, experiment_config(o));
    write_file(o, "train.csv", [&](std::ostream& f) { write_dataset_csv(f, exp.train); });
    write_file(o, "test.csv", [&](std::ostream& f) { write_dataset_csv(f, exp.test); });
    write_json(o, "grid.json", grid_to_json(exp.grid));
    write_file(o, "slices.csv", [&](std::ostream& f) {
        const double t0 = exp.grid.bounds.t_min;
        f << "slice_index,lower,upper,width,grid_time,occupancy\n";
        for (std::size_t s = 0; s < exp.grid.n_slices; ++s) {
            f << s << ',' << format_double(t0 + exp.grid.boundaries[s]) << ','
              << format_double(t0 + exp.grid.boundaries[s + 1]) << ','
              << format_double(exp.grid.boundaries[s + 1] - exp.grid.boundaries[s]) << ','
              << format_double(t0 + exp.grid.grid_times[s]) << ',' << exp.grid.occupancy[s] << '\n';
        }
    });
    out << json{{"command", "demo-oscillator"},
                {"train_samples", exp.train.samples.size()},
                {"test_samples", exp.test.samples.size()},
                {"train_observations", exp.train.total_observations()},
                {"n_slices", exp.grid.n_slices}}
               .dump()
        << '\n';
    return kOk;
}

int cmd_compare_imputers(const Options& o, std::ostream& out) {
    ComparisonConfig config;
    config.experiment = experiment_config(o);
    config.synthesis.k_neighbors = o.k;
    config.synthesis.lambda = LambdaSpec::parse(o.lambda);
    config.synthesis.surplus_factor = o.surplus;
    config.synthesis.replacement = parse_replacement(o.replacement);
    config.smoothing = SmoothingConfig{o.window, o.order, o.smooth};
    config.layout = parse_feature_layout(o.features);
    config.repetitions = o.repetitions;
    config.threads = o.threads;
    config.class_blind_baselines = o.class_blind;
    const auto table = run_imputer_comparison(o.seed, config);

    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"method", to_string(r.method)},
                        {"accuracy", r.mean_accuracy()},
                        {"auc", r.mean_auc()},
                        {"accuracy_per_repetition", r.accuracy},
                        {"auc_per_repetition", r.auc}});
    }
    const json result = {{"seed", o.seed},
                         {"repetitions", config.repetitions},
                         {"features", to_string(config.layout)},
                         {"smoothing", config.smoothing.enabled},
                         {"class_blind_baselines", config.class_blind_baselines},
                         {"repetition_seeds", table.seeds},
                         {"rows", rows}};
    write_json(o, "comparison.json", result);
    write_file(o, "comparison.csv", [&](std::ostream& f) {
        f << "method,accuracy,auc,repetitions\n";
        for (const auto& r : table.rows) {
            f << to_string(r.method) << ',' << format_double(r.mean_accuracy()) << ','
              << format_double(r.mean_auc()) << ',' << r.accuracy.size() << '\n';
        }
    });
    json summary = json::array();
    for (const auto& r : table.rows) {
        summary.push_back({{"method", to_string(r.method)}, {"accuracy", r.mean_accuracy()}, {"auc", r.mean_auc()}});
    }
    out << json{{"command", "compare-imputers"}, {"rows", summary}}.dump() << '\n';
    return kOk;
}

// Turns a JSON object of option values into command-line tokens.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("config JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw ConfigError("config JSON must be an object");
    std::vector<std::string> tokens;
    for (const auto& [key, value] : j.items()) {
        std::string name = key;
        std::replace(name.begin(), name.end(), '_', '-');
        if (name.rfind("--", 0) != 0) name = "--" + name;
        if (value.is_boolean()) {
            tokens.push_back(value.get<bool>() ? name : "--no-" + name.substr(2));
        } else if (value.is_number_integer() || value.is_number_unsigned()) {
            tokens.push_back(name);
            tokens.push_back(value.dump());
        } else if (value.is_number()) {
            tokens.push_back(name);
            tokens.push_back(format_double(value.get<double>()));
        } else if (value.is_string()) {
            tokens.push_back(name);
            tokens.push_back(value.get<std::string>());
        } else {
            throw ConfigError("config value for '" + key + "' must be a scalar");
        }
    }
    return tokens;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::optional<std::string> config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a file path");
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!config_path || rest.empty()) return rest;
    // file values go first so that later command-line flags win
    std::vector<std::string> out{rest.front()};
    for (auto& t : config_tokens(*config_path)) out.push_back(std::move(t));
    out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
    err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Time-slice SMOTE imputation for irregular multivariate time series", "tsmote"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", "tsmote 0.1.0");

    Options slice_o, impute_o, moments_o, demo_o, compare_o;
    moments_o.repetitions = 20;
    compare_o.smooth = true;

    auto* slice = app.add_subcommand("slice", "build an equal-count slice grid and assign observations");
    add_input(slice, slice_o);
    add_grid(slice, slice_o);
    add_common(slice, slice_o, false, true);

    auto* impute = app.add_subcommand("impute", "fill every sample onto the slice grid");
    add_input(impute, impute_o);
    add_grid(impute, impute_o);
    impute->add_option("--grid", impute_o.grid, "reuse a grid JSON written by `slice`");
    add_synthesis(impute, impute_o);
    impute->add_option("--method", impute_o.method, "tsmote | slice_mean | slice_median");
    impute->add_flag("--allow-null-imputation", impute_o.allow_null,
                     "replace null features per feature (features must be independent)");
    add_smoothing(impute, impute_o);
    add_common(impute, impute_o, true, true);

    auto* moments = app.add_subcommand("verify-moments", "Monte-Carlo checks of the SMOTE moment properties");
    moments->add_option("--repetitions", moments_o.repetitions, "repetitions per check");
    add_common(moments, moments_o, true, false);

    auto* demo = app.add_subcommand("demo-oscillator", "two-class noisy oscillator train/test data");
    demo->add_option("--slices", demo_o.slices, "number of time slices");
    demo->add_option("--grid-time", demo_o.grid_time, "midpoint | median");
    demo->add_option("--time-dist", demo_o.time_dist, "observation times: uniform | exponential");
    add_common(demo, demo_o, true, true);

    auto* compare = app.add_subcommand("compare-imputers", "logistic regression accuracy per imputer");
    compare->add_option("--slices", compare_o.slices, "number of time slices");
    compare->add_option("--grid-time", compare_o.grid_time, "midpoint | median");
    compare->add_option("--time-dist", compare_o.time_dist, "observation times: uniform | exponential");
    compare->add_option("--features", compare_o.features, "classifier input: flat | endpoint");
    compare->add_option("--repetitions", compare_o.repetitions, "experiment repetitions");
    compare->add_flag("--class-blind-baselines", compare_o.class_blind, "mean/median over all classes");
    add_synthesis(compare, compare_o);
    add_smoothing(compare, compare_o);
    add_common(compare, compare_o, true, false);

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        for (auto* opt : sub->get_options()) {
            if (opt->get_expected_max() <= 1) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        }
    }

    try {
        std::vector<std::string> tokens = expand_config(args);
        std::reverse(tokens.begin(), tokens.end());
        app.parse(tokens);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", e.what());
        return kUsageError;
    } catch (const Error& e) {
        report_error(err, e.kind(), e.what());
        return kUsageError;
    }

    try {
        if (*slice) return cmd_slice(slice_o, out);
        if (*impute) return cmd_impute(impute_o, out);
        if (*moments) return cmd_verify_moments(moments_o, out);
        if (*demo) return cmd_demo_oscillator(demo_o, out);
        if (*compare) return cmd_compare_imputers(compare_o, out);
    } catch (const Error& e) {
        report_error(err, e.kind(), e.what());
        return kUsageError;
    } catch (const fs::filesystem_error& e) {
        report_error(err, "io", e.what());
        return kUsageError;
    } catch (const std::exception& e) {
        report_error(err, "internal", e.what());
        return kUsageError;
    }
    report_error(err, "usage", "no subcommand given");
    return kUsageError;
}

} // namespace tsmote::cli
