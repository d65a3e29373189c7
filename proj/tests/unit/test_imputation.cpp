#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "fixtures.hpp"
#include "tsmote/dynamics.hpp"
#include "tsmote/error.hpp"
#include "tsmote/imputation.hpp"

using namespace tsmote;
using fixtures::dataset;
using fixtures::sample;

namespace {

SyntheticPool pool_with(std::size_t n_slices, std::size_t slice, std::vector<std::vector<double>> vectors) {
    SyntheticPool pool;
    pool.classes = {""};
    pool.n_slices = n_slices;
    pool.cells.resize(n_slices);
    const std::size_t n = vectors.size();
    pool.cells[slice] = PoolCell(std::move(vectors), n, Rng(0));
    return pool;
}

struct Prepared {
    TimeSeriesDataset data;
    SliceGrid grid;
    SliceAssignment assignment;
};

Prepared oscillator(std::uint64_t seed, std::size_t n_samples, std::size_t n_slices) {
    OscillatorConfig config;
    config.seed = seed;
    config.n_samples = n_samples;
    Prepared p;
    p.data = generate_oscillator_dataset(config);
    p.grid = build_slice_grid(p.data, n_slices);
    p.assignment = assign_slices(p.data, p.grid);
    return p;
}

} // namespace

TEST_CASE("a null component takes the drawn pool component") {
    auto s = sample("a", std::nullopt, {{0.0, {Value{}, 4.0}}});
    auto pool = pool_with(3, 2, {{7.5, 9.9}});
    ImputationConfig config;
    config.allow_null_feature_imputation = true;
    const auto out = replace_nulls(s, 0, {2}, pool, config);
    CHECK(out.observations[0].values == std::vector<Value>{7.5, 4.0});

    // pool of one vector is now empty
    CHECK_THROWS_AS(replace_nulls(s, 0, {2}, pool, config), PoolUnderflowError);
}

TEST_CASE("null replacement is gated and a null-free sample is unchanged") {
    auto clean = sample("c", std::nullopt, {{0.0, {1.0, 2.0}}});
    auto pool = pool_with(1, 0, {{0.0, 0.0}});
    ImputationConfig config;
    const auto out = replace_nulls(clean, 0, {0}, pool, config);
    CHECK(out.observations[0].values == clean.observations[0].values);
    CHECK(pool.cell(0, 0).remaining() == 1);

    auto dirty = sample("d", std::nullopt, {{0.0, {Value{}, 2.0}}});
    try {
        replace_nulls(dirty, 0, {0}, pool, config);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("destroys correlations") != std::string::npos);
    }
}

TEST_CASE("reshape places observations by slice and averages degenerate ones") {
    // observations in slices 0 and 3 of 5
    auto s = sample("x", std::nullopt, {{0.1, {1.0, 1.0}}, {3.2, {3.0, 5.0}}});
    const auto row = reshape_to_grid(s, {0, 3}, 5);
    REQUIRE(row.size() == 5);
    CHECK(row[0] == std::vector<double>{1.0, 1.0});
    CHECK_FALSE(row[1]);
    CHECK_FALSE(row[2]);
    CHECK(row[3] == std::vector<double>{3.0, 5.0});
    CHECK_FALSE(row[4]);

    const auto merged = reshape_to_grid(s, {2, 2}, 3);
    CHECK(merged[2] == std::vector<double>{2.0, 3.0});

    auto full = sample("f", std::nullopt, {{0.0, {1.0}}, {1.0, {2.0}}});
    const auto full_row = reshape_to_grid(full, {0, 1}, 2);
    CHECK(full_row[0]);
    CHECK(full_row[1]);
}

TEST_CASE("missing slots are filled from their own slice of the pool") {
    GridRow row(4);
    row[0] = std::vector<double>{1.0, 1.0};
    row[3] = std::vector<double>{4.0, 4.0};
    SyntheticPool pool;
    pool.classes = {""};
    pool.n_slices = 4;
    pool.cells.resize(4);
    pool.cells[1] = PoolCell({{2.0, 2.0}}, 1, Rng(0));
    pool.cells[2] = PoolCell({{3.0, 3.0}}, 1, Rng(0));
    const auto out = fill_missing_slices(row, 0, pool, {}, ImputationConfig{});
    CHECK(out == std::vector<std::vector<double>>{{1, 1}, {2, 2}, {3, 3}, {4, 4}});
    CHECK(pool.cells[1].remaining() == 0);

    GridRow complete{std::vector<double>{5.0}};
    SyntheticPool empty;
    empty.classes = {""};
    empty.n_slices = 1;
    empty.cells.resize(1);
    CHECK(fill_missing_slices(complete, 0, empty, {}, ImputationConfig{}) == std::vector<std::vector<double>>{{5.0}});
}

TEST_CASE("fixed features are overwritten with the sample's own value") {
    GridRow row(2);
    row[0] = std::vector<double>{67.0, 0.5};
    auto pool = pool_with(2, 1, {{52.0, 0.9}});
    const auto out = fill_missing_slices(row, 0, pool, {67.0}, ImputationConfig{});
    CHECK(out[1] == std::vector<double>{67.0, 0.9});
}

TEST_CASE("oscillator tensor shape and completeness") {
    auto p = oscillator(4, 100, 50);
    SynthesisConfig synth;
    synth.seed = 12;
    const auto t = impute_dataset(p.data, p.grid, p.assignment, synth, ImputationConfig{});
    CHECK(t.n_samples() == 100);
    CHECK(t.n_slices() == 50);
    CHECK(t.n_features == 2);
    CHECK(t.data.size() == 100 * 50 * 2);
    for (double v : t.data) CHECK(std::isfinite(v));
    CHECK(t.grid_times == p.grid.absolute_grid_times());
}

TEST_CASE("imputation never overwrites real data") {
    auto p = oscillator(8, 60, 20);
    for (auto method : {ImputationMethod::tsmote, ImputationMethod::slice_mean, ImputationMethod::slice_median}) {
        SynthesisConfig synth;
        synth.seed = 3;
        ImputationConfig config;
        config.method = method;
        const auto t = impute_dataset(p.data, p.grid, p.assignment, synth, config);
        for (std::size_t i = 0; i < p.data.samples.size(); ++i) {
            // oracle: per-slot componentwise mean of the sample's own observations
            std::map<std::size_t, std::pair<std::vector<double>, int>> slots;
            const auto& obs = p.data.samples[i].observations;
            for (std::size_t mu = 0; mu < obs.size(); ++mu) {
                auto& [sum, n] = slots[p.assignment[i][mu]];
                sum.resize(2, 0.0);
                for (std::size_t k = 0; k < 2; ++k) sum[k] += *obs[mu].values[k];
                ++n;
            }
            for (const auto& [s, acc] : slots) {
                for (std::size_t k = 0; k < 2; ++k) CHECK(t.at(i, s, k) == doctest::Approx(acc.first[k] / acc.second).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("slice mean fills with the class-slice mean") {
    auto d = dataset(1, {sample("a", std::nullopt, {{0.0, {2.0}}, {1.0, {9.0}}}),
                         sample("b", std::nullopt, {{0.1, {4.0}}, {1.1, {7.0}}}),
                         sample("c", std::nullopt, {{1.2, {8.0}}})});
    SliceGrid grid;
    grid.n_slices = 2;
    grid.boundaries = {0.0, 0.5, 1.2};
    grid.grid_times = {0.05, 1.1};
    const SliceAssignment a{{0, 1}, {0, 1}, {1}};
    ImputationConfig config;
    config.method = ImputationMethod::slice_mean;
    const auto t = impute_dataset(d, grid, a, SynthesisConfig{}, config);
    CHECK(t.at(2, 0, 0) == 3.0);

    config.method = ImputationMethod::slice_median;
    d.samples.push_back(sample("d", std::nullopt, {{0.2, {10.0}}, {1.0, {1.0}}}));
    const SliceAssignment a2{{0, 1}, {0, 1}, {1}, {0, 1}};
    CHECK(impute_dataset(d, grid, a2, SynthesisConfig{}, config).at(2, 0, 0) == 4.0);
}

TEST_CASE("baselines are per class unless asked to pool") {
    auto d = dataset(1, {sample("a", "x", {{0.0, {1.0}}, {1.0, {0.0}}}),
                         sample("b", "x", {{1.0, {0.0}}}),
                         sample("c", "y", {{0.0, {11.0}}, {1.0, {0.0}}})});
    SliceGrid grid;
    grid.n_slices = 2;
    grid.boundaries = {0.0, 0.5, 1.0};
    grid.grid_times = {0.0, 1.0};
    const SliceAssignment a{{0, 1}, {1}, {0, 1}};
    ImputationConfig config;
    config.method = ImputationMethod::slice_mean;
    CHECK(impute_dataset(d, grid, a, SynthesisConfig{}, config).at(1, 0, 0) == 1.0);
    config.class_blind_baselines = true;
    CHECK(impute_dataset(d, grid, a, SynthesisConfig{}, config).at(1, 0, 0) == 6.0);
}

TEST_CASE("a complete dataset is imputed identically by every method") {
    std::vector<Sample> samples;
    for (int i = 0; i < 6; ++i) {
        samples.push_back(sample("s" + std::to_string(i), std::nullopt,
                                 {{0.0, {double(i), 1.0}}, {1.0, {2.0 * i, 2.0}}, {2.0, {3.0 * i, i + 0.5}}}));
    }
    auto d = dataset(2, samples);
    const auto grid = build_slice_grid(d, 3, GridTimePolicy::midpoint);
    const auto a = assign_slices(d, grid);
    const auto reference = tensor_from_complete(d, grid, a);
    for (auto method : {ImputationMethod::tsmote, ImputationMethod::slice_mean, ImputationMethod::slice_median}) {
        ImputationConfig config;
        config.method = method;
        CHECK(impute_dataset(d, grid, a, SynthesisConfig{}, config).data == reference.data);
    }
}

TEST_CASE("fixed features are constant across slots") {
    auto p = oscillator(21, 40, 10);
    // prepend an age-like fixed feature
    TimeSeriesDataset d;
    d.n_features = 3;
    d.feature_names = {"age", "x", "y"};
    for (std::size_t i = 0; i < p.data.samples.size(); ++i) {
        Sample s = p.data.samples[i];
        s.fixed_prefix_len = 1;
        for (auto& o : s.observations) o.values.insert(o.values.begin(), Value{20.0 + double(i)});
        d.samples.push_back(s);
    }
    SynthesisConfig synth;
    synth.seed = 5;
    const auto t = impute_dataset(d, p.grid, p.assignment, synth, ImputationConfig{});
    CHECK(t.fixed_prefix_len == 1);
    for (std::size_t i = 0; i < t.n_samples(); ++i)
        for (std::size_t s = 0; s < t.n_slices(); ++s) CHECK(t.at(i, s, 0) == 20.0 + double(i));
}

TEST_CASE("nulls need the independence declaration under tsmote only") {
    auto p = oscillator(30, 60, 6);
    p.data.samples[0].observations[0].values[1] = std::nullopt;
    SynthesisConfig synth;
    synth.seed = 1;
    ImputationConfig config;
    CHECK_THROWS_AS(impute_dataset(p.data, p.grid, p.assignment, synth, config), ConfigError);

    config.allow_null_feature_imputation = true;
    const auto t = impute_dataset(p.data, p.grid, p.assignment, synth, config);
    for (double v : t.data) CHECK(std::isfinite(v));
    // the non-null component of the patched observation survives when alone in its slot
    const auto& a0 = p.assignment[0];
    if (a0.size() < 2 || a0[1] != a0[0]) CHECK(t.at(0, a0[0], 0) == *p.data.samples[0].observations[0].values[0]);

    ImputationConfig baseline;
    baseline.method = ImputationMethod::slice_mean;
    CHECK_NOTHROW(impute_dataset(p.data, p.grid, p.assignment, synth, baseline));
}

TEST_CASE("observed mask marks slots with real observations") {
    auto d = dataset(1, {sample("a", std::nullopt, {{0.0, {1.0}}, {0.1, {1.0}}}),
                         sample("b", std::nullopt, {{2.0, {1.0}}})});
    const SliceAssignment a{{0, 0}, {2}};
    const auto m = observed_mask(d, a, 3);
    CHECK(m[0] == std::vector<bool>{true, false, false});
    CHECK(m[1] == std::vector<bool>{false, false, true});
}

TEST_CASE("method names") {
    CHECK(parse_imputation_method("tsmote") == ImputationMethod::tsmote);
    CHECK(parse_imputation_method("mean") == ImputationMethod::slice_mean);
    CHECK(parse_imputation_method("slice_median") == ImputationMethod::slice_median);
    CHECK_THROWS_AS(parse_imputation_method("knn"), ConfigError);
}
