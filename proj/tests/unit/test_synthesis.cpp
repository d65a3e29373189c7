#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "tsmote/error.hpp"
#include "tsmote/synthesis.hpp"

using namespace tsmote;
using fixtures::dataset;
using fixtures::sample;

namespace {

// exhaustive oracle: sort every other index by (distance, index)
std::vector<std::size_t> brute_knn(const std::vector<double>& v, std::size_t q, std::size_t k) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < v.size(); ++j)
        if (j != q) idx.push_back(j);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const double da = std::abs(v[a] - v[q]);
        const double db = std::abs(v[b] - v[q]);
        return da != db ? da < db : a < b;
    });
    idx.resize(std::min(k, idx.size()));
    return idx;
}

std::vector<std::vector<Value>> column(std::initializer_list<double> xs) {
    std::vector<std::vector<Value>> out;
    for (double x : xs) out.push_back({x});
    return out;
}

SliceGrid two_slice_grid() {
    SliceGrid g;
    g.n_slices = 2;
    g.boundaries = {0.0, 1.0, 2.0};
    g.grid_times = {0.5, 1.5};
    g.occupancy = {0, 0};
    return g;
}

// 100 samples, the first 40 observed in slice 0, all observed in slice 1
std::pair<TimeSeriesDataset, SliceAssignment> forty_of_hundred() {
    std::vector<Sample> samples;
    SliceAssignment a;
    for (int i = 0; i < 100; ++i) {
        std::vector<std::pair<double, std::vector<Value>>> rows;
        std::vector<std::size_t> slices;
        if (i < 40) {
            rows.push_back({0.5, {double(i)}});
            slices.push_back(0);
        }
        rows.push_back({1.5, {double(2 * i)}});
        slices.push_back(1);
        samples.push_back(sample("s" + std::to_string(i), std::nullopt, rows));
        a.push_back(slices);
    }
    return {dataset(1, samples), a};
}

} // namespace

TEST_CASE("knn_1d examples") {
    const std::vector<double> v{1, 2, 5, 9};
    CHECK(knn_1d(v, 1, 2) == std::vector<std::size_t>{0, 2});

    const std::vector<double> pair{4, 7};
    CHECK(knn_1d(pair, 0, 1) == std::vector<std::size_t>{1});

    const std::vector<double> tie{0, 1, 1, 3};
    CHECK(knn_1d(tie, 0, 1) == std::vector<std::size_t>{1});
}

TEST_CASE("knn_1d reduces k on sparse slices") {
    const std::vector<double> v{1, 2, 3};
    std::vector<std::string> warnings;
    CHECK(knn_1d(v, 0, 5, &warnings) == std::vector<std::size_t>{1, 2});
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("slice too sparse") != std::string::npos);
}

TEST_CASE("knn_1d agrees with the exhaustive oracle, ties included") {
    Rng rng = derive_stream(7, "knn-test");
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 60);
        std::vector<double> v(n);
        // small integer range forces many ties
        const bool ties = trial % 2 == 0;
        for (auto& x : v) x = ties ? double(uniform_index(rng, 8)) : uniform01(rng);
        const std::size_t k = 1 + uniform_index(rng, std::min<std::size_t>(10, n - 1));
        const std::size_t q = uniform_index(rng, n);
        CHECK(knn_1d(v, q, k) == brute_knn(v, q, k));
    }
}

TEST_CASE("synthesis on a two-point column") {
    SynthesisConfig config;
    config.k_neighbors = 1;
    const auto col = column({1.0, 3.0});
    Rng rng(1);

    // seeds are visited in shuffled order; lambda 0 copies the seed, 1 its neighbour
    config.lambda = LambdaSpec::point_mass(0.0);
    Rng copy = rng;
    auto out = synthesize_slice(col, config, 1, rng);
    const double seed_value = out[0][0];
    CHECK((seed_value == 1.0 || seed_value == 3.0));

    config.lambda = LambdaSpec::point_mass(1.0);
    out = synthesize_slice(col, config, 1, copy);
    CHECK(out[0][0] == 4.0 - seed_value);

    out = synthesize_slice(col, config, 2, rng);
    CHECK(out[0][0] + out[1][0] == 4.0);

    config.lambda = LambdaSpec::point_mass(0.5);
    out = synthesize_slice(col, config, 4, rng);
    for (const auto& v : out) CHECK(v[0] == 2.0);
}

TEST_CASE("a full cycle visits every seed-neighbour pair once") {
    SynthesisConfig config;
    config.k_neighbors = 2;
    config.lambda = LambdaSpec::point_mass(1.0);
    const auto col = column({0.0, 1.0, 3.0, 7.0});
    Rng rng(3);
    const auto out = synthesize_slice(col, config, 8, rng);
    // with lambda = 1 each output is the neighbour; count how often each value appears
    std::vector<double> got;
    for (const auto& v : out) got.push_back(v[0]);
    std::sort(got.begin(), got.end());
    // neighbours: 0->{1,3} 1->{0,3} 3->{1,0} 7->{3,1}
    CHECK(got == std::vector<double>{0, 0, 1, 1, 1, 3, 3, 3});
}

TEST_CASE("synthetic components stay inside the cell range") {
    Rng data_rng = derive_stream(11, "range");
    std::vector<std::vector<Value>> obs;
    for (int i = 0; i < 30; ++i) {
        std::vector<Value> v{uniform01(data_rng) * 10 - 5, uniform01(data_rng)};
        if (i % 7 == 0) v[1] = std::nullopt;
        obs.push_back(v);
    }
    SynthesisConfig config;
    Rng rng(5);
    const auto out = synthesize_slice(obs, config, 500, rng);
    for (std::size_t k = 0; k < 2; ++k) {
        double lo = 1e300, hi = -1e300;
        for (const auto& v : obs) {
            if (!v[k]) continue;
            lo = std::min(lo, *v[k]);
            hi = std::max(hi, *v[k]);
        }
        for (const auto& v : out) {
            CHECK(v[k] >= lo);
            CHECK(v[k] <= hi);
        }
    }
}

TEST_CASE("a feature with one non-null value is an error naming it") {
    std::vector<std::vector<Value>> obs{{1.0, 2.0}, {3.0, std::nullopt}, {4.0, std::nullopt}};
    SynthesisConfig config;
    Rng rng(1);
    try {
        synthesize_slice(obs, config, 3, rng, "slice 7");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("feature 1") != std::string::npos);
        CHECK(msg.find("slice 7") != std::string::npos);
    }
}

TEST_CASE("pool size follows the missing-slice count and the surplus") {
    auto [d, a] = forty_of_hundred();
    const auto grid = two_slice_grid();
    const auto required = required_draws(d, a, 2, false);
    CHECK(required == std::vector<std::size_t>{60, 0});

    SynthesisConfig config;
    config.seed = 3;
    auto pool = generate_pool(d, grid, a, config);
    CHECK(pool.cell(0, 0).vectors().size() == 60);
    CHECK(pool.cell(0, 1).empty());

    config.surplus_factor = 2.0;
    pool = generate_pool(d, grid, a, config);
    CHECK(pool.cell(0, 0).vectors().size() == 120);
}

TEST_CASE("complete coverage needs no synthetic data") {
    auto d = dataset(1, {sample("a", std::nullopt, {{0.5, {1.0}}, {1.5, {2.0}}}),
                         sample("b", std::nullopt, {{0.5, {3.0}}, {1.5, {4.0}}})});
    const SliceAssignment a{{0, 1}, {0, 1}};
    const auto pool = generate_pool(d, two_slice_grid(), a, SynthesisConfig{});
    CHECK(pool.cell(0, 0).empty());
    CHECK(pool.cell(0, 1).empty());
}

TEST_CASE("pools are per class and reproducible for any thread count") {
    std::vector<Sample> samples;
    SliceAssignment a;
    for (int i = 0; i < 40; ++i) {
        const std::string label = i % 2 ? "b" : "a";
        std::vector<std::pair<double, std::vector<Value>>> rows;
        std::vector<std::size_t> slices;
        const double base = i % 2 ? 100.0 : 0.0;
        if (i % 3) {
            rows.push_back({0.5, {base + i, -base - i}});
            slices.push_back(0);
        }
        rows.push_back({1.5, {base + 2 * i, base - i}});
        slices.push_back(1);
        samples.push_back(sample("s" + std::to_string(i), label, rows));
        a.push_back(slices);
    }
    auto d = dataset(2, samples);
    SynthesisConfig config;
    config.seed = 99;
    const auto serial = generate_pool(d, two_slice_grid(), a, config);
    config.threads = 4;
    const auto parallel = generate_pool(d, two_slice_grid(), a, config);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t s = 0; s < 2; ++s) CHECK(serial.cell(c, s).vectors() == parallel.cell(c, s).vectors());

    // class a values are below 100, class b values at or above it
    for (const auto& v : serial.cell(0, 0).vectors()) CHECK(v[0] < 100.0);
    for (const auto& v : serial.cell(1, 0).vectors()) CHECK(v[0] >= 100.0);

    config.seed = 100;
    const auto other = generate_pool(d, two_slice_grid(), a, config);
    CHECK(other.cell(0, 0).vectors() != serial.cell(0, 0).vectors());
}

TEST_CASE("without replacement a pool runs dry") {
    PoolCell cell({{1.0}, {2.0}, {3.0}}, 3, Rng(1));
    std::vector<double> seen;
    for (int i = 0; i < 3; ++i) seen.push_back(cell.draw(Replacement::without_replacement)[0]);
    std::sort(seen.begin(), seen.end());
    CHECK(seen == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(cell.remaining() == 0);
    CHECK_THROWS_AS(cell.draw(Replacement::without_replacement, "slice 4"), PoolUnderflowError);

    PoolCell again({{1.0}}, 1, Rng(1));
    for (int i = 0; i < 10; ++i) CHECK(again.draw(Replacement::with_replacement)[0] == 1.0);
}

TEST_CASE("a sparse cell that needs draws is an error") {
    auto d = dataset(1, {sample("a", std::nullopt, {{0.5, {1.0}}, {1.5, {2.0}}}),
                         sample("b", std::nullopt, {{1.5, {4.0}}})});
    const SliceAssignment a{{0, 1}, {1}};
    CHECK_THROWS_AS(generate_pool(d, two_slice_grid(), a, SynthesisConfig{}), DataError);
}

TEST_CASE("replacement names") {
    CHECK(parse_replacement("with") == Replacement::with_replacement);
    CHECK(parse_replacement("without") == Replacement::without_replacement);
    CHECK(to_string(Replacement::with_replacement) == "with");
    CHECK_THROWS_AS(parse_replacement("sometimes"), ConfigError);
}
