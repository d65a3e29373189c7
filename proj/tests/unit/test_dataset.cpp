#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "tsmote/dynamics.hpp"
#include "tsmote/error.hpp"

using namespace tsmote;
using fixtures::dataset;
using fixtures::sample;

TEST_CASE("minimal dataset is valid") {
    auto d = dataset(2, {sample("a", std::nullopt, {{0.0, {1.0, 2.0}}})});
    const auto report = validate_dataset(d);
    CHECK(report.ok());
    CHECK(report.violations.empty());
    CHECK(report.warnings.empty());
}

TEST_CASE("unsorted times are reported against the sample") {
    auto d = dataset(1, {sample("ok", std::nullopt, {{1.0, {1.0}}, {2.0, {1.0}}}),
                         sample("bad", std::nullopt, {{3.0, {1.0}}, {1.0, {2.0}}})});
    const auto report = validate_dataset(d);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].kind == "unsorted_times");
    CHECK(report.violations[0].sample_id == "bad");
    CHECK_THROWS_AS(require_valid(report), DataError);

    sort_observations(d);
    CHECK(validate_dataset(d).ok());
}

TEST_CASE("wrong widths and all-null observations are violations") {
    auto d = dataset(2, {sample("w", std::nullopt, {{0.0, {1.0}}}),
                         sample("n", std::nullopt, {{0.0, {Value{}, Value{}}}}),
                         sample("p", std::nullopt, {{0.0, {Value{}, 1.0}}})});
    const auto report = validate_dataset(d);
    CHECK(report.has_violation("wrong_width"));
    CHECK(report.has_violation("all_null_observation"));
    CHECK(report.violations.size() == 2); // a partial null is fine
}

TEST_CASE("non-finite values and times") {
    const double inf = std::numeric_limits<double>::infinity();
    auto d = dataset(1, {sample("t", std::nullopt, {{std::nan(""), {1.0}}}),
                         sample("v", std::nullopt, {{0.0, {inf}}})});
    const auto report = validate_dataset(d);
    CHECK(report.has_violation("non_finite_time"));
    CHECK(report.has_violation("non_finite_value"));
}

TEST_CASE("too few observations for the requested slices gives a warning") {
    std::vector<Sample> samples;
    for (int i = 0; i < 10; ++i) {
        samples.push_back(sample("s" + std::to_string(i), std::nullopt, {{0.0, {1.0}}, {1.0, {2.0}}}));
    }
    auto d = dataset(1, samples);
    const auto report = validate_dataset(d, ValidationContext{50});
    CHECK(report.ok());
    REQUIRE(report.has_warning("insufficient_observations"));
    CHECK(report.warnings[0].message.find("insufficient observations for 50 slices") == 0);

    // 20 observations cover 10 slices exactly
    CHECK_FALSE(validate_dataset(d, ValidationContext{10}).has_warning("insufficient_observations"));
}

TEST_CASE("the observation bound scales with the number of classes") {
    std::vector<Sample> samples;
    for (int i = 0; i < 10; ++i) {
        samples.push_back(sample("s" + std::to_string(i), i % 2 ? "a" : "b", {{0.0, {1.0}}, {1.0, {2.0}}}));
    }
    auto d = dataset(1, samples);
    CHECK(validate_dataset(d, ValidationContext{10}).has_warning("insufficient_observations"));
    CHECK_FALSE(validate_dataset(d, ValidationContext{5}).has_warning("insufficient_observations"));
}

TEST_CASE("duplicate timestamps are accepted with a warning") {
    auto d = dataset(1, {sample("a", std::nullopt, {{1.0, {1.0}}, {1.0, {3.0}}})});
    const auto report = validate_dataset(d);
    CHECK(report.ok());
    CHECK(report.has_warning("duplicate_timestamp"));
}

TEST_CASE("label, id and fixed-prefix consistency") {
    auto d = dataset(2, {sample("a", "x", {{0.0, {1.0, 1.0}}}), sample("b", std::nullopt, {{0.0, {1.0, 1.0}}}),
                         sample("a", "x", {{0.0, {1.0, 1.0}}})});
    auto report = validate_dataset(d);
    CHECK(report.has_violation("partial_labels"));
    CHECK(report.has_violation("duplicate_sample_id"));

    auto fixed = dataset(2, {sample("f", std::nullopt, {{0.0, {60.0, 1.0}}, {1.0, {Value{}, 2.0}}, {2.0, {61.0, 3.0}}})});
    fixed.samples[0].fixed_prefix_len = 1;
    CHECK(validate_dataset(fixed).has_violation("fixed_prefix_inconsistent"));
    fixed.samples[0].observations[2].values[0] = 60.0;
    CHECK(validate_dataset(fixed).ok());
    fixed.samples[0].fixed_prefix_len = 3;
    CHECK(validate_dataset(fixed).has_violation("fixed_prefix"));

    TimeSeriesDataset empty;
    CHECK(validate_dataset(empty).has_violation("empty_dataset"));
}

TEST_CASE("class labels in order of first appearance") {
    auto d = dataset(1, {sample("a", "z", {{0.0, {1.0}}}), sample("b", "y", {{0.0, {1.0}}}),
                         sample("c", "z", {{0.0, {1.0}}})});
    CHECK(d.class_labels() == std::vector<std::string>{"z", "y"});
    CHECK(d.class_index() == std::vector<std::size_t>{0, 1, 0});
    CHECK(d.labeled());
}

TEST_CASE("stats of a null-free dataset") {
    std::vector<Sample> samples;
    for (int i = 0; i < 3; ++i) {
        std::vector<std::pair<double, std::vector<Value>>> rows;
        for (int j = 0; j < 5; ++j) rows.push_back({double(j), {double(i + j)}});
        samples.push_back(sample("s" + std::to_string(i), std::nullopt, rows));
    }
    const auto stats = dataset_stats(dataset(1, samples));
    CHECK(stats.n_samples == 3);
    CHECK(stats.total_observations == 15);
    CHECK(stats.null_fraction == std::vector<double>{0.0});
    CHECK(stats.observations_per_sample == std::vector<std::size_t>{5, 5, 5});
}

TEST_CASE("null fraction is nulls over total observations per feature") {
    auto d = dataset(2, {sample("a", std::nullopt, {{0.0, {1.0, 2.0}}, {1.0, {Value{}, 2.0}}}),
                         sample("b", std::nullopt, {{0.5, {1.0, 2.0}}, {2.0, {1.0, 2.0}}})});
    const auto stats = dataset_stats(d);
    CHECK(stats.null_fraction[0] == doctest::Approx(0.25));
    CHECK(stats.null_fraction[1] == 0.0);
    CHECK(stats.time_min == 0.0);
    CHECK(stats.time_max == 2.0);
}

TEST_CASE("single sample time range") {
    auto d = dataset(1, {sample("a", std::nullopt, {{2.5, {1.0}}, {4.0, {1.0}}, {7.25, {1.0}}})});
    const auto stats = dataset_stats(d);
    CHECK(stats.time_min == 2.5);
    CHECK(stats.time_max == 7.25);
}

TEST_CASE("generated oscillator data always validates") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        OscillatorConfig config;
        config.seed = seed;
        config.n_samples = 30;
        config.time_dist = seed % 2 ? TimeDistribution::exponential : TimeDistribution::uniform;
        CHECK(validate_dataset(generate_oscillator_dataset(config)).violations.empty());
    }
}
