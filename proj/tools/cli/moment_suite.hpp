#pragma once

#include <cstddef>
#include <cstdint>

#include <json.hpp>

namespace tsmote::cli {

struct MomentSuiteConfig {
    std::uint64_t seed = 0;
    std::size_t repetitions = 20;
    std::size_t points = 500;           // rows per original slice
    std::size_t synthetic_points = 10000; // per repetition, mean checks
    std::size_t threads = 1;
};

/// Runs the moment checks; result["verdict"] is "pass" or "fail".
nlohmann::json run_moment_suite(const MomentSuiteConfig& config);

} // namespace tsmote::cli
