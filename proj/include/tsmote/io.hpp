#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsmote/dataset.hpp"
#include "tsmote/moments.hpp"
#include "tsmote/slicing.hpp"
#include "tsmote/synthesis.hpp"

namespace tsmote {

/// Shortest text that parses back to exactly the same double.
std::string format_double(double value);

std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_escape(const std::string& field);

struct CsvReadOptions {
    std::string class_column = "class";
    std::size_t fixed_prefix_len = 0;
    bool sort_by_time = false;
};

/// Long format: sample_id, time, [class,] feature columns. Header required;
/// an empty feature cell is a null. Rows of one sample may be interleaved
/// with other samples; sample order follows first appearance.
TimeSeriesDataset read_dataset_csv(std::istream& in, const CsvReadOptions& options = {});
TimeSeriesDataset read_dataset_csv(const std::filesystem::path& path,
                                   const CsvReadOptions& options = {});

void write_dataset_csv(std::ostream& out, const TimeSeriesDataset& dataset,
                       const std::string& class_column = "class");

nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const DatasetStats& stats);
nlohmann::json to_json(const MomentReport& report);

nlohmann::json grid_to_json(const SliceGrid& grid);
SliceGrid grid_from_json(const nlohmann::json& j);

/// One row per (sample, slice): sample_id, class, slice_index, grid_time, features.
void write_tensor_csv(std::ostream& out, const ImputedTensor& tensor);

/// Self-describing container with the grid embedded.
nlohmann::json tensor_to_json(const ImputedTensor& tensor, const SliceGrid& grid);
ImputedTensor tensor_from_json(const nlohmann::json& j);

/// sample_id, class, observation_index, time, elapsed, slice_index.
void write_assignment_csv(std::ostream& out, const TimeSeriesDataset& dataset,
                          const SliceAssignment& assignment, const SliceGrid& grid);

/// class, slice_index, grid_time, features; one row per pool vector.
void write_pool_csv(std::ostream& out, const SyntheticPool& pool, const SliceGrid& grid,
                    const std::vector<std::string>& feature_names);

} // namespace tsmote
