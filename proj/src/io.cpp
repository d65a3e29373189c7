#include "tsmote/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "tsmote/error.hpp"

namespace tsmote {

using nlohmann::json;

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field");
    fields.push_back(std::move(field));
    return fields;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& text) {
    std::string t = trim(text);
    if (!t.empty() && t.front() == '+') t.erase(0, 1);
    double value = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) return std::nullopt;
    return value;
}

std::string where(std::size_t line_no) {
    return "line " + std::to_string(line_no) + ": ";
}

} // namespace

TimeSeriesDataset read_dataset_csv(std::istream& in, const CsvReadOptions& options) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!trim(line).empty()) return true;
        }
        return false;
    };

    if (!next_line()) throw ParseError("missing header: input is empty");
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);
    const auto col = [&](const std::string& name) -> std::optional<std::size_t> {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto id_col = col("sample_id");
    const auto time_col = col("time");
    if (!id_col || !time_col) throw ParseError("missing header: expected columns 'sample_id' and 'time'");
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    const std::size_t class_col = options.class_column.empty() ? none : col(options.class_column).value_or(none);

    TimeSeriesDataset dataset;
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == *id_col || c == *time_col || c == class_col) continue;
        feature_cols.push_back(c);
        dataset.feature_names.push_back(header[c]);
    }
    dataset.n_features = feature_cols.size();
    if (options.fixed_prefix_len > dataset.n_features) {
        throw ConfigError("fixed feature count exceeds the number of feature columns");
    }

    std::map<std::string, std::size_t> index;
    while (next_line()) {
        const auto fields = [&] {
            try {
                return split_csv_line(line);
            } catch (const ParseError& e) {
                throw ParseError(where(line_no) + e.what());
            }
        }();
        if (fields.size() != header.size()) {
            throw ParseError(where(line_no) + "expected " + std::to_string(header.size()) + " fields, found " +
                             std::to_string(fields.size()));
        }
        const std::string id = trim(fields[*id_col]);
        if (id.empty()) throw ParseError(where(line_no) + "empty sample_id");
        const auto time = parse_number(fields[*time_col]);
        if (!time) throw ParseError(where(line_no) + "cannot parse time '" + fields[*time_col] + "'");

        std::optional<std::string> label;
        if (class_col != none) {
            const std::string c = trim(fields[class_col]);
            if (!c.empty()) label = c;
        }
        Observation obs;
        obs.time = *time;
        for (std::size_t c : feature_cols) {
            if (trim(fields[c]).empty()) {
                obs.values.emplace_back();
                continue;
            }
            const auto v = parse_number(fields[c]);
            if (!v) throw ParseError(where(line_no) + "cannot parse value '" + fields[c] + "' in column '" + header[c] + "'");
            obs.values.emplace_back(*v);
        }

        auto [it, inserted] = index.try_emplace(id, dataset.samples.size());
        if (inserted) {
            Sample sample;
            sample.id = id;
            sample.class_label = label;
            sample.fixed_prefix_len = options.fixed_prefix_len;
            dataset.samples.push_back(std::move(sample));
        }
        Sample& sample = dataset.samples[it->second];
        if (sample.class_label != label) {
            throw ParseError(where(line_no) + "sample '" + id + "' has inconsistent class labels");
        }
        sample.observations.push_back(std::move(obs));
    }
    if (options.sort_by_time) sort_observations(dataset);
    return dataset;
}

TimeSeriesDataset read_dataset_csv(const std::filesystem::path& path, const CsvReadOptions& options) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    return read_dataset_csv(in, options);
}

void write_dataset_csv(std::ostream& out, const TimeSeriesDataset& dataset, const std::string& class_column) {
    const bool any_label = std::any_of(dataset.samples.begin(), dataset.samples.end(),
                                       [](const Sample& s) { return s.class_label.has_value(); });
    out << "sample_id,time";
    if (any_label) out << ',' << csv_escape(class_column);
    for (std::size_t k = 0; k < dataset.n_features; ++k) {
        out << ',' << csv_escape(k < dataset.feature_names.size() ? dataset.feature_names[k] : "f_" + std::to_string(k));
    }
    out << '\n';
    for (const auto& sample : dataset.samples) {
        for (const auto& obs : sample.observations) {
            out << csv_escape(sample.id) << ',' << format_double(obs.time);
            if (any_label) out << ',' << csv_escape(sample.class_label.value_or(""));
            for (const auto& v : obs.values) {
                out << ',';
                if (v) out << format_double(*v);
            }
            out << '\n';
        }
    }
}

namespace {

json issue_json(const ValidationIssue& issue) {
    json j = {{"kind", issue.kind}, {"sample_id", issue.sample_id}, {"message", issue.message}};
    j["observation"] = issue.observation ? json(*issue.observation) : json(nullptr);
    return j;
}

json vector_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename T>
T field(const json& j, const char* name) {
    if (!j.contains(name)) throw ParseError(std::string("missing field '") + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed field '") + name + "': " + e.what());
    }
}

} // namespace

json to_json(const ValidationReport& report) {
    json j = {{"ok", report.ok()}, {"violations", json::array()}, {"warnings", json::array()}};
    for (const auto& v : report.violations) j["violations"].push_back(issue_json(v));
    for (const auto& w : report.warnings) j["warnings"].push_back(issue_json(w));
    return j;
}

json to_json(const DatasetStats& stats) {
    return {{"n_samples", stats.n_samples},
            {"n_features", stats.n_features},
            {"total_observations", stats.total_observations},
            {"observations_per_sample", stats.observations_per_sample},
            {"null_fraction", stats.null_fraction},
            {"time_min", stats.time_min},
            {"time_max", stats.time_max}};
}

json to_json(const MomentReport& report) {
    json j = {{"mean_original", vector_json(report.mean_original)},
              {"mean_synthetic", vector_json(report.mean_synthetic)},
              {"mean_error", vector_json(report.mean_error)},
              {"mean_error_se", vector_json(report.mean_error_se)},
              {"cov_original", matrix_json(report.cov_original)},
              {"cov_synthetic", matrix_json(report.cov_synthetic)},
              {"cov_synthetic_se", matrix_json(report.cov_synthetic_se)},
              {"cov_ratio", matrix_json(report.cov_ratio)}};
    j["theoretical_factor"] = report.theoretical_factor ? json(*report.theoretical_factor) : json(nullptr);
    return j;
}

json grid_to_json(const SliceGrid& grid) {
    return {{"n_slices", grid.n_slices},
            {"boundaries", grid.boundaries},
            {"grid_times", grid.grid_times},
            {"policy", to_string(grid.policy)},
            {"t_min", grid.bounds.t_min},
            {"t_max", grid.bounds.t_max},
            {"occupancy", grid.occupancy}};
}

SliceGrid grid_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("grid JSON must be an object");
    SliceGrid grid;
    grid.n_slices = field<std::size_t>(j, "n_slices");
    grid.boundaries = field<std::vector<double>>(j, "boundaries");
    grid.grid_times = field<std::vector<double>>(j, "grid_times");
    grid.bounds.t_min = field<double>(j, "t_min");
    grid.bounds.t_max = field<double>(j, "t_max");
    try {
        grid.policy = parse_grid_time_policy(field<std::string>(j, "policy"));
    } catch (const ConfigError& e) {
        throw ParseError(e.what());
    }
    if (j.contains("occupancy")) grid.occupancy = field<std::vector<std::size_t>>(j, "occupancy");

    if (grid.n_slices < 1 || grid.boundaries.size() != grid.n_slices + 1 || grid.grid_times.size() != grid.n_slices) {
        throw ParseError("grid JSON has inconsistent slice counts");
    }
    if (grid.boundaries.front() != 0.0) throw ParseError("grid boundaries must start at 0");
    for (std::size_t i = 0; i < grid.n_slices; ++i) {
        if (!(grid.boundaries[i + 1] > grid.boundaries[i])) throw ParseError("grid boundaries must be strictly increasing");
    }
    if (!(grid.bounds.t_max > grid.bounds.t_min)) throw ParseError("grid t_max must exceed t_min");
    if (!grid.occupancy.empty() && grid.occupancy.size() != grid.n_slices) throw ParseError("grid occupancy has the wrong length");
    return grid;
}

void write_tensor_csv(std::ostream& out, const ImputedTensor& tensor) {
    out << "sample_id,class,slice_index,grid_time";
    for (const auto& name : tensor.feature_names) out << ',' << csv_escape(name);
    out << '\n';
    for (std::size_t i = 0; i < tensor.n_samples(); ++i) {
        const std::string id = csv_escape(tensor.sample_ids[i]);
        const std::string label = csv_escape(tensor.class_labels[i].value_or(""));
        for (std::size_t s = 0; s < tensor.n_slices(); ++s) {
            out << id << ',' << label << ',' << s << ',' << format_double(tensor.grid_times[s]);
            for (std::size_t k = 0; k < tensor.n_features; ++k) out << ',' << format_double(tensor.at(i, s, k));
            out << '\n';
        }
    }
}

json tensor_to_json(const ImputedTensor& tensor, const SliceGrid& grid) {
    json labels = json::array();
    for (const auto& l : tensor.class_labels) labels.push_back(l ? json(*l) : json(nullptr));
    return {{"grid", grid_to_json(grid)},
            {"sample_ids", tensor.sample_ids},
            {"class_labels", labels},
            {"feature_names", tensor.feature_names},
            {"n_features", tensor.n_features},
            {"fixed_prefix_len", tensor.fixed_prefix_len},
            {"grid_times", tensor.grid_times},
            {"shape", {tensor.n_samples(), tensor.n_slices(), tensor.n_features}},
            {"data", tensor.data}};
}

ImputedTensor tensor_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("tensor JSON must be an object");
    ImputedTensor tensor;
    tensor.sample_ids = field<std::vector<std::string>>(j, "sample_ids");
    tensor.feature_names = field<std::vector<std::string>>(j, "feature_names");
    tensor.n_features = field<std::size_t>(j, "n_features");
    tensor.fixed_prefix_len = field<std::size_t>(j, "fixed_prefix_len");
    tensor.grid_times = field<std::vector<double>>(j, "grid_times");
    tensor.data = field<std::vector<double>>(j, "data");
    const json labels = field<json>(j, "class_labels");
    if (!labels.is_array()) throw ParseError("class_labels must be an array");
    for (const auto& l : labels) {
        if (l.is_null()) tensor.class_labels.emplace_back();
        else if (l.is_string()) tensor.class_labels.emplace_back(l.get<std::string>());
        else throw ParseError("class labels must be strings or null");
    }
    if (tensor.class_labels.size() != tensor.sample_ids.size() ||
        tensor.data.size() != tensor.n_samples() * tensor.n_slices() * tensor.n_features) {
        throw ParseError("tensor JSON has inconsistent dimensions");
    }
    return tensor;
}

void write_assignment_csv(std::ostream& out, const TimeSeriesDataset& dataset, const SliceAssignment& assignment,
                          const SliceGrid& grid) {
    out << "sample_id,class,observation_index,time,elapsed,slice_index\n";
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const auto& sample = dataset.samples[i];
        const std::string id = csv_escape(sample.id);
        const std::string label = csv_escape(sample.class_label.value_or(""));
        for (std::size_t mu = 0; mu < sample.observations.size(); ++mu) {
            const double t = sample.observations[mu].time;
            out << id << ',' << label << ',' << mu << ',' << format_double(t) << ','
                << format_double(t - grid.bounds.t_min) << ',' << assignment[i][mu] << '\n';
        }
    }
}

void write_pool_csv(std::ostream& out, const SyntheticPool& pool, const SliceGrid& grid,
                    const std::vector<std::string>& feature_names) {
    out << "class,slice_index,grid_time";
    for (const auto& name : feature_names) out << ',' << csv_escape(name);
    out << '\n';
    const auto times = grid.absolute_grid_times();
    for (std::size_t c = 0; c < pool.classes.size(); ++c) {
        for (std::size_t s = 0; s < pool.n_slices; ++s) {
            for (const auto& v : pool.cell(c, s).vectors()) {
                out << csv_escape(pool.classes[c]) << ',' << s << ',' << format_double(times[s]);
                for (double x : v) out << ',' << format_double(x);
                out << '\n';
            }
        }
    }
}

} // namespace tsmote
