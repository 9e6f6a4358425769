#include "mtreg/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mtreg/errors.hpp"

namespace mtreg::io {

namespace {

[[noreturn]] void malformed(const std::string& origin, std::size_t line, std::size_t col, const std::string& what) {
  fail(ErrorCode::MalformedInput, origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) return std::signbit(v) ? "-0" : "0";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

Matrix parse_csv_matrix(const std::string& text, const std::string& origin, Index expected_cols) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::size_t blank_since = 0;  // first blank line of the current trailing run
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      if (blank_since == 0) blank_since = line_no;
      continue;
    }
    if (blank_since != 0) malformed(origin, blank_since, 1, "blank line inside data");

    std::vector<double> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t stop = line.find(',', start);
      if (stop == std::string::npos) stop = line.size();
      std::size_t a = start, b = stop;
      while (a < b && is_space(line[a])) ++a;
      while (b > a && is_space(line[b - 1])) --b;
      const std::size_t col = a + 1;
      if (a == b) malformed(origin, line_no, col, "empty field");
      const char* first = line.data() + a;
      if (*first == '+') ++first;
      double v = 0.0;
      const auto res = std::from_chars(first, line.data() + b, v);
      if (res.ec != std::errc() || res.ptr != line.data() + b)
        malformed(origin, line_no, col, "not a number: '" + line.substr(a, b - a) + "'");
      if (!std::isfinite(v)) malformed(origin, line_no, col, "non-finite value");
      fields.push_back(v);
      if (stop == line.size()) break;
      start = stop + 1;
    }
    const auto width = static_cast<Index>(fields.size());
    if (expected_cols > 0 && width != expected_cols)
      malformed(origin, line_no, 1, "row has " + std::to_string(width) + " fields, expected " + std::to_string(expected_cols));
    if (!rows.empty() && fields.size() != rows.front().size())
      malformed(origin, line_no, 1, "row has " + std::to_string(width) + " fields, previous rows have " +
                                        std::to_string(rows.front().size()));
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) malformed(origin, 1, 1, "no data rows");
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index r = 0; r < out.rows(); ++r)
    for (Index c = 0; c < out.cols(); ++c) out(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::MalformedInput, path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::InvalidArgument, path.string() + ": cannot write");
  out << text;
}

Matrix read_csv_matrix(const fs::path& path, Index expected_cols) {
  return parse_csv_matrix(read_text(path), path.string(), expected_cols);
}

void write_csv_matrix(const fs::path& path, const Matrix& values, const std::vector<std::string>& header) {
  std::string text;
  if (!header.empty()) {
    for (std::size_t k = 0; k < header.size(); ++k) text += (k ? "," : "") + header[k];
    text += '\n';
  }
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      if (c) text += ',';
      text += format_double(values(r, c));
    }
    text += '\n';
  }
  write_text(path, text);
}

MultiTaskDataset read_dataset(const fs::path& manifest) {
  const std::string origin = manifest.string();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(manifest));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::MalformedInput, origin + ": " + e.what());
  }
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.is_object() || !j.contains(key)) fail(ErrorCode::MalformedInput, origin + ": missing key '" + key + "'");
    return j.at(key);
  };
  for (const auto& [key, _] : j.items()) {
    if (key != "schema_version" && key != "n" && key != "p" && key != "rows" && key != "tasks")
      fail(ErrorCode::MalformedInput, origin + ": unknown key '" + key + "'");
  }
  try {
    if (need("schema_version").get<int>() != 1) fail(ErrorCode::MalformedInput, origin + ": unsupported schema_version");
    const auto n = need("n").get<Index>();
    const auto p = need("p").get<Index>();
    const auto rows = need("rows").get<std::vector<Index>>();
    const auto files = need("tasks").get<std::vector<std::string>>();
    if (n < 1 || p < 1) fail(ErrorCode::MalformedInput, origin + ": n and p must be >= 1");
    if (static_cast<Index>(rows.size()) != n || static_cast<Index>(files.size()) != n)
      fail(ErrorCode::MalformedInput, origin + ": 'rows' and 'tasks' must have n entries");
    std::vector<Task> tasks;
    for (Index i = 0; i < n; ++i) {
      const fs::path file = manifest.parent_path() / files[static_cast<std::size_t>(i)];
      const Matrix raw = read_csv_matrix(file, p + 1);
      if (raw.rows() != rows[static_cast<std::size_t>(i)])
        fail(ErrorCode::MalformedInput, file.string() + ": " + std::to_string(raw.rows()) + " rows, manifest says " +
                                            std::to_string(rows[static_cast<std::size_t>(i)]));
      tasks.push_back({raw.rightCols(p), raw.col(0)});
    }
    return MultiTaskDataset(std::move(tasks));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedInput, origin + ": " + e.what());
  }
}

fs::path write_dataset(const fs::path& dir, const MultiTaskDataset& data) {
  fs::create_directories(dir);
  nlohmann::json j;
  j["schema_version"] = 1;
  j["n"] = data.num_tasks();
  j["p"] = data.num_features();
  std::vector<Index> rows;
  std::vector<std::string> files;
  for (Index i = 0; i < data.num_tasks(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "task_%03ld.csv", static_cast<long>(i));
    const Task& t = data.task(i);
    Matrix raw(t.design.rows(), data.num_features() + 1);
    raw.col(0) = t.response;
    raw.rightCols(data.num_features()) = t.design;
    write_csv_matrix(dir / name, raw);
    rows.push_back(t.design.rows());
    files.emplace_back(name);
  }
  j["rows"] = rows;
  j["tasks"] = files;
  const fs::path manifest = dir / "manifest.json";
  write_text(manifest, j.dump(2) + "\n");
  return manifest;
}

}  // namespace mtreg::io
