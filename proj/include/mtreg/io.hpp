#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mtreg/model.hpp"

namespace mtreg::io {

namespace fs = std::filesystem;

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Headerless numeric CSV. Every row must have the same field count, and
/// `expected_cols` (when positive) fixes that count. Malformed input throws
/// MalformedInput with "path:line:column: ..." in the message.
Matrix read_csv_matrix(const fs::path& path, Index expected_cols = -1);

/// Same parser over in-memory text; `origin` names the source in diagnostics.
Matrix parse_csv_matrix(const std::string& text, const std::string& origin, Index expected_cols = -1);

/// Writes rows with shortest round-trip numbers. A non-empty header becomes the first line.
void write_csv_matrix(const fs::path& path, const Matrix& values, const std::vector<std::string>& header = {});

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

// Dataset layout: a JSON manifest
//   {"schema_version": 1, "n": N, "p": P, "rows": [m_1, ...], "tasks": ["task_000.csv", ...]}
// with task paths relative to the manifest, each CSV holding m_i rows of
// (y, x_1, ..., x_p).

MultiTaskDataset read_dataset(const fs::path& manifest);

/// Writes manifest.json and task_XXX.csv into `dir`; returns the manifest path.
fs::path write_dataset(const fs::path& dir, const MultiTaskDataset& data);

}  // namespace mtreg::io
