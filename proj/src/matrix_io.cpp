#include "rmcds/matrix_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace rmcds {

std::string format_full(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_full(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(field, &used);
      } catch (const std::exception&) {
        throw IoError("bad number '" + field + "' in " + path);
      }
      if (used != field.size() || !std::isfinite(v))
        throw IoError("bad number '" + field + "' in " + path);
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError("ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("empty matrix file: " + path);
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_mask(const std::string& path, const SamplingMask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "n " << mask.n << '\n';
  for (const auto& [i, j] : mask.observed.pairs()) out << i << ' ' << j << '\n';
  if (!out) throw IoError("write failed: " + path);
}

SamplingMask read_mask(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string tag;
  Index n = 0;
  if (!(in >> tag >> n) || tag != "n" || n < 1)
    throw IoError("mask file must start with 'n <n>': " + path);
  std::vector<IndexSet::Pair> pairs;
  std::int64_t i = 0, j = 0;
  while (in >> i >> j) {
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw IoError("mask index out of range in " + path);
    pairs.emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
  }
  if (!in.eof()) throw IoError("malformed mask entry in " + path);
  const std::size_t raw_count = pairs.size();
  IndexSet set = IndexSet::from_pairs(std::move(pairs));
  if (static_cast<std::size_t>(set.size()) != raw_count)
    throw IoError("duplicate mask entries in " + path);
  return SamplingMask{n, std::move(set)};
}

}  // namespace rmcds
