#pragma once

#include <stdexcept>
#include <string>

#include "rmcds/mask.hpp"
#include "rmcds/types.hpp"

namespace rmcds {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// CSV, one row per line, comma separated, 17 significant digits, LF endings.
void write_matrix_csv(const std::string& path, const Matrix& m);

/// Reads a rectangular CSV matrix; rejects non-finite or ragged input.
Matrix read_matrix_csv(const std::string& path);

/// Mask file: first line "n <n>", then one "i j" pair per line, 0-based, LF.
void write_mask(const std::string& path, const SamplingMask& mask);

/// Rejects out-of-range indices and duplicate pairs.
SamplingMask read_mask(const std::string& path);

/// %.17g formatting shared by all CSV emitters.
std::string format_full(double value);

}  // namespace rmcds
