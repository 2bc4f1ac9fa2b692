#pragma once

#include <string>
#include <vector>

#include "kgprop/grid.hpp"

namespace kgprop {

/// <dir>/<name>.bin: row-major (Nt+1) × N little-endian complex128 (re, im).
/// <dir>/<name>.json: {"shape", "dt", "dx", "T_min", "L", "field"}.
void write_field(const std::string& dir, const std::string& name, const SpatialGrid& g,
                 const TimeGrid& tg, const CRowMat& values);

/// Reads back a field written by write_field; throws ShapeError on size mismatch.
CRowMat read_field(const std::string& dir, const std::string& name);

/// Two-column CSV with a header line, '.' decimals and '\n' newlines.
void write_csv(const std::string& path, const std::string& xname, const std::string& yname,
               const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kgprop
