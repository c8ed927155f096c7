#pragma once

#include <string>

#include "mgc/matrix.hpp"

namespace mgc {

/// Writes a [0, 1]-valued matrix as binary PGM (P5, 8-bit, row-major,
/// pixel = round(255 * value)).
void write_pgm(const std::string& path, const Matrix& normalized);

/// One matrix row per CSV line, full round-trip precision.
void write_matrix_csv(const std::string& path, const Matrix& m);

Matrix read_matrix_csv(const std::string& path);

} // namespace mgc
