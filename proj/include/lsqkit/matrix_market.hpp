/// @file matrix_market.hpp
/// @brief Matrix Market exchange-format I/O and plain-text vector files.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "lsqkit/linop.hpp"

namespace lsqkit {

/// Read a Matrix Market file into CSR form.
///
/// Supported: coordinate and array formats, real or integer field,
/// general / symmetric / skew-symmetric storage (symmetric entries are
/// expanded). Duplicate coordinate entries are summed. Indices in the file
/// are 1-based; storage is 0-based. Complex and pattern files are rejected.
CsrMatrix read_matrix_market(const std::string& path);

/// Write in coordinate real general form with 17 significant digits, so
/// that read_matrix_market round-trips every entry.
void write_matrix_market(const std::string& path, const CsrMatrix& m);

/// Right-hand-side files: one decimal number per line ('%' comments allowed).
std::vector<double> read_vector_file(const std::string& path);
void write_vector_file(const std::string& path, std::span<const double> v);

}  // namespace lsqkit
