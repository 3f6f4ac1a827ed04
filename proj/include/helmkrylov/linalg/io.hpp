#pragma once

#include <iosfwd>
#include <string>

#include "helmkrylov/linalg/sparse_matrix.hpp"

namespace hk {

/// Matrix Market coordinate format, `complex general`. Values are written with
/// 17 significant digits so a round trip is exact.
void write_matrix_market(std::ostream& os, const SparseMatrix& a);
void write_matrix_market(const std::string& path, const SparseMatrix& a);
/// Accepts real/complex/integer fields and general/symmetric/hermitian
/// symmetry; symmetric parts are expanded.
SparseMatrix read_matrix_market(std::istream& is);
SparseMatrix read_matrix_market(const std::string& path);

/// Dense matrices (Hessenberg snapshots) in Matrix Market array form.
void write_matrix_market_dense(const std::string& path, const DenseMatrix& a);

/// Two columns `re,im`, one entry per line, with a header line.
void write_vector_csv(const std::string& path, const Vec& v);
Vec read_vector_csv(const std::string& path);

/// Columns interleaved as re_0,im_0,re_1,im_1,... one matrix row per line.
void write_matrix_csv(const std::string& path, const DenseMatrix& a);
DenseMatrix read_matrix_csv(const std::string& path);

/// "%.17g" formatting used by every numeric export.
std::string format_double(double x);

}  // namespace hk
