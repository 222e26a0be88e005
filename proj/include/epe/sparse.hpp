#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "epe/errors.hpp"

namespace epe {

/// Compressed sparse row storage; column indices are sorted and unique per row
/// once compressed.
using CsrMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplets = std::vector<Eigen::Triplet<double, int>>;

inline CsrMatrix csr_from_triplets(int rows, int cols, const Triplets& t) {
  CsrMatrix A(rows, cols);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

inline double max_abs(const CsrMatrix& A) {
  double m = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (CsrMatrix::InnerIterator it(A, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

/// max |A - A^T| / max |A|, or 0 for the zero matrix.
inline double symmetry_defect(const CsrMatrix& A) {
  if (A.rows() != A.cols()) return 1.0;
  const double scale = max_abs(A);
  if (scale == 0.0) return 0.0;
  const CsrMatrix At = A.transpose();
  const CsrMatrix D = A - At;
  return max_abs(D) / scale;
}

inline bool is_structurally_valid(const CsrMatrix& A) {
  if (!A.isCompressed()) return false;
  const int* outer = A.outerIndexPtr();
  const int* inner = A.innerIndexPtr();
  if (outer[0] != 0) return false;
  for (int r = 0; r < A.rows(); ++r) {
    if (outer[r + 1] < outer[r]) return false;
    for (int k = outer[r]; k < outer[r + 1]; ++k) {
      if (inner[k] < 0 || inner[k] >= A.cols()) return false;
      if (k > outer[r] && inner[k] <= inner[k - 1]) return false;
    }
  }
  return true;
}

/// Debug dump as `row col value` lines (0-based).
inline void write_coordinate_text(const CsrMatrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matrix dump '" + path + "'");
  out.precision(17);
  for (int r = 0; r < A.outerSize(); ++r)
    for (CsrMatrix::InnerIterator it(A, r); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace epe
