#ifndef CRIBSE_NUMERICS_HPP
#define CRIBSE_NUMERICS_HPP

#include "cribse/errors.hpp"
#include "cribse/types.hpp"

namespace cribse::numerics {

/// Reciprocal condition threshold below which a matrix is treated as
/// singular. Separates analytically singular Schur complements from
/// round-off.
inline constexpr double kSingularThreshold = 1e-12;

/// Throws NonFiniteEntry if M contains a NaN or Inf.
void require_finite(const CMatrix& M, const char* name);

/// 2x2 partition of a square matrix:
///   [ A  B ]   A: m x m,  B: m x p
///   [ C  D ]   C: p x m,  D: p x p
/// Construction checks conformability and entry finiteness.
struct BlockPartition {
  CMatrix A, B, C, D;

  BlockPartition(CMatrix a, CMatrix b, CMatrix c, CMatrix d);

  Eigen::Index m() const { return A.rows(); }
  Eigen::Index p() const { return D.rows(); }
};

/// Reciprocal 2-norm condition number, sigma_min / sigma_max (0 for the
/// zero matrix).
double rcond(const CMatrix& M);

/// Stacks the four blocks into one (m+p) x (m+p) matrix.
CMatrix assemble(const BlockPartition& part);

/// Splits a square matrix at row/column m.
BlockPartition split(const CMatrix& M, Eigen::Index m);

/// D - C A^{-1} B. Throws SingularBlock when rcond(A) is below the
/// singularity threshold.
CMatrix schur_complement(const BlockPartition& part);

/// Blockwise inverse: returns [I J; K L] with L = (D - C A^{-1} B)^{-1}.
/// Throws SingularMatrix when the assembled matrix is singular.
BlockPartition block_inverse(const BlockPartition& part);

/// True iff max |M - M^H| entry <= tol. Throws DimensionMismatch for
/// non-square input.
bool hermitian_check(const CMatrix& M, double tol);

/// Dense inverse guarded by the singularity threshold.
CMatrix inverse(const CMatrix& M);

/// Pivoted-LU solve of M X = RHS guarded by the singularity threshold.
CMatrix solve(const CMatrix& M, const CMatrix& rhs);

}  // namespace cribse::numerics

#endif
