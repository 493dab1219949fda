#include "cribse/numerics.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace cribse::numerics {

void require_finite(const CMatrix& M, const char* name) {
  if (!M.allFinite())
    throw NonFiniteEntry(std::string(name) + " contains a non-finite entry");
}

BlockPartition::BlockPartition(CMatrix a, CMatrix b, CMatrix c, CMatrix d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
  if (A.rows() != A.cols() || D.rows() != D.cols())
    throw DimensionMismatch("diagonal blocks must be square");
  if (B.rows() != A.rows() || B.cols() != D.cols() || C.rows() != D.rows() ||
      C.cols() != A.cols())
    throw DimensionMismatch("off-diagonal blocks not conformable");
  require_finite(A, "A");
  require_finite(B, "B");
  require_finite(C, "C");
  require_finite(D, "D");
}

double rcond(const CMatrix& M) {
  if (M.rows() == 0) return 1.0;
  Eigen::JacobiSVD<CMatrix> svd(M);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  if (smax <= 0.0) return 0.0;
  return sv(sv.size() - 1) / smax;
}

CMatrix assemble(const BlockPartition& part) {
  const auto m = part.m(), p = part.p();
  CMatrix F(m + p, m + p);
  F.topLeftCorner(m, m) = part.A;
  F.topRightCorner(m, p) = part.B;
  F.bottomLeftCorner(p, m) = part.C;
  F.bottomRightCorner(p, p) = part.D;
  return F;
}

BlockPartition split(const CMatrix& M, Eigen::Index m) {
  if (M.rows() != M.cols()) throw DimensionMismatch("split needs a square matrix");
  if (m < 0 || m > M.rows()) throw DimensionMismatch("split index out of range");
  const auto p = M.rows() - m;
  return BlockPartition(M.topLeftCorner(m, m), M.topRightCorner(m, p),
                        M.bottomLeftCorner(p, m), M.bottomRightCorner(p, p));
}

CMatrix schur_complement(const BlockPartition& part) {
  if (rcond(part.A) < kSingularThreshold)
    throw SingularBlock("upper-left block is singular");
  // one factorization, then the A^{-1} B product the formula needs
  Eigen::PartialPivLU<CMatrix> lu(part.A);
  return part.D - part.C * lu.solve(part.B);
}

BlockPartition block_inverse(const BlockPartition& part) {
  const CMatrix F = assemble(part);
  if (rcond(F) < kSingularThreshold)
    throw SingularMatrix("assembled matrix is singular");
  const CMatrix Finv = Eigen::PartialPivLU<CMatrix>(F).inverse();
  return split(Finv, part.m());
}

bool hermitian_check(const CMatrix& M, double tol) {
  if (M.rows() != M.cols())
    throw DimensionMismatch("hermitian_check needs a square matrix");
  return (M - M.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

CMatrix inverse(const CMatrix& M) {
  if (M.rows() != M.cols()) throw DimensionMismatch("inverse needs a square matrix");
  if (rcond(M) < kSingularThreshold) throw SingularMatrix("matrix is singular");
  return Eigen::PartialPivLU<CMatrix>(M).inverse();
}

CMatrix solve(const CMatrix& M, const CMatrix& rhs) {
  if (M.rows() != M.cols()) throw DimensionMismatch("solve needs a square matrix");
  if (M.cols() != rhs.rows()) throw DimensionMismatch("rhs rows mismatch");
  if (rcond(M) < kSingularThreshold) throw SingularMatrix("matrix is singular");
  return Eigen::PartialPivLU<CMatrix>(M).solve(rhs);
}

}  // namespace cribse::numerics
