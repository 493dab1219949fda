#include "cribse/model.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace cribse::model {

namespace {
constexpr double kGammaFloor = 1e-12;
constexpr double kEndpointTol = 1e-12;
constexpr double kConstraintTol = 1e-10;
}  // namespace

BlendingSchedule::BlendingSchedule(int T, std::vector<double> lambda)
    : T_(T), lambda_(std::move(lambda)) {
  if (T < 1) throw InvalidBlockCount("block count must be >= 1");
  if (static_cast<int>(lambda_.size()) != T)
    throw InvalidBlockCount("schedule length must equal T");
  for (double l : lambda_) {
    if (!(l >= 0.0 && l <= 1.0))
      throw InvalidBlockCount("every lambda_t must lie in [0,1]");
  }
  if (T >= 2) {
    if (std::abs(lambda_.front() - 1.0) > kEndpointTol ||
        std::abs(lambda_.back()) > kEndpointTol)
      throw InvalidBlockCount("schedule must start at 1 and end at 0");
  } else if (std::abs(lambda_.front() - 1.0) > kEndpointTol) {
    throw InvalidBlockCount("static schedule weight must be 1");
  }
}

double BlendingSchedule::lambda(int t) const {
  if (t < 1 || t > T_) throw BlockOutOfRange("block index out of range");
  return lambda_[static_cast<std::size_t>(t - 1)];
}

BlendingSchedule linear_schedule(int T) {
  if (T < 1) throw InvalidBlockCount("block count must be >= 1");
  std::vector<double> lambda(static_cast<std::size_t>(T));
  if (T == 1) {
    lambda[0] = 1.0;
  } else {
    for (int t = 1; t <= T; ++t)
      lambda[static_cast<std::size_t>(t - 1)] =
          static_cast<double>(T - t) / static_cast<double>(T - 1);
  }
  return BlendingSchedule(T, std::move(lambda));
}

MixingPath::MixingPath(CVector first, CVector last, BlendingSchedule sched)
    : a_first(std::move(first)), a_last(std::move(last)), schedule(std::move(sched)) {
  if (a_first.size() != a_last.size())
    throw DimensionMismatch("endpoint vectors differ in length");
  if (a_first.size() < 2) throw DimensionMismatch("need d >= 2 sensors");
  if (std::abs(a_first(0)) < kGammaFloor || std::abs(a_last(0)) < kGammaFloor)
    throw GammaZero("endpoint mixing vectors need a nonzero first component");
}

CVector mixing_at(const MixingPath& path, int t) {
  const double l = path.schedule.lambda(t);  // throws BlockOutOfRange
  return l * path.a_first + (1.0 - l) * path.a_last;
}

CVector SeparatingVector::full() const {
  CVector w(h.size() + 1);
  w(0) = Complex(1.0, 0.0);
  w.tail(h.size()) = h;
  return w;
}

CMatrix blocking_matrix(const CVector& a) {
  const auto d = a.size();
  if (d < 2) throw DimensionMismatch("need d >= 2");
  const Complex gamma = a(0);
  CMatrix B = CMatrix::Zero(d - 1, d);
  B.col(0) = a.tail(d - 1);
  B.rightCols(d - 1) = -gamma * CMatrix::Identity(d - 1, d - 1);
  return B;
}

DemixingPair demixing_pair(const SeparatingVector& w, const CVector& a_t) {
  const auto d = a_t.size();
  if (w.dim() != d) throw DimensionMismatch("separator and mixing vector disagree on d");
  const Complex gamma = a_t(0);
  if (std::abs(gamma) < kGammaFloor)
    throw GammaZero("gamma_t ~ 0: demixing matrix is singular");
  const CVector wfull = w.full();
  const Complex gain = wfull.dot(a_t);  // w^H a_t
  if (std::abs(gain - 1.0) > kConstraintTol)
    throw ConstraintViolated("w^H a_t must equal 1");

  DemixingPair pair;
  pair.W = CMatrix(d, d);
  pair.W.row(0) = wfull.adjoint();
  pair.W.bottomRows(d - 1) = blocking_matrix(a_t);

  // A = (a_t  Q), Q = [h^H; (g h^H - I)/gamma]
  const CVector g = a_t.tail(d - 1);
  CMatrix Q(d, d - 1);
  Q.row(0) = w.h.adjoint();
  Q.bottomRows(d - 1) =
      (g * w.h.adjoint() - CMatrix::Identity(d - 1, d - 1)) / gamma;
  pair.A = CMatrix(d, d);
  pair.A.col(0) = a_t;
  pair.A.rightCols(d - 1) = Q;
  return pair;
}

ConstrainedModel apply_distortionless(const CVector& g1, const CVector& gT,
                                      const CVector& h) {
  if (g1.size() != gT.size() || g1.size() != h.size())
    throw DimensionMismatch("g1, gT, h must share length d-1");
  const auto d1 = g1.size();
  const Complex gamma1 = 1.0 - h.dot(g1);  // 1 - h^H g1
  const Complex gammaT = 1.0 - h.dot(gT);
  if (std::abs(gamma1) < kGammaFloor || std::abs(gammaT) < kGammaFloor)
    throw DegenerateGamma("derived gamma is degenerate");
  CVector a1(d1 + 1), aT(d1 + 1);
  a1(0) = gamma1;
  a1.tail(d1) = g1;
  aT(0) = gammaT;
  aT.tail(d1) = gT;
  return ConstrainedModel{std::move(a1), std::move(aT), SeparatingVector(h)};
}

MixingPath constrained_path(const CVector& g1, const CVector& gT,
                            const CVector& h, BlendingSchedule sched) {
  ConstrainedModel m = apply_distortionless(g1, gT, h);
  return MixingPath(std::move(m.a_first), std::move(m.a_last), std::move(sched));
}

int block_of_sample(int n, int N, int T) {
  if (n < 1 || n > N) throw BlockOutOfRange("sample index out of range");
  // ceil(n T / N) in integers
  return static_cast<int>((static_cast<long long>(n) * T + N - 1) / N);
}

}  // namespace cribse::model
