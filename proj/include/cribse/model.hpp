#ifndef CRIBSE_MODEL_HPP
#define CRIBSE_MODEL_HPP

#include <vector>

#include "cribse/errors.hpp"
#include "cribse/types.hpp"

namespace cribse::model {

/// Per-block blending weights lambda_1..lambda_T with lambda_1 = 1 and
/// lambda_T = 0 (T >= 2); T = 1 is the static case with the single weight 1.
class BlendingSchedule {
 public:
  BlendingSchedule(int T, std::vector<double> lambda);

  int T() const { return T_; }
  double lambda(int t) const;                      // t is 1-based
  const std::vector<double>& weights() const { return lambda_; }

 private:
  int T_;
  std::vector<double> lambda_;
};

/// lambda_t = (T - t) / (T - 1), so the endpoints come out as 1 and 0.
BlendingSchedule linear_schedule(int T);

/// Endpoint mixing vectors plus the schedule blending them.
struct MixingPath {
  CVector a_first, a_last;
  BlendingSchedule schedule;

  MixingPath(CVector first, CVector last, BlendingSchedule sched);

  int dim() const { return static_cast<int>(a_first.size()); }
};

/// lambda_t * a_first + (1 - lambda_t) * a_last; t is 1-based.
CVector mixing_at(const MixingPath& path, int t);

/// Separating vector w = (beta; h) with beta fixed to 1.
struct SeparatingVector {
  CVector h;  // length d-1

  explicit SeparatingVector(CVector h_) : h(std::move(h_)) {}

  int dim() const { return static_cast<int>(h.size()) + 1; }
  CVector full() const;  // (1; h)
};

/// B = (g  -gamma*I_{d-1}) for a = (gamma; g); satisfies B a = 0.
CMatrix blocking_matrix(const CVector& a);

/// Demixing matrix W = [w^H; B] and its closed-form inverse A = (a  Q).
struct DemixingPair {
  CMatrix W, A;
};

/// Builds W and A for one block. Requires w^H a = 1 (ConstraintViolated
/// otherwise) and |gamma| >= 1e-12 (GammaZero otherwise, since Q divides by
/// gamma and det(W) = (-1)^(d-1) gamma^(d-2) vanishes with it).
DemixingPair demixing_pair(const SeparatingVector& w, const CVector& a_t);

/// Free parameters (g1, gT, h) closed under the distortionless constraints:
/// gamma_1 = 1 - h^H g1 and gamma_T = 1 - h^H gT make w^H a_1 = w^H a_T = 1
/// exact, hence w^H a_t = 1 for every t.
struct ConstrainedModel {
  CVector a_first, a_last;
  SeparatingVector w;
};

ConstrainedModel apply_distortionless(const CVector& g1, const CVector& gT,
                                      const CVector& h);

/// Same, assembled into a path with the given schedule.
MixingPath constrained_path(const CVector& g1, const CVector& gT,
                            const CVector& h, BlendingSchedule sched);

/// Block index of sample n: t = ceil(n T / N); both n and t are 1-based.
int block_of_sample(int n, int N, int T);

}  // namespace cribse::model

#endif
