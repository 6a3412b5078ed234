#pragma once

#include <cmath>
#include <vector>

#include "floquet_pt/floquet.hpp"

namespace floquet_pt {

/// Amplitudes on the sz basis. The norm is not conserved: the gain/loss term
/// feeds one component and drains the other.
struct StateVector {
  Complex a;
  Complex b;

  double norm_squared() const { return std::norm(a) + std::norm(b); }
  double norm() const { return std::sqrt(norm_squared()); }
};

inline StateVector apply(const Mat2& m, const StateVector& s) {
  return {m.e00() * s.a + m.e01() * s.b, m.e10() * s.a + m.e11() * s.b};
}

/// Stroboscopic record at t = 0, T, 2T, ... If the norm exceeds the overflow
/// cap the trajectory stops early with `truncated` set (deep broken phase).
struct Trajectory {
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<StateVector> states;
  bool truncated = false;
};

inline constexpr double kNormOverflowCap = 1e150;

/// Brute-force propagation over m periods. Each plateau is advanced with
/// repeated series-exponential sub-steps; the closed-form trigonometric
/// propagator is deliberately never called here, so this path shares no code
/// with what it verifies.
inline Trajectory propagate_periods(const DriveProtocol& p, const StateVector& psi0,
                                    int periods, int substeps_per_segment) {
  validate(p);
  if (periods < 1) throw ValidationError("propagate_periods: need at least 1 period");
  if (substeps_per_segment < 4)
    throw ValidationError("propagate_periods: need at least 4 substeps per segment");

  auto substep_propagator = [&](const SegmentParams& s) {
    const double dt = s.duration / substeps_per_segment;
    return expm_series((-kImag * dt) * segment_hamiltonian(s));
  };
  const Mat2 g0 = substep_propagator(p.seg0);
  const Mat2 g1 = substep_propagator(p.seg1);
  const double period = p.seg0.duration + p.seg1.duration;

  Trajectory traj;
  traj.times.reserve(periods + 1);
  traj.norms.reserve(periods + 1);
  traj.states.reserve(periods + 1);
  StateVector psi = psi0;
  traj.times.push_back(0.0);
  traj.norms.push_back(psi.norm());
  traj.states.push_back(psi);

  for (int m = 1; m <= periods; ++m) {
    for (int k = 0; k < substeps_per_segment; ++k) psi = apply(g0, psi);
    for (int k = 0; k < substeps_per_segment; ++k) psi = apply(g1, psi);
    const double nrm = psi.norm();
    if (!(nrm < kNormOverflowCap)) {
      traj.truncated = true;
      break;
    }
    traj.times.push_back(m * period);
    traj.norms.push_back(nrm);
    traj.states.push_back(psi);
  }
  return traj;
}

/// Matrix power by repeated squaring.
inline Mat2 mat_pow(Mat2 base, int exponent) {
  Mat2 result = Mat2::identity();
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    base = base * base;
    exponent >>= 1;
  }
  return result;
}

/// Maximum relative deviation between the brute-force state after m periods
/// and (U_eff)^m psi0, over a fixed basis of initial states. Exercises the
/// agreement of the two exponentiation routes end to end.
inline double stroboscopic_check(const DriveProtocol& p, int periods,
                                 int substeps_per_segment = 8) {
  if (periods < 1) throw ValidationError("stroboscopic_check: need at least 1 period");
  const Mat2 u_pow = mat_pow(monodromy(p).u_eff, periods);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const StateVector basis[4] = {
      {1.0, 0.0},
      {0.0, 1.0},
      {inv_sqrt2, inv_sqrt2},
      {inv_sqrt2, Complex{0.0, inv_sqrt2}},
  };
  double worst = 0.0;
  for (const StateVector& psi0 : basis) {
    const Trajectory traj = propagate_periods(p, psi0, periods, substeps_per_segment);
    if (traj.truncated || static_cast<int>(traj.states.size()) != periods + 1)
      throw PrecisionError("stroboscopic_check: trajectory truncated by norm overflow");
    const StateVector brute = traj.states.back();
    const StateVector ref = apply(u_pow, psi0);
    const StateVector diff{brute.a - ref.a, brute.b - ref.b};
    worst = std::max(worst, diff.norm() / ref.norm());
  }
  return worst;
}

/// Least-squares slope of log(norm^2) against time over the tail of the
/// trajectory, i.e. the intensity growth rate. Converges to 2|Im E+| in the
/// broken phases and to zero in the symmetric phase. The discarded head
/// absorbs the transient produced by non-orthogonal eigenvectors.
inline double growth_rate(const Trajectory& traj, int discard) {
  const int n = static_cast<int>(traj.times.size());
  if (discard < 0) throw ValidationError("growth_rate: discard must be >= 0");
  if (n <= discard + 10)
    throw ValidationError("growth_rate: trajectory too short for the requested discard");

  double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
  int count = 0;
  bool all_equal = true;
  for (int i = discard; i < n; ++i) {
    const double t = traj.times[i];
    const double y = std::log(traj.norms[i]);
    if (traj.norms[i] != traj.norms[discard]) all_equal = false;
    sum_t += t;
    sum_y += y;
    sum_tt += t * t;
    sum_ty += t * y;
    ++count;
  }
  if (all_equal) return 0.0;
  const double denom = count * sum_tt - sum_t * sum_t;
  if (denom == 0.0) return 0.0;
  const double slope = (count * sum_ty - sum_t * sum_y) / denom;
  return 2.0 * slope;
}

}  // namespace floquet_pt
