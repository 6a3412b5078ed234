#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "floquet_pt/drive.hpp"

namespace floquet_pt {

inline constexpr double kDefaultEpTol = 1e-9;

/// One-period evolution operator and the scalar that classifies the phase:
/// Pi = Re(tr U_eff)/2. The trace is provably real and det U_eff = 1, so the
/// imaginary residual is kept as a diagnostic of the algebra only.
struct MonodromyResult {
  Mat2 u_eff;
  double pi_value = 0.0;
  double trace_imag_residual = 0.0;
};

enum class Phase { PTSymmetric, BrokenN0, BrokenN1, ExceptionalPoint };

inline const char* phase_name(Phase p) {
  switch (p) {
    case Phase::PTSymmetric: return "PTSymmetric";
    case Phase::BrokenN0: return "BrokenN0";
    case Phase::BrokenN1: return "BrokenN1";
    case Phase::ExceptionalPoint: return "ExceptionalPoint";
  }
  return "?";
}

/// Four-way phase classification. n is the branch index of the effective
/// Hamiltonian (offset n*omega/2); margin = |Pi| - 1, positive when broken.
struct PhaseLabel {
  Phase phase = Phase::PTSymmetric;
  int n = 0;
  double margin = 0.0;
};

/// Principal-branch quasi-energies E+- = +-h + n*omega/2. The full Floquet
/// ladder repeats these with period omega (E +- l*omega, integer l); only the
/// principal branch is represented.
struct QuasiEnergies {
  Complex e_plus;
  Complex e_minus;
  Complex h_value;
  PhaseLabel label;
};

/// Static-form effective Hamiltonian parameters,
///   H_eff = (J/2) sx + i (Gy/2) sy + i (Gz/2) sz + (n w / 2) I.
/// Extraction divides by sinc(hT); near hT = pi that is singular and the
/// result is flagged not well conditioned instead of extrapolated.
struct EffectiveHamiltonian {
  double j = 0.0;
  double gamma_y = 0.0;
  double gamma_z = 0.0;
  int n = 0;
  bool well_conditioned = true;
};

/// Direct closed form of the phase function:
///   Pi = cos(h1 T1) cos(h0 T0)
///      + (g1 g0 - d1 d0) T1 T0 sinc(h1 T1) sinc(h0 T0) / 4,
/// evaluated through the even kernels of q_j = (h_j T_j)^2 so no complex
/// square root ever appears.
inline double pi_closed_form(const DriveProtocol& p) {
  const double q0 = spectrum(p.seg0).h_squared * p.seg0.duration * p.seg0.duration;
  const double q1 = spectrum(p.seg1).h_squared * p.seg1.duration * p.seg1.duration;
  const double second = 0.25 * (p.seg1.gamma * p.seg0.gamma - p.seg1.delta * p.seg0.delta) *
                        p.seg1.duration * p.seg0.duration * sinc_even(q1) * sinc_even(q0);
  return cos_even(q1) * cos_even(q0) + second;
}

/// U_eff(T) = U1(T1) U0(T0), with Pi cross-checked against the closed form.
/// A mismatch between the two routes (or a complex trace) is an internal
/// algebra failure, never a property of the input.
inline MonodromyResult monodromy(const DriveProtocol& p) {
  MonodromyResult r;
  r.u_eff = segment_propagator(p.seg1) * segment_propagator(p.seg0);
  const Complex tr = trace(r.u_eff);
  r.pi_value = 0.5 * tr.real();
  r.trace_imag_residual = std::abs(0.5 * tr.imag());
  if (r.trace_imag_residual >= 1e-10)
    throw InternalError("monodromy: trace acquired an imaginary part " +
                        std::to_string(r.trace_imag_residual));
  const double pi_direct = pi_closed_form(p);
  const double tol = 1e-11 * std::max(1.0, std::abs(pi_direct));
  if (std::abs(pi_direct - r.pi_value) > tol)
    throw InternalError("monodromy: trace and closed-form Pi disagree");
  return r;
}

inline PhaseLabel classify(double pi_value, double ep_tol = kDefaultEpTol) {
  if (!std::isfinite(pi_value)) throw ValidationError("classify: non-finite Pi");
  if (!(ep_tol > 0.0)) throw ValidationError("classify: ep_tol must be > 0");
  PhaseLabel label;
  label.margin = std::abs(pi_value) - 1.0;
  if (pi_value > 1.0 + ep_tol) {
    label.phase = Phase::BrokenN0;
    label.n = 0;
  } else if (pi_value < -1.0 - ep_tol) {
    label.phase = Phase::BrokenN1;
    label.n = 1;
  } else if (std::abs(label.margin) <= ep_tol) {
    label.phase = Phase::ExceptionalPoint;
    label.n = pi_value > 0.0 ? 0 : 1;
  } else {
    label.phase = Phase::PTSymmetric;
    label.n = 0;
  }
  return label;
}

/// Quasi-energies from Pi and the driving frequency. In the symmetric phase
/// h = arccos(Pi)/T lies in [0, omega/2]; in the broken phases h is purely
/// imaginary and the pair acquires the n*omega/2 offset. Canonical ordering
/// puts Im(e_plus) >= 0.
inline QuasiEnergies quasi_energies(double pi_value, double omega,
                                    double ep_tol = kDefaultEpTol) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw ValidationError("quasi_energies: omega must be positive and finite");
  QuasiEnergies qe;
  qe.label = classify(pi_value, ep_tol);
  const double period = 2.0 * std::numbers::pi / omega;
  switch (qe.label.phase) {
    case Phase::PTSymmetric: {
      const double h = std::acos(std::clamp(pi_value, -1.0, 1.0)) / period;
      qe.h_value = Complex{h, 0.0};
      qe.e_plus = Complex{h, 0.0};
      qe.e_minus = Complex{-h, 0.0};
      break;
    }
    case Phase::BrokenN0: {
      const double im_h = std::acosh(pi_value) / period;
      qe.h_value = Complex{0.0, im_h};
      qe.e_plus = Complex{0.0, im_h};
      qe.e_minus = Complex{0.0, -im_h};
      break;
    }
    case Phase::BrokenN1: {
      const double im_h = std::acosh(-pi_value) / period;
      qe.h_value = Complex{0.0, im_h};
      qe.e_plus = Complex{0.5 * omega, im_h};
      qe.e_minus = Complex{0.5 * omega, -im_h};
      break;
    }
    case Phase::ExceptionalPoint: {
      qe.h_value = Complex{0.0, 0.0};
      const double e = 0.5 * qe.label.n * omega;
      qe.e_plus = Complex{e, 0.0};
      qe.e_minus = Complex{e, 0.0};
      break;
    }
  }
  return qe;
}

namespace detail {
/// Signed (hT)^2 for the branch picked by `label`: positive arccos^2 in the
/// symmetric phase, negative arccosh^2 in the broken phases. Feeding this to
/// the even kernels keeps every extracted coupling real.
inline double h_t_squared_signed(double pi_value, const PhaseLabel& label) {
  switch (label.phase) {
    case Phase::PTSymmetric: {
      const double a = std::acos(std::clamp(pi_value, -1.0, 1.0));
      return a * a;
    }
    case Phase::BrokenN0: {
      const double a = std::acosh(pi_value);
      return -a * a;
    }
    case Phase::BrokenN1: {
      const double a = std::acosh(-pi_value);
      return -a * a;
    }
    case Phase::ExceptionalPoint:
      return 0.0;
  }
  return 0.0;
}
}  // namespace detail

inline constexpr double kSincConditionFloor = 1e-6;

/// Coefficient matching between the product monodromy and the static form:
///   J  = (-1)^n (d0 T0 c1 s0 + d1 T1 c0 s1) / (T sinc(hT))
///   Gy = (-1)^n (d0 g1 - d1 g0) T0 T1 s1 s0 / (2 T sinc(hT))
///   Gz = (-1)^n (g0 T0 c1 s0 + g1 T1 c0 s1) / (T sinc(hT))
/// with c_j = cos(h_j T_j), s_j = sinc(h_j T_j).
inline EffectiveHamiltonian effective_hamiltonian(const DriveProtocol& p,
                                                  double ep_tol = kDefaultEpTol) {
  const double pi_value = pi_closed_form(p);
  const PhaseLabel label = classify(pi_value, ep_tol);
  const double period = p.seg0.duration + p.seg1.duration;

  const double q0 = spectrum(p.seg0).h_squared * p.seg0.duration * p.seg0.duration;
  const double q1 = spectrum(p.seg1).h_squared * p.seg1.duration * p.seg1.duration;
  const double c0 = cos_even(q0), c1 = cos_even(q1);
  const double s0 = sinc_even(q0), s1 = sinc_even(q1);

  const double sinc_ht = sinc_even(detail::h_t_squared_signed(pi_value, label));

  EffectiveHamiltonian eff;
  eff.n = label.n;
  eff.well_conditioned = std::abs(sinc_ht) >= kSincConditionFloor;

  const double sign = label.n == 0 ? 1.0 : -1.0;
  const double pref = sign / (period * sinc_ht);
  eff.j = pref * (p.seg0.delta * p.seg0.duration * c1 * s0 +
                  p.seg1.delta * p.seg1.duration * c0 * s1);
  eff.gamma_y = 0.5 * pref * (p.seg0.delta * p.seg1.gamma - p.seg1.delta * p.seg0.gamma) *
                p.seg0.duration * p.seg1.duration * s1 * s0;
  eff.gamma_z = pref * (p.seg0.gamma * p.seg0.duration * c1 * s0 +
                        p.seg1.gamma * p.seg1.duration * c0 * s1);
  return eff;
}

/// -i * H_eff * T generator for the extracted parameters; exponentiating it
/// must reproduce the monodromy when the extraction is well conditioned.
inline Mat2 effective_generator(const EffectiveHamiltonian& eff, double period) {
  const double omega = 2.0 * std::numbers::pi / period;
  const Mat2 h_eff = pauli_compose(Complex{0.5 * eff.n * omega, 0.0},
                                   Complex{0.5 * eff.j, 0.0},
                                   kImag * (0.5 * eff.gamma_y),
                                   kImag * (0.5 * eff.gamma_z));
  return (-kImag * period) * h_eff;
}

}  // namespace floquet_pt
