#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "floquet_pt/su2.hpp"

namespace floquet_pt {

/// One constant plateau of the square wave: coupling delta, dissipation
/// gamma (gain/loss along z), and plateau duration.
struct SegmentParams {
  double delta = 0.0;
  double gamma = 0.0;
  double duration = 0.0;
};

/// Two-plateau square-wave protocol. Segment 0 is centered on t = 0, so one
/// period runs over [-T0/2, T - T0/2] and the monodromy composes as U1 * U0.
/// A shifted time origin would conjugate the monodromy without changing its
/// trace or the quasi-energies.
struct DriveProtocol {
  SegmentParams seg0;
  SegmentParams seg1;
};

enum class SpectrumRegime { RealSpectrum, ImaginarySpectrum, ExceptionalStatic };

/// h^2 = (delta^2 - gamma^2)/4 and its sign regime. Within static_tol of
/// zero the plateau sits at its own (static) exceptional point.
struct SegmentSpectrum {
  double h_squared = 0.0;
  SpectrumRegime regime = SpectrumRegime::RealSpectrum;

  static constexpr double static_tol = 1e-12;
};

struct DerivedQuantities {
  double period = 0.0;     // T = T0 + T1
  double omega = 0.0;      // 2*pi/T
  double delta_eff = 0.0;  // (d0*T0 + d1*T1)/T
  double gamma_eff = 0.0;  // (g0*T0 + g1*T1)/T
};

inline SegmentSpectrum spectrum(const SegmentParams& s) {
  SegmentSpectrum out;
  out.h_squared = 0.25 * (s.delta * s.delta - s.gamma * s.gamma);
  if (out.h_squared > SegmentSpectrum::static_tol)
    out.regime = SpectrumRegime::RealSpectrum;
  else if (out.h_squared < -SegmentSpectrum::static_tol)
    out.regime = SpectrumRegime::ImaginarySpectrum;
  else
    out.regime = SpectrumRegime::ExceptionalStatic;
  return out;
}

/// H = (delta/2) sx + i (gamma/2) sz. Traceless, so its propagators are
/// unimodular.
inline Mat2 segment_hamiltonian(const SegmentParams& s) {
  return pauli_compose(0.0, 0.5 * s.delta, 0.0, kImag * (0.5 * s.gamma));
}

inline Mat2 segment_propagator(const SegmentParams& s) {
  const double q = spectrum(s).h_squared * s.duration * s.duration;
  return segment_propagator_closed(q, s.duration, segment_hamiltonian(s));
}

inline DriveProtocol validate(const DriveProtocol& p) {
  auto check_segment = [](const SegmentParams& s, const char* name) {
    if (!std::isfinite(s.delta) || !std::isfinite(s.gamma) || !std::isfinite(s.duration))
      throw ValidationError(std::string("protocol ") + name + ": non-finite parameter");
    if (!(s.duration > 0.0))
      throw ValidationError(std::string("protocol ") + name + ": duration must be > 0");
  };
  check_segment(p.seg0, "segment 0");
  check_segment(p.seg1, "segment 1");
  return p;
}

/// Degenerate case where the two plateaus coincide and the drive is really a
/// static Hamiltonian. Valid, but flagged so callers can report it.
inline bool is_static(const DriveProtocol& p) {
  return p.seg0.delta == p.seg1.delta && p.seg0.gamma == p.seg1.gamma;
}

inline DerivedQuantities derived_quantities(const DriveProtocol& p) {
  DerivedQuantities d;
  d.period = p.seg0.duration + p.seg1.duration;
  d.omega = 2.0 * std::numbers::pi / d.period;
  d.delta_eff = (p.seg0.delta * p.seg0.duration + p.seg1.delta * p.seg1.duration) / d.period;
  d.gamma_eff = (p.seg0.gamma * p.seg0.duration + p.seg1.gamma * p.seg1.duration) / d.period;
  return d;
}

/// Convenience construction from driving frequency and duty fraction:
/// T = 2*pi/omega, T0 = t0_fraction * T.
inline DriveProtocol protocol_from_omega(double delta0, double delta1, double gamma0,
                                         double gamma1, double omega, double t0_fraction) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw ValidationError("protocol_from_omega: omega must be positive and finite");
  if (!(t0_fraction > 0.0) || !(t0_fraction < 1.0))
    throw ValidationError("protocol_from_omega: t0_fraction must lie in (0, 1)");
  const double period = 2.0 * std::numbers::pi / omega;
  return validate(DriveProtocol{{delta0, gamma0, t0_fraction * period},
                                {delta1, gamma1, (1.0 - t0_fraction) * period}});
}

}  // namespace floquet_pt
