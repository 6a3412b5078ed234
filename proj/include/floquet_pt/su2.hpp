#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>

#include "floquet_pt/errors.hpp"

namespace floquet_pt {

using Complex = std::complex<double>;

inline constexpr Complex kImag{0.0, 1.0};

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Complex 2x2 matrix stored by its coefficients in the {I, sx, sy, sz}
/// basis: M = c_id*I + c_x*sx + c_y*sy + c_z*sz. The decomposition makes
/// trace and determinant closed-form:
///   tr M  = 2*c_id
///   det M = c_id^2 - c_x^2 - c_y^2 - c_z^2
struct Mat2 {
  Complex c_id{0.0, 0.0};
  Complex c_x{0.0, 0.0};
  Complex c_y{0.0, 0.0};
  Complex c_z{0.0, 0.0};

  static Mat2 identity() { return Mat2{1.0, 0.0, 0.0, 0.0}; }
  static Mat2 zero() { return Mat2{}; }

  /// Element-form accessors (row-major 2x2).
  Complex e00() const { return c_id + c_z; }
  Complex e01() const { return c_x - kImag * c_y; }
  Complex e10() const { return c_x + kImag * c_y; }
  Complex e11() const { return c_id - c_z; }

  std::array<Complex, 4> elements() const { return {e00(), e01(), e10(), e11()}; }

  static Mat2 from_elements(Complex m00, Complex m01, Complex m10, Complex m11) {
    return Mat2{0.5 * (m00 + m11), 0.5 * (m01 + m10),
                0.5 * kImag * (m01 - m10), 0.5 * (m00 - m11)};
  }

  bool finite() const {
    return is_finite(c_id) && is_finite(c_x) && is_finite(c_y) && is_finite(c_z);
  }

  Mat2 operator+(const Mat2& o) const {
    return Mat2{c_id + o.c_id, c_x + o.c_x, c_y + o.c_y, c_z + o.c_z};
  }
  Mat2 operator-(const Mat2& o) const {
    return Mat2{c_id - o.c_id, c_x - o.c_x, c_y - o.c_y, c_z - o.c_z};
  }
  Mat2 operator*(Complex s) const {
    return Mat2{s * c_id, s * c_x, s * c_y, s * c_z};
  }

  /// Largest element magnitude, |M|_max.
  double max_abs() const {
    return std::max(std::max(std::abs(e00()), std::abs(e01())),
                    std::max(std::abs(e10()), std::abs(e11())));
  }

  /// Row-sum (infinity) norm on the element form.
  double norm_inf() const {
    return std::max(std::abs(e00()) + std::abs(e01()),
                    std::abs(e10()) + std::abs(e11()));
  }
};

inline Mat2 operator*(Complex s, const Mat2& m) { return m * s; }

/// Pauli-basis product. With a = a0 I + av.s and b = b0 I + bv.s,
/// a*b = (a0 b0 + av.bv) I + (a0 bv + b0 av + i av x bv).s
inline Mat2 mat_mul(const Mat2& a, const Mat2& b) {
  Mat2 r;
  r.c_id = a.c_id * b.c_id + a.c_x * b.c_x + a.c_y * b.c_y + a.c_z * b.c_z;
  r.c_x = a.c_id * b.c_x + b.c_id * a.c_x + kImag * (a.c_y * b.c_z - a.c_z * b.c_y);
  r.c_y = a.c_id * b.c_y + b.c_id * a.c_y + kImag * (a.c_z * b.c_x - a.c_x * b.c_z);
  r.c_z = a.c_id * b.c_z + b.c_id * a.c_z + kImag * (a.c_x * b.c_y - a.c_y * b.c_x);
  return r;
}

inline Mat2 operator*(const Mat2& a, const Mat2& b) { return mat_mul(a, b); }

inline Complex trace(const Mat2& m) { return 2.0 * m.c_id; }

inline Complex det(const Mat2& m) {
  return m.c_id * m.c_id - m.c_x * m.c_x - m.c_y * m.c_y - m.c_z * m.c_z;
}

inline Mat2 pauli_compose(Complex c_id, Complex c_x, Complex c_y, Complex c_z) {
  if (!is_finite(c_id) || !is_finite(c_x) || !is_finite(c_y) || !is_finite(c_z))
    throw ValidationError("pauli_compose: non-finite coefficient");
  return Mat2{c_id, c_x, c_y, c_z};
}

/// Eigenvalues of a 2x2 matrix from its trace and determinant,
/// lam = (tr +- sqrt(tr^2 - 4 det)) / 2. No iterative solver involved.
inline std::pair<Complex, Complex> eigenvalues(const Mat2& m) {
  const Complex tr = trace(m);
  const Complex d = det(m);
  const Complex disc = std::sqrt(tr * tr - 4.0 * d);
  return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}

namespace detail {
// Crossover below which the direct cos(sqrt(q)) / sin(sqrt(q))/sqrt(q)
// evaluation loses digits to cancellation and the 3-term Taylor series wins.
inline constexpr double kEvenKernelTaylorCut = 1e-8;
}  // namespace detail

/// cos(h t) expressed through the real variable q = (h t)^2, which stays real
/// whether h is real (q >= 0) or imaginary (q < 0). Analytic across q = 0.
inline double cos_even(double q) {
  if (!std::isfinite(q)) throw ValidationError("cos_even: non-finite argument");
  if (std::abs(q) < detail::kEvenKernelTaylorCut)
    return 1.0 - q / 2.0 + q * q / 24.0;
  if (q > 0.0) return std::cos(std::sqrt(q));
  return std::cosh(std::sqrt(-q));
}

/// sinc(h t) = sin(h t)/(h t) through q = (h t)^2; equals sinh(|ht|)/|ht| for
/// imaginary h and 1 at q = 0.
inline double sinc_even(double q) {
  if (!std::isfinite(q)) throw ValidationError("sinc_even: non-finite argument");
  if (std::abs(q) < detail::kEvenKernelTaylorCut)
    return 1.0 - q / 6.0 + q * q / 120.0;
  if (q > 0.0) {
    const double r = std::sqrt(q);
    return std::sin(r) / r;
  }
  const double r = std::sqrt(-q);
  return std::sinh(r) / r;
}

/// Closed-form propagator exp(-i H t) for a traceless H with (h t)^2 given as
/// the real number h_sq_t_sq = t^2 (det-free invariant of H):
///   exp(-i H t) = cos(h t) I - i sinc(h t) t H.
/// The caller guarantees h_sq_t_sq is consistent with `hamiltonian`.
inline Mat2 segment_propagator_closed(double h_sq_t_sq, double t, const Mat2& hamiltonian) {
  const double c = cos_even(h_sq_t_sq);
  const double s = sinc_even(h_sq_t_sq);
  return Mat2{Complex{c, 0.0}, 0.0, 0.0, 0.0} + (-kImag * s * t) * hamiltonian;
}

/// Series matrix exponential with scaling and squaring: the independent
/// verification route for the closed-form propagators. `substeps` is the
/// scaling divisor; exp(m) = (series(m/substeps))^substeps.
/// Throws PrecisionError when the truncated series has not converged to
/// 1e-13 relative by the last term.
inline Mat2 expm_series(const Mat2& m, int terms, int substeps) {
  if (terms < 20) throw ValidationError("expm_series: terms must be >= 20");
  if (substeps < 1) throw ValidationError("expm_series: substeps must be >= 1");
  if (!m.finite()) throw ValidationError("expm_series: non-finite input");

  const Mat2 scaled = m * Complex{1.0 / static_cast<double>(substeps), 0.0};

  Mat2 sum = Mat2::identity();
  Mat2 term = Mat2::identity();
  double last_term_mag = 0.0;
  for (int k = 1; k <= terms; ++k) {
    term = term * scaled * Complex{1.0 / static_cast<double>(k), 0.0};
    sum = sum + term;
    last_term_mag = term.max_abs();
  }
  const double scale = std::max(sum.max_abs(), 1.0);
  if (last_term_mag > 1e-13 * scale)
    throw PrecisionError("expm_series: series not converged; increase terms or substeps");

  // Binary powering of the substep propagator.
  Mat2 result = Mat2::identity();
  Mat2 base = sum;
  int e = substeps;
  while (e > 0) {
    if (e & 1) result = result * base;
    base = base * base;
    e >>= 1;
  }
  return result;
}

/// Norm-adaptive overload: substeps = 2^ceil(log2(max(1, |m|))) keeps the
/// per-substep argument small enough for uniform series accuracy, including
/// broken-phase generators with cosh-growing exponentials.
inline Mat2 expm_series(const Mat2& m) {
  const double nrm = m.norm_inf();
  int substeps = 1;
  if (nrm > 1.0) {
    const int k = static_cast<int>(std::ceil(std::log2(nrm)));
    substeps = 1 << std::min(k, 30);
  }
  return expm_series(m, 30, substeps);
}

}  // namespace floquet_pt
