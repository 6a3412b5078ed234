#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "floquet_pt/floquet.hpp"

namespace floquet_pt {

enum class ResonanceKind { OddPhoton, EvenPhoton };

/// Multiphoton resonance omega = delta_eff / k. Odd k breaks under any weak
/// dissipation; even k breaks only when the dissipation strengths or the
/// plateau durations are imbalanced (gamma0 != -gamma1 or T0 != T1).
struct ResonancePrediction {
  int k = 1;
  ResonanceKind kind = ResonanceKind::OddPhoton;
  double omega_resonant = 0.0;
  bool breaking_expected = true;
  std::string reason;
};

inline constexpr double kBalanceTol = 1e-12;

inline std::vector<ResonancePrediction> predict_resonances(const DriveProtocol& p, int k_max) {
  if (k_max < 1) throw ValidationError("predict_resonances: k_max must be >= 1");
  const DerivedQuantities d = derived_quantities(p);
  std::vector<ResonancePrediction> out;
  if (d.delta_eff == 0.0) return out;  // no resonance condition to satisfy

  const bool gamma_balanced = std::abs(p.seg0.gamma + p.seg1.gamma) <= kBalanceTol;
  const bool time_balanced = std::abs(p.seg0.duration - p.seg1.duration) <= kBalanceTol;
  for (int k = 1; k <= k_max; ++k) {
    ResonancePrediction r;
    r.k = k;
    r.omega_resonant = d.delta_eff / static_cast<double>(k);
    if (k % 2 == 1) {
      r.kind = ResonanceKind::OddPhoton;
      r.breaking_expected = true;
      r.reason = "odd-photon";
    } else {
      r.kind = ResonanceKind::EvenPhoton;
      r.breaking_expected = !(gamma_balanced && time_balanced);
      if (!gamma_balanced && !time_balanced)
        r.reason = "gamma-and-time-imbalance";
      else if (!gamma_balanced)
        r.reason = "gamma-imbalance";
      else if (!time_balanced)
        r.reason = "time-imbalance";
      else
        r.reason = "balanced";
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Second-order expansion of Pi for short periods:
/// Pi ~= 1 + (gamma_eff^2 - delta_eff^2) T^2 / 8.
inline double hf_pi_approx(const DriveProtocol& p) {
  const DerivedQuantities d = derived_quantities(p);
  return 1.0 + 0.125 * (d.gamma_eff * d.gamma_eff - d.delta_eff * d.delta_eff) *
                   d.period * d.period;
}

/// High-frequency phase boundary gamma_eff = +-delta_eff and the
/// classification it implies: |gamma_eff| < |delta_eff| keeps the symmetry,
/// otherwise it breaks with n = 0.
struct HfBoundary {
  double delta_eff = 0.0;
  double gamma_eff = 0.0;
  double boundary_upper = 0.0;  // +|delta_eff|
  double boundary_lower = 0.0;  // -|delta_eff|
  Phase predicted = Phase::PTSymmetric;
};

inline HfBoundary hf_boundary(const DriveProtocol& p) {
  const DerivedQuantities d = derived_quantities(p);
  HfBoundary b;
  b.delta_eff = d.delta_eff;
  b.gamma_eff = d.gamma_eff;
  b.boundary_upper = std::abs(d.delta_eff);
  b.boundary_lower = -std::abs(d.delta_eff);
  b.predicted =
      std::abs(d.gamma_eff) < std::abs(d.delta_eff) ? Phase::PTSymmetric : Phase::BrokenN0;
  return b;
}

/// Leading-order effective Hamiltonian in the T -> 0 limit: the drive
/// averages to a static system with the time-averaged strengths.
inline EffectiveHamiltonian hf_effective_hamiltonian(const DriveProtocol& p) {
  const DerivedQuantities d = derived_quantities(p);
  EffectiveHamiltonian eff;
  eff.j = d.delta_eff;
  eff.gamma_y = 0.0;
  eff.gamma_z = d.gamma_eff;
  eff.n = 0;
  eff.well_conditioned = true;
  return eff;
}

// ---------------------------------------------------------------------------
// Parameter rays and sweep grids
// ---------------------------------------------------------------------------

/// Protocol fields a ray or sweep axis may drive. Omega rescales the period
/// (keeping the duty fraction T0/T fixed) so frequency axes match how the
/// phase diagrams are drawn.
enum class ProtocolParam { Delta0, Delta1, Gamma0, Gamma1, Duration0, Duration1, Omega };

inline const char* protocol_param_name(ProtocolParam p) {
  switch (p) {
    case ProtocolParam::Delta0: return "delta0";
    case ProtocolParam::Delta1: return "delta1";
    case ProtocolParam::Gamma0: return "gamma0";
    case ProtocolParam::Gamma1: return "gamma1";
    case ProtocolParam::Duration0: return "t0";
    case ProtocolParam::Duration1: return "t1";
    case ProtocolParam::Omega: return "omega";
  }
  return "?";
}

/// One affine assignment field <- scale * x + offset.
struct AxisAssignment {
  ProtocolParam param = ProtocolParam::Omega;
  double scale = 1.0;
  double offset = 0.0;
};

/// An axis may drive several fields at once (e.g. gamma0 = x, gamma1 = -x),
/// which is how every figure's axes reduce to one sweep engine.
struct ParamAxis {
  std::vector<AxisAssignment> assignments;
  std::string name;
};

inline ParamAxis single_axis(ProtocolParam param, std::string name = {},
                             double scale = 1.0, double offset = 0.0) {
  ParamAxis a;
  a.assignments.push_back({param, scale, offset});
  a.name = name.empty() ? protocol_param_name(param) : std::move(name);
  return a;
}

inline DriveProtocol apply_axis(const DriveProtocol& base, const ParamAxis& axis, double x) {
  DriveProtocol p = base;
  for (const AxisAssignment& a : axis.assignments) {
    const double value = a.scale * x + a.offset;
    switch (a.param) {
      case ProtocolParam::Delta0: p.seg0.delta = value; break;
      case ProtocolParam::Delta1: p.seg1.delta = value; break;
      case ProtocolParam::Gamma0: p.seg0.gamma = value; break;
      case ProtocolParam::Gamma1: p.seg1.gamma = value; break;
      case ProtocolParam::Duration0: p.seg0.duration = value; break;
      case ProtocolParam::Duration1: p.seg1.duration = value; break;
      case ProtocolParam::Omega: {
        if (!(value > 0.0) || !std::isfinite(value))
          throw ValidationError("apply_axis: omega must be positive and finite");
        const double old_period = p.seg0.duration + p.seg1.duration;
        const double fraction = p.seg0.duration / old_period;
        const double period = 2.0 * std::numbers::pi / value;
        p.seg0.duration = fraction * period;
        p.seg1.duration = (1.0 - fraction) * period;
        break;
      }
    }
  }
  return validate(p);
}

// ---------------------------------------------------------------------------
// Exceptional-point root finding
// ---------------------------------------------------------------------------

enum class EpBoundary { PlusOne, MinusOne };

struct EpLocation {
  double ray_parameter = 0.0;
  double pi_at_root = 0.0;
  EpBoundary boundary = EpBoundary::PlusOne;
  double residual = 0.0;  // |Pi - (+-1)| actually achieved
};

/// Root of g(x) = Pi(x) -+ 1 along the ray x -> apply_axis(base, axis, x).
/// Bisection, with one secant step per iteration accepted whenever it lands
/// strictly inside the current bracket. Stops at |g| <= root_tol or bracket
/// width <= 1e-12.
inline EpLocation find_ep(const DriveProtocol& base, const ParamAxis& axis,
                          EpBoundary boundary, double bracket_lo, double bracket_hi,
                          double root_tol = 1e-10) {
  if (!(root_tol > 0.0)) throw ValidationError("find_ep: root_tol must be > 0");
  const double target = boundary == EpBoundary::PlusOne ? 1.0 : -1.0;
  auto g = [&](double x) { return pi_closed_form(apply_axis(base, axis, x)) - target; };

  double a = bracket_lo, b = bracket_hi;
  double ga = g(a), gb = g(b);
  if (std::abs(ga) <= root_tol) return {a, ga + target, boundary, std::abs(ga)};
  if (std::abs(gb) <= root_tol) return {b, gb + target, boundary, std::abs(gb)};
  if ((ga > 0.0) == (gb > 0.0)) {
    std::ostringstream msg;
    msg << "find_ep: no sign change over [" << a << ", " << b << "]: g(a)=" << ga
        << ", g(b)=" << gb;
    throw BracketingError(msg.str());
  }

  double x = a, gx = ga;
  for (int iter = 0; iter < 200 && std::abs(b - a) > 1e-12; ++iter) {
    x = 0.5 * (a + b);
    // Secant acceleration: prefer the secant point when it falls inside.
    if (gb != ga) {
      const double xs = b - gb * (b - a) / (gb - ga);
      if (xs > a && xs < b) x = xs;
    }
    gx = g(x);
    if (std::abs(gx) <= root_tol) break;
    if ((gx > 0.0) == (ga > 0.0)) {
      a = x;
      ga = gx;
    } else {
      b = x;
      gb = gx;
    }
  }
  return {x, gx + target, boundary, std::abs(gx)};
}

/// Coarse pre-scan for sign changes of Pi -+ 1; each returned interval is a
/// valid bracket for find_ep. The caller picks the stride so Pi moves by
/// less than ~0.5 between neighbours near the boundary of interest.
inline std::vector<std::pair<double, double>> scan_for_brackets(
    const DriveProtocol& base, const ParamAxis& axis, EpBoundary boundary, double lo,
    double hi, int points) {
  if (points < 2) throw ValidationError("scan_for_brackets: need at least 2 points");
  const double target = boundary == EpBoundary::PlusOne ? 1.0 : -1.0;
  std::vector<std::pair<double, double>> brackets;
  double prev_x = lo;
  double prev_g = pi_closed_form(apply_axis(base, axis, lo)) - target;
  for (int i = 1; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    const double gx = pi_closed_form(apply_axis(base, axis, x)) - target;
    if ((gx > 0.0) != (prev_g > 0.0)) brackets.emplace_back(prev_x, x);
    prev_x = x;
    prev_g = gx;
  }
  return brackets;
}

// ---------------------------------------------------------------------------
// Phase-diagram sweeps
// ---------------------------------------------------------------------------

struct SweepGrid {
  DriveProtocol base;
  ParamAxis x_axis;
  ParamAxis y_axis;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  int x_count = 400, y_count = 400;
  double ep_tol = kDefaultEpTol;
};

struct SweepRecord {
  double x = 0.0;
  double y = 0.0;
  double pi_value = 0.0;
  PhaseLabel label;
  double re_quasi = 0.0;  // Re E+
  double im_quasi = 0.0;  // |Im E+|
  bool valid = true;
};

namespace detail {
inline int sweep_thread_count(int rows) {
  int n = 0;
  if (const char* env = std::getenv("FLOQUET_PT_THREADS")) {
    n = std::atoi(env);
    if (n < 0) n = 0;
  }
  if (n == 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  return std::min(n, rows);
}
}  // namespace detail

/// Evaluates Pi, label and quasi-energies over the grid. Rows are
/// data-parallel; output is always emitted in canonical row-major order with
/// y as the outer loop. A point whose protocol or Pi is unusable is flagged
/// invalid rather than aborting the sweep.
inline std::vector<SweepRecord> sweep(const SweepGrid& grid) {
  if (grid.x_count < 2 || grid.y_count < 2)
    throw ValidationError("sweep: need at least 2 points per axis");
  if (!(std::isfinite(grid.x_min) && std::isfinite(grid.x_max) &&
        std::isfinite(grid.y_min) && std::isfinite(grid.y_max)))
    throw ValidationError("sweep: non-finite range");
  validate(grid.base);

  std::vector<SweepRecord> records(static_cast<size_t>(grid.x_count) * grid.y_count);

  auto x_at = [&](int ix) {
    return grid.x_min + (grid.x_max - grid.x_min) * static_cast<double>(ix) / (grid.x_count - 1);
  };
  auto y_at = [&](int iy) {
    return grid.y_min + (grid.y_max - grid.y_min) * static_cast<double>(iy) / (grid.y_count - 1);
  };

  auto run_rows = [&](int row_begin, int row_end) {
    for (int iy = row_begin; iy < row_end; ++iy) {
      const double y = y_at(iy);
      for (int ix = 0; ix < grid.x_count; ++ix) {
        const double x = x_at(ix);
        SweepRecord rec;
        rec.x = x;
        rec.y = y;
        try {
          const DriveProtocol p = apply_axis(apply_axis(grid.base, grid.x_axis, x),
                                             grid.y_axis, y);
          const double pi_value = pi_closed_form(p);
          if (!std::isfinite(pi_value)) throw PrecisionError("non-finite Pi");
          rec.pi_value = pi_value;
          const double omega = derived_quantities(p).omega;
          const QuasiEnergies qe = quasi_energies(pi_value, omega, grid.ep_tol);
          rec.label = qe.label;
          rec.re_quasi = qe.e_plus.real();
          rec.im_quasi = std::abs(qe.e_plus.imag());
        } catch (const std::exception&) {
          rec.valid = false;
        }
        records[static_cast<size_t>(iy) * grid.x_count + ix] = rec;
      }
    }
  };

  const int n_threads = detail::sweep_thread_count(grid.y_count);
  if (n_threads == 1) {
    run_rows(0, grid.y_count);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    const int chunk = (grid.y_count + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      const int begin = t * chunk;
      const int end = std::min(grid.y_count, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_rows, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return records;
}

/// Number of 4-connected components of grid cells carrying `phase`.
/// Records must be in canonical row-major order with row length x_count.
inline int count_connected_regions(const std::vector<SweepRecord>& records, int x_count,
                                   Phase phase) {
  if (x_count < 1 || records.size() % static_cast<size_t>(x_count) != 0)
    throw ValidationError("count_connected_regions: records/x_count mismatch");
  const int y_count = static_cast<int>(records.size()) / x_count;
  auto marked = [&](int iy, int ix) {
    const SweepRecord& r = records[static_cast<size_t>(iy) * x_count + ix];
    return r.valid && r.label.phase == phase;
  };
  std::vector<char> seen(records.size(), 0);
  int components = 0;
  std::vector<std::pair<int, int>> stack;
  for (int iy = 0; iy < y_count; ++iy) {
    for (int ix = 0; ix < x_count; ++ix) {
      if (!marked(iy, ix) || seen[static_cast<size_t>(iy) * x_count + ix]) continue;
      ++components;
      stack.push_back({iy, ix});
      seen[static_cast<size_t>(iy) * x_count + ix] = 1;
      while (!stack.empty()) {
        const auto [y, x] = stack.back();
        stack.pop_back();
        const int dy[4] = {1, -1, 0, 0};
        const int dx[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          const int ny = y + dy[d], nx = x + dx[d];
          if (ny < 0 || ny >= y_count || nx < 0 || nx >= x_count) continue;
          if (!marked(ny, nx) || seen[static_cast<size_t>(ny) * x_count + nx]) continue;
          seen[static_cast<size_t>(ny) * x_count + nx] = 1;
          stack.push_back({ny, nx});
        }
      }
    }
  }
  return components;
}

}  // namespace floquet_pt
