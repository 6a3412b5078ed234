#pragma once

#include <string>
#include <vector>

#include "floquet_pt/analysis.hpp"

namespace floquet_pt {

/// A ready-to-run phase-diagram scan: base protocol plus both sweep axes.
/// The bound protocol parameters follow the published captions; axis ranges
/// frame the features each diagram is about.
struct FigurePreset {
  std::string name;
  std::string description;
  DriveProtocol base;
  ParamAxis x_axis;
  ParamAxis y_axis;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  int x_count = 400, y_count = 400;
};

inline const std::vector<FigurePreset>& figure_presets() {
  static const std::vector<FigurePreset> presets = [] {
    std::vector<FigurePreset> v;

    auto gamma0_only = single_axis(ProtocolParam::Gamma0);
    ParamAxis gamma_antisym;  // gamma0 = x, gamma1 = -x
    gamma_antisym.assignments = {{ProtocolParam::Gamma0, 1.0, 0.0},
                                 {ProtocolParam::Gamma1, -1.0, 0.0}};
    gamma_antisym.name = "gamma_antisym";
    ParamAxis gamma_common;  // gamma0 = gamma1 = x
    gamma_common.assignments = {{ProtocolParam::Gamma0, 1.0, 0.0},
                                {ProtocolParam::Gamma1, 1.0, 0.0}};
    gamma_common.name = "gamma_common";
    auto omega_axis = single_axis(ProtocolParam::Omega);

    // Periodic dissipation, one-photon resonance window.
    v.push_back({"fig1",
                 "periodic dissipation near the one-photon resonance "
                 "(delta0=delta1=1, gamma1=0, T0=T1)",
                 protocol_from_omega(1.0, 1.0, 0.0, 0.0, 1.0, 0.5),
                 omega_axis, gamma0_only, 0.8, 1.25, 0.0, 0.5});

    // Same drive, two-photon resonance window.
    v.push_back({"fig2",
                 "periodic dissipation near the two-photon resonance "
                 "(delta0=delta1=1, gamma1=0, T0=T1)",
                 protocol_from_omega(1.0, 1.0, 0.0, 0.0, 1.0, 0.5),
                 omega_axis, gamma0_only, 0.4, 0.55, 0.0, 0.5});

    // Multiphoton overview, three dissipation patterns.
    v.push_back({"fig3a",
                 "periodic dissipation, multiphoton overview (gamma0=gamma, gamma1=0, T0=T1)",
                 protocol_from_omega(1.0, 1.0, 0.0, 0.0, 1.0, 0.5),
                 omega_axis, gamma0_only, 0.2, 1.3, 0.0, 0.5});
    v.push_back({"fig3b",
                 "balanced antisymmetric dissipation (gamma0=-gamma1, T0=T1)",
                 protocol_from_omega(1.0, 1.0, 0.0, 0.0, 1.0, 0.5),
                 omega_axis, gamma_antisym, 0.2, 1.3, 0.0, 0.5});
    v.push_back({"fig3c",
                 "antisymmetric dissipation with imbalanced durations "
                 "(gamma0=-gamma1, T0=0.55T)",
                 protocol_from_omega(1.0, 1.0, 0.0, 0.0, 1.0, 0.55),
                 omega_axis, gamma_antisym, 0.2, 1.3, 0.0, 0.5});

    // Periodic coupling, static dissipation.
    v.push_back({"fig4a",
                 "periodic coupling (delta0=1, delta1=0, T0=0.5T, gamma0=gamma1)",
                 protocol_from_omega(1.0, 0.0, 0.0, 0.0, 1.0, 0.5),
                 omega_axis, gamma_common, 0.1, 0.7, 0.0, 0.5});
    v.push_back({"fig4b",
                 "periodic coupling with sign change and imbalanced durations "
                 "(delta0=1, delta1=-0.2, T0=0.55T, gamma0=gamma1)",
                 protocol_from_omega(1.0, -0.2, 0.0, 0.0, 1.0, 0.55),
                 omega_axis, gamma_common, 0.1, 0.6, 0.0, 0.5});

    // High-frequency regime, both dissipation strengths swept.
    v.push_back({"fig5",
                 "high-frequency boundary check (delta0=delta1=1, omega=3, T0=0.4T)",
                 protocol_from_omega(1.0, 1.0, 0.0, 0.0, 3.0, 0.4),
                 single_axis(ProtocolParam::Gamma0, "gamma0"),
                 single_axis(ProtocolParam::Gamma1, "gamma1"),
                 -5.0, 5.0, -5.0, 5.0});
    return v;
  }();
  return presets;
}

inline const FigurePreset* find_preset(const std::string& name) {
  for (const FigurePreset& p : figure_presets())
    if (p.name == name) return &p;
  return nullptr;
}

inline SweepGrid preset_grid(const FigurePreset& preset, double ep_tol = kDefaultEpTol) {
  SweepGrid grid;
  grid.base = preset.base;
  grid.x_axis = preset.x_axis;
  grid.y_axis = preset.y_axis;
  grid.x_min = preset.x_min;
  grid.x_max = preset.x_max;
  grid.y_min = preset.y_min;
  grid.y_max = preset.y_max;
  grid.x_count = preset.x_count;
  grid.y_count = preset.y_count;
  grid.ep_tol = ep_tol;
  return grid;
}

}  // namespace floquet_pt
