#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "solab/model.hpp"
#include "solab/soliton.hpp"

namespace solab {

struct EffectiveState {
    ModulationParams sigma;
    double t = 0.0;
};

struct EffectiveTrajectory {
    std::vector<EffectiveState> states;
};

struct MuInterval {
    double lo = 0.1;
    double hi = 10.0;
};

/// Leading-order point-particle system:
///   da/dt = v, dv/dt = -2 grad V(t, a), dgamma/dt = mu - V(t, a) + v^2/4, dmu/dt = 0.
struct EffectiveRhs {
    std::vector<double> da, dv;
    double dgamma = 0.0, dmu = 0.0;
};
EffectiveRhs rhs_leading(const ModulationParams& sigma, double t, const Potential& potential);

/// Classical RK4 with fixed step; errors out when mu leaves the validated
/// interval. gamma is integrated unreduced (callers reduce mod 2pi on output).
EffectiveTrajectory integrate_effective(const EffectiveState& state0, const Potential& potential,
                                        double dt, double t_end, const MuInterval& interval = {});

/// Closed-form transport reference a(t) = s t - (s / (h w0)) sin(h w0 t)
/// for a(0) = v(0) = 0, componentwise in the drift vector s.
std::vector<double> adiabatic_reference(const std::vector<double>& s, double h, double omega0,
                                        double t);

struct FloquetResult {
    std::array<std::complex<double>, 2> multipliers;
    bool unstable = false;       // max modulus > 1 + tolerance
    double product_error = 0.0;  // |multiplier product - 1|
};

/// Monodromy analysis of a'' = -(h w0)^2 (1 + delta cos(w t)) a over one period
/// 2 pi / w (RK4 from two independent initial conditions). Parametric resonance
/// tongues touch h w0 = n w / 2.
FloquetResult floquet_monodromy(double h, double omega0, double omega, double delta);

void write_trajectory_csv(const std::string& path, const EffectiveTrajectory& traj);

}  // namespace solab
