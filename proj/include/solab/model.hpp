#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "solab/field.hpp"

namespace solab {

// ---------------------------------------------------------------------------
// Nonlinearity: local power f(u) = lambda |u|^s u, or Hartree
// f(u) = lambda (W * |u|^2) u with a spherically symmetric kernel W(r).
// ---------------------------------------------------------------------------

enum class NonlinearityKind { local_power, hartree };

class Nonlinearity {
public:
    /// Local power nonlinearity; requires lambda > 0 and 0 < s < 4/dim.
    static Nonlinearity local_power(double lambda, double s, int dim);

    /// Hartree nonlinearity with radial kernel W(r); default is the normalized
    /// Gaussian (2*pi*width^2)^(-dim/2) exp(-r^2/(2 width^2)).
    static Nonlinearity hartree(double lambda, int dim,
                                std::function<double(double)> kernel = nullptr);

    NonlinearityKind kind() const { return kind_; }
    double lambda() const { return lambda_; }
    double s() const { return s_; }
    int dim() const { return dim_; }

    /// Degree of the nonlinearity near eta (s+1 for local power, 3 for hartree);
    /// used by the profile solver's stabilizing exponent.
    double power_degree() const;

    ComplexField f_eval(const ComplexField& u) const;
    double F_eval(const ComplexField& u) const;

    /// Real-linear Frechet derivative at a real profile eta applied to w:
    /// local:  lambda eta^s ((s+1) Re w + i Im w)
    /// hartree: lambda (W*eta^2) w + 2 lambda (W*(eta Re w)) eta
    ComplexField f_prime_apply(const ComplexField& eta, const ComplexField& w) const;

    /// Kernel samples on a grid (hartree only), cached per grid.
    const ComplexField& kernel_on(const Grid& g) const;

private:
    Nonlinearity() = default;
    NonlinearityKind kind_ = NonlinearityKind::local_power;
    double lambda_ = 1.0;
    double s_ = 2.0;
    int dim_ = 1;
    std::function<double(double)> kernel_;
    mutable std::shared_ptr<ComplexField> kernel_cache_;  // per last grid

    ComplexField convolve_kernel(const ComplexField& rho) const;
};

// ---------------------------------------------------------------------------
// Time-dependent external potentials V_h(t, x) = V(t, h x).
//
// Built-in traps are normalized so that the effective force law
// dv/dt = -2 grad V_h equals -(h w0)^2 (x - center):
//   moving_trap:  V_h = (1/4) h^2 w0^2 ||x - s t||^2 env(||x - s t||)
//   mathieu_trap: V_h = (1/4) h^2 w0^2 (1 + delta cos(w t)) ||x||^2 env(||x||)
// env is a C^2 bump equal to 1 for r <= theta and 0 beyond 1.5 theta.
// ---------------------------------------------------------------------------

enum class PotentialKind { zero, moving_trap, mathieu_trap, custom };

struct PotentialTableSlice {
    double t = 0.0;
    ComplexField values;  // real samples on the scenario grid
};

class Potential {
public:
    static Potential zero(int dim);
    static Potential moving_trap(int dim, double h, double omega0, std::vector<double> drift,
                                 double cutoff_theta);
    static Potential mathieu_trap(int dim, double h, double omega0, double delta, double omega,
                                  double cutoff_theta);
    /// Analytic custom potential: caller provides V; grad and dV/dt default to
    /// centered finite differences when not given.
    static Potential custom(int dim, std::function<double(double, const std::vector<double>&)> V,
                            std::function<std::vector<double>(double, const std::vector<double>&)>
                                gradV = nullptr,
                            std::function<double(double, const std::vector<double>&)> dtV = nullptr);
    /// Tabulated t-slices on a grid; V is piecewise linear in t between slices,
    /// grad via spectral differentiation of the slice, dV/dt from slice deltas.
    static Potential tabulated(std::vector<PotentialTableSlice> slices);

    PotentialKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double h() const { return h_; }
    double omega0() const { return omega0_; }
    double delta() const { return delta_; }
    double omega() const { return omega_; }
    const std::vector<double>& drift() const { return drift_; }
    double cutoff_theta() const { return theta_; }

    double eval(double t, const std::vector<double>& x) const;
    std::vector<double> grad(double t, const std::vector<double>& x) const;
    double dt(double t, const std::vector<double>& x) const;

    /// Potential sampled on a grid at fixed t (used by the evolver substep).
    ComplexField sample(double t, const Grid& g) const;

    /// Taylor residual field on the co-moving grid:
    /// R_V(x) = V(t, x + a) - V(t, a) - grad V(t, a) . x  (real field).
    ComplexField rv_residual(double t, const std::vector<double>& a, const Grid& g) const;

private:
    Potential() = default;
    PotentialKind kind_ = PotentialKind::zero;
    int dim_ = 1;
    double h_ = 0.0, omega0_ = 0.0, delta_ = 0.0, omega_ = 0.0, theta_ = 0.0;
    std::vector<double> drift_;
    std::function<double(double, const std::vector<double>&)> custom_v_;
    std::function<std::vector<double>(double, const std::vector<double>&)> custom_grad_;
    std::function<double(double, const std::vector<double>&)> custom_dt_;
    std::vector<PotentialTableSlice> table_;

    double trap_radial(double t, double r2) const;  // quadratic * envelope
};

/// C^2 cutoff bump: 1 for r <= theta, 0 for r >= 1.5 theta, quintic smoothstep
/// in between. Returns value and derivative d env / d r.
struct Envelope {
    double value;
    double slope;
};
Envelope cutoff_envelope(double r, double theta);

struct NlsModel {
    Nonlinearity nonlinearity;
    Potential potential;
};

}  // namespace solab
