#pragma once

#include <memory>
#include <string>
#include <vector>

#include "solab/model.hpp"
#include "solab/numerics.hpp"

namespace solab {

/// Manifold coordinates sigma = {a, v, gamma, mu}.
struct ModulationParams {
    std::vector<double> a;
    std::vector<double> v;
    double gamma = 0.0;
    double mu = 1.0;

    ModulationParams() = default;
    ModulationParams(std::vector<double> a_, std::vector<double> v_, double gamma_, double mu_)
        : a(std::move(a_)), v(std::move(v_)), gamma(reduce_mod_2pi(gamma_)), mu(mu_) {}

    TransformParams transform() const { return TransformParams(a, v, gamma); }
    int dim() const { return static_cast<int>(a.size()); }
};

struct SolverOptions {
    // target ||residual||_L2 / ||eta||_L2; the spectral roundoff floor on an
    // M = 2048 grid sits near 1.5e-12
    double tolerance = 5e-12;
    int max_iterations = 500;
    double delta_mu_rel = 1e-4;  // step for d/dmu finite differences
    bool newton_polish = true;
};

/// Ground-state profile of (-Lap + mu) eta = f(eta) with mass data.
/// eta_plus/eta_minus are the re-solved profiles at mu(1 +- delta_mu_rel) used
/// for every d/dmu quantity, so e_s and mass_slope are mutually consistent.
struct SolitonProfile {
    double mu = 0.0;
    ComplexField eta;       // real, positive, even
    double mass = 0.0;      // m(mu) = (1/2) int eta^2
    double mass_slope = 0.0;  // m'(mu) > 0 (orbital stability)
    double residual = 0.0;  // ||(-Lap+mu)eta - f(eta)||_L2
    ComplexField eta_plus, eta_minus;
    double delta_mu = 0.0;
};

/// Tangent fields of the soliton manifold at eta_mu, in the fixed project-wide
/// order (e_t 1..N, e_b 1..N, e_g, e_s):
///   e_t = -grad eta (real, odd)   e_b = i x eta (imaginary, odd)
///   e_g = i eta (imaginary, even) e_s = d eta / d mu (real, even)
struct TangentBasis {
    std::vector<ComplexField> fields;  // size 2N+2
    int dim = 1;

    const ComplexField& e_t(int axis) const { return fields[axis]; }
    const ComplexField& e_b(int axis) const { return fields[dim + axis]; }
    const ComplexField& e_g() const { return fields[2 * dim]; }
    const ComplexField& e_s() const { return fields[2 * dim + 1]; }
    int size() const { return 2 * dim + 2; }
};

SolitonProfile solve_profile(const Nonlinearity& nl, double mu, const Grid& grid,
                             const SolverOptions& opts = {});

/// (m, m'); values are carried on the profile, validated m' > 0 at solve time.
std::pair<double, double> mass_and_slope(const SolitonProfile& profile);

TangentBasis tangent_basis(const SolitonProfile& profile);

/// L_mu w = -Lap w + mu w - f'(eta_mu) w  (real-linear).
ComplexField apply_linearization(const SolitonProfile& profile, const Nonlinearity& nl,
                                 const ComplexField& w);

/// Omega^-1 in the basis order above: entries omega(e_j, e_k) = <e_j, i e_k>.
/// Errors out when the matrix is numerically singular (condition > 1e12).
SmallMatrix omega_inv_matrix(const SolitonProfile& profile, const TangentBasis& basis);

/// T_{a v gamma} eta_mu on the profile's grid.
ComplexField eta_sigma(const SolitonProfile& profile, const ModulationParams& sigma,
                       const Grid& grid);

/// Analytic 1D cubic profile sqrt(2 mu / lambda) sech(sqrt(mu) x), used as the
/// solver's initial guess and as an independent oracle in tests.
ComplexField cubic_soliton_1d(double mu, double lambda, const Grid& grid);

/// Export a profile in the field snapshot format with
/// {mu, lambda, s, residual, mass, mass_slope} metadata.
void write_profile_snapshot(const std::string& path, const SolitonProfile& profile,
                            const Nonlinearity& nl);

/// Profiles plus tangent bases solved on demand and memoized by exact mu;
/// shared by the decomposition's Newton iteration. Thread-safe.
class ProfileLibrary {
public:
    ProfileLibrary(Nonlinearity nl, Grid grid, SolverOptions opts = {});

    struct Entry {
        SolitonProfile profile;
        TangentBasis basis;
    };
    std::shared_ptr<const Entry> get(double mu) const;
    const Nonlinearity& nonlinearity() const { return nl_; }
    const Grid& grid() const { return grid_; }

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
    Nonlinearity nl_;
    Grid grid_;
    SolverOptions opts_;
};

}  // namespace solab
