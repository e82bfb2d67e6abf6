#include "solab/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <utility>

#include "solab/fourier.hpp"
#include "solab/krylov.hpp"
#include "solab/snapshot.hpp"

namespace solab {

namespace {

// (-Lap + mu)^-1 as a spectral multiplier.
ComplexField helmholtz_inverse(const ComplexField& u, double mu) {
    return spectral_multiplier(u, [mu](double k2) { return 1.0 / (k2 + mu); });
}

ComplexField stationary_residual(const Nonlinearity& nl, const ComplexField& eta, double mu) {
    ComplexField r = spectral_laplacian(eta);
    const ComplexField feta = nl.f_eval(eta);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = -r[i] + mu * eta[i] - feta[i];
    return r;
}

// Even symmetrization u(x) <- (u(x) + u(-x))/2; pins the profile at the origin
// (the translation mode is neutral for the fixed-point iteration).
void symmetrize_even_real(ComplexField& u) {
    const Grid& g = u.grid;
    const int M = g.points;
    for (std::size_t p = 0; p < u.size(); ++p) {
        const auto idx = g.unravel(p);
        std::size_t q = 0;
        for (int d = 0; d < g.dim; ++d) q = q * M + static_cast<std::size_t>((M - idx[d]) % M);
        if (q < p) continue;
        const double m = 0.5 * (u[p].real() + u[q].real());
        u[p] = cplx{m, 0.0};
        u[q] = cplx{m, 0.0};
    }
}

// One damped-Newton step on the real stationary equation, solving the
// symmetric indefinite system (-Lap + mu - f'_+(eta)) d = -residual by MINRES.
bool newton_step(const Nonlinearity& nl, ComplexField& eta, double mu, double& res_norm) {
    const ComplexField r = stationary_residual(nl, eta, mu);
    auto op = [&](const ComplexField& w) {
        ComplexField lw = spectral_laplacian(w);
        const ComplexField fw = nl.f_prime_apply(eta, w);
        for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = -lw[i] + mu * w[i] - fw[i];
        return lw;
    };
    auto precond = [mu](const ComplexField& w) { return helmholtz_inverse(w, mu); };
    const KrylovResult kr = minres(op, -1.0 * r, precond, 1e-10, 200);
    if (!all_finite(kr.x)) return false;
    double step = 1.0;
    const double before = std::sqrt(l2_norm_sq(r));
    for (int tries = 0; tries < 8; ++tries) {
        ComplexField trial = eta + step * kr.x;
        symmetrize_even_real(trial);
        const double after = std::sqrt(l2_norm_sq(stationary_residual(nl, trial, mu)));
        if (after < before) {
            eta = std::move(trial);
            res_norm = after;
            return true;
        }
        step *= 0.5;
    }
    return false;
}

ComplexField solve_profile_field(const Nonlinearity& nl, double mu, const Grid& grid,
                                 const SolverOptions& opts, const ComplexField* warm_start,
                                 double& res_out) {
    ComplexField eta(grid);
    if (warm_start && warm_start->grid == grid) {
        eta = *warm_start;
    } else {
        // sech-shaped initial guess with the 1D-cubic amplitude scaling
        const double amp =
            (nl.kind() == NonlinearityKind::local_power)
                ? std::pow((nl.s() + 2.0) * mu / (2.0 * nl.lambda()), 1.0 / nl.s())
                : std::sqrt(2.0 * mu / nl.lambda());
        const double root_mu = std::sqrt(mu);
        for (std::size_t p = 0; p < eta.size(); ++p) {
            const auto idx = grid.unravel(p);
            double r2 = 0.0;
            for (int d = 0; d < grid.dim; ++d) {
                const double x = grid.coord(idx[d]);
                r2 += x * x;
            }
            eta[p] = cplx{amp / std::cosh(root_mu * std::sqrt(r2)), 0.0};
        }
    }
    symmetrize_even_real(eta);

    // Stabilized fixed point eta <- gamma^alpha (-Lap+mu)^-1 f(eta)
    // (spectrally preconditioned normalized gradient flow at unit step).
    const double p_deg = nl.power_degree();
    const double alpha = p_deg / (p_deg - 1.0);
    double res = std::numeric_limits<double>::infinity();
    double res_prev = res;
    int stall = 0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        const ComplexField feta = nl.f_eval(eta);
        double num = 0.0;
        {
            std::vector<cplx> hat = eta.values;
            fft_forward(grid, hat);
            const double w = std::pow(grid.spacing(), grid.dim) / static_cast<double>(grid.size());
            for (std::size_t p = 0; p < hat.size(); ++p) {
                const auto idx = grid.unravel(p);
                double k2 = 0.0;
                for (int d = 0; d < grid.dim; ++d) {
                    const double k = grid.wavenumber(idx[d]);
                    k2 += k * k;
                }
                num += (k2 + mu) * std::norm(hat[p]) * w;
            }
        }
        const double den = inner_product(eta, feta);
        if (den <= 0.0) throw error("solve_profile: degenerate iterate");
        const double gamma = num / den;
        eta = helmholtz_inverse(feta, mu);
        const double g = std::pow(gamma, alpha);
        for (auto& z : eta.values) z *= g;
        symmetrize_even_real(eta);

        res = std::sqrt(l2_norm_sq(stationary_residual(nl, eta, mu))) /
              std::sqrt(l2_norm_sq(eta));
        if (res <= opts.tolerance) break;
        if (res > 0.9 * res_prev) {
            if (++stall >= 8) break;  // converged to the roundoff floor or stuck
        } else {
            stall = 0;
        }
        res_prev = res;
    }

    if (res > opts.tolerance && opts.newton_polish) {
        double rn = res * std::sqrt(l2_norm_sq(eta));
        for (int k = 0; k < 5; ++k) {
            const double before = rn;
            if (!newton_step(nl, eta, mu, rn)) break;
            res = rn / std::sqrt(l2_norm_sq(eta));
            if (res <= opts.tolerance || rn > before / 1.5) break;
        }
    }
    res_out = std::sqrt(l2_norm_sq(stationary_residual(nl, eta, mu)));
    return eta;
}

double mass_of(const ComplexField& eta) { return 0.5 * l2_norm_sq(eta); }

}  // namespace

ComplexField cubic_soliton_1d(double mu, double lambda, const Grid& grid) {
    if (grid.dim != 1) throw error("cubic_soliton_1d: grid must be 1D");
    ComplexField eta(grid);
    const double amp = std::sqrt(2.0 * mu / lambda);
    const double root_mu = std::sqrt(mu);
    for (int i = 0; i < grid.points; ++i)
        eta[i] = cplx{amp / std::cosh(root_mu * grid.coord(i)), 0.0};
    return eta;
}

SolitonProfile solve_profile(const Nonlinearity& nl, double mu, const Grid& grid,
                             const SolverOptions& opts) {
    if (mu <= 0.0) throw error("solve_profile: mu must be positive");

    SolitonProfile prof;
    prof.mu = mu;
    prof.eta = solve_profile_field(nl, mu, grid, opts, nullptr, prof.residual);
    const double l2 = std::sqrt(l2_norm_sq(prof.eta));
    if (prof.residual > 1e-8 * l2)
        throw error("solve_profile: no convergence, residual " + std::to_string(prof.residual));
    // positivity up to roundoff: exponential tails fall below the noise floor
    // on wide boxes, so only negative values above it count as a failure
    const double floor = -1e-13 * max_abs(prof.eta);
    for (const auto& z : prof.eta.values)
        if (z.real() < floor) throw error("solve_profile: profile not positive");
    prof.mass = mass_of(prof.eta);

    prof.delta_mu = opts.delta_mu_rel * mu;
    double res_p = 0.0, res_m = 0.0;
    prof.eta_plus = solve_profile_field(nl, mu + prof.delta_mu, grid, opts, &prof.eta, res_p);
    prof.eta_minus = solve_profile_field(nl, mu - prof.delta_mu, grid, opts, &prof.eta, res_m);
    prof.mass_slope = (mass_of(prof.eta_plus) - mass_of(prof.eta_minus)) / (2.0 * prof.delta_mu);
    if (prof.mass_slope <= 0.0)
        throw error("solve_profile: mass slope m'(mu) <= 0, orbital stability violated");
    return prof;
}

std::pair<double, double> mass_and_slope(const SolitonProfile& profile) {
    return {profile.mass, profile.mass_slope};
}

TangentBasis tangent_basis(const SolitonProfile& profile) {
    const Grid& g = profile.eta.grid;
    TangentBasis basis;
    basis.dim = g.dim;
    basis.fields.reserve(2 * g.dim + 2);
    for (int d = 0; d < g.dim; ++d)
        basis.fields.push_back(-1.0 * spectral_derivative(profile.eta, d));  // e_t
    for (int d = 0; d < g.dim; ++d) {
        ComplexField eb = multiply(coordinate_field(g, d), profile.eta);    // x eta
        basis.fields.push_back(cplx{0.0, 1.0} * eb);                        // e_b = i x eta
    }
    basis.fields.push_back(cplx{0.0, 1.0} * profile.eta);                   // e_g = i eta
    ComplexField es(g);
    const double inv = 1.0 / (2.0 * profile.delta_mu);
    for (std::size_t i = 0; i < es.size(); ++i)
        es[i] = cplx{(profile.eta_plus[i].real() - profile.eta_minus[i].real()) * inv, 0.0};
    basis.fields.push_back(std::move(es));                                  // e_s
    return basis;
}

ComplexField apply_linearization(const SolitonProfile& profile, const Nonlinearity& nl,
                                 const ComplexField& w) {
    ComplexField lw = spectral_laplacian(w);
    const ComplexField fw = nl.f_prime_apply(profile.eta, w);
    for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = -lw[i] + profile.mu * w[i] - fw[i];
    return lw;
}

SmallMatrix omega_inv_matrix(const SolitonProfile& profile, const TangentBasis& basis) {
    (void)profile;
    const int n = basis.size();
    SmallMatrix m(n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) m(j, k) = symplectic_form(basis.fields[j], basis.fields[k]);
    if (condition_inf(m) > 1e12)
        throw error("omega_inv_matrix: numerically singular (condition > 1e12)");
    return m;
}

ComplexField eta_sigma(const SolitonProfile& profile, const ModulationParams& sigma,
                       const Grid& grid) {
    if (grid != profile.eta.grid) throw error("eta_sigma: grid mismatch with profile");
    return apply_transform(profile.eta, sigma.transform());
}

void write_profile_snapshot(const std::string& path, const SolitonProfile& profile,
                            const Nonlinearity& nl) {
    Snapshot snap;
    snap.field = profile.eta;
    snap.time = 0.0;
    snap.metadata = {{"mu", profile.mu},
                     {"lambda", nl.lambda()},
                     {"s", nl.kind() == NonlinearityKind::local_power ? nl.s() : 0.0},
                     {"residual", profile.residual},
                     {"mass", profile.mass},
                     {"mass_slope", profile.mass_slope}};
    write_snapshot(path, snap);
}

// -- ProfileLibrary -------------------------------------------------------------

struct ProfileLibrary::Impl {
    std::mutex mutex;
    std::map<double, std::shared_ptr<const Entry>> cache;
};

ProfileLibrary::ProfileLibrary(Nonlinearity nl, Grid grid, SolverOptions opts)
    : impl_(std::make_shared<Impl>()), nl_(std::move(nl)), grid_(grid), opts_(opts) {}

std::shared_ptr<const ProfileLibrary::Entry> ProfileLibrary::get(double mu) const {
    {
        std::lock_guard<std::mutex> lock(impl_->mutex);
        auto it = impl_->cache.find(mu);
        if (it != impl_->cache.end()) return it->second;
    }
    auto entry = std::make_shared<Entry>();
    entry->profile = solve_profile(nl_, mu, grid_, opts_);
    entry->basis = tangent_basis(entry->profile);
    std::lock_guard<std::mutex> lock(impl_->mutex);
    auto [it, inserted] = impl_->cache.emplace(mu, std::move(entry));
    if (impl_->cache.size() > 64) {
        auto victim = impl_->cache.begin();
        if (victim == it) ++victim;
        impl_->cache.erase(victim);
    }
    return it->second;
}

}  // namespace solab
