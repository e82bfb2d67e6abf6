#include "solab/decompose.hpp"

#include <algorithm>
#include <cmath>

#include "solab/csv.hpp"
#include "solab/krylov.hpp"

namespace solab {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> pack_sigma(const ModulationParams& s) {
    std::vector<double> x;
    x.reserve(2 * s.dim() + 2);
    x.insert(x.end(), s.a.begin(), s.a.end());
    x.insert(x.end(), s.v.begin(), s.v.end());
    x.push_back(s.gamma);
    x.push_back(s.mu);
    return x;
}

ModulationParams unpack_sigma(const std::vector<double>& x, int dim) {
    ModulationParams s;
    s.a.assign(x.begin(), x.begin() + dim);
    s.v.assign(x.begin() + dim, x.begin() + 2 * dim);
    s.gamma = x[2 * dim];  // kept unreduced during Newton
    s.mu = x[2 * dim + 1];
    return s;
}

/// G_k(sigma) = <T^-1 psi - eta_mu, i z_k(mu)>, k = 1..2N+2.
std::vector<double> constraint_values(const ComplexField& psi, const std::vector<double>& x,
                                      int dim, const ProfileLibrary& library) {
    const ModulationParams s = unpack_sigma(x, dim);
    auto entry = library.get(s.mu);
    const ComplexField u = inverse_transform(psi, TransformParams(s.a, s.v, s.gamma));
    const ComplexField w = u - entry->profile.eta;
    std::vector<double> g(entry->basis.size());
    for (int k = 0; k < entry->basis.size(); ++k)
        g[k] = -symplectic_form(entry->basis.fields[k], w);  // <w, i z_k> = omega(z_k, w) * (-1)
    return g;
}

double norm_inf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double norm_2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

Decomposition skew_project(const ComplexField& psi, const ModulationParams& sigma_guess,
                           const ProfileLibrary& library, const DecomposeOptions& opts) {
    const int dim = psi.grid.dim;
    if (sigma_guess.dim() != dim) throw error("skew_project: sigma dimension mismatch");
    const int n = 2 * dim + 2;
    const double tol = opts.tol_factor * std::sqrt(l2_norm_sq(psi));

    // profile solver failures while Newton explores (mu driven far off, no
    // ground state resolvable) mean the field is not in the tube
    auto constraints_or_tube = [&](const std::vector<double>& x) {
        if (x[2 * dim + 1] < opts.mu_min || x[2 * dim + 1] > opts.mu_max)
            throw NotInTube(std::numeric_limits<double>::infinity());
        try {
            return constraint_values(psi, x, dim, library);
        } catch (const error&) {
            throw NotInTube(std::numeric_limits<double>::infinity());
        }
    };

    std::vector<double> x = pack_sigma(sigma_guess);
    std::vector<double> g = constraints_or_tube(x);
    double gnorm = norm_2(g);
    bool converged = norm_inf(g) <= tol;

    for (int it = 0; it < opts.max_iterations && !converged; ++it) {
        // centered finite-difference Jacobian
        SmallMatrix J(n);
        for (int col = 0; col < n; ++col) {
            std::vector<double> xp = x, xm = x;
            xp[col] += opts.jacobian_step;
            xm[col] -= opts.jacobian_step;
            const auto gp = constraints_or_tube(xp);
            const auto gm = constraints_or_tube(xm);
            for (int row = 0; row < n; ++row)
                J(row, col) = (gp[row] - gm[row]) / (2.0 * opts.jacobian_step);
        }
        std::vector<double> rhs(n);
        for (int k = 0; k < n; ++k) rhs[k] = -g[k];
        std::vector<double> delta;
        try {
            delta = solve_dense(J, rhs);
        } catch (const std::runtime_error&) {
            throw NotInTube(gnorm);
        }

        // damping by halving until ||G|| decreases; failed trials count as
        // non-decreasing
        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half < 12; ++half) {
            std::vector<double> trial = x;
            for (int k = 0; k < n; ++k) trial[k] += lambda * delta[k];
            if (trial[2 * dim + 1] >= opts.mu_min && trial[2 * dim + 1] <= opts.mu_max) {
                std::vector<double> gt;
                bool ok = true;
                try {
                    gt = constraint_values(psi, trial, dim, library);
                } catch (const error&) {
                    ok = false;
                }
                if (ok) {
                    const double gt_norm = norm_2(gt);
                    if (gt_norm < gnorm) {
                        x = std::move(trial);
                        g = std::move(gt);
                        gnorm = gt_norm;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if (!accepted) throw NotInTube(gnorm);
        converged = norm_inf(g) <= tol;
    }
    if (!converged) throw NotInTube(gnorm);

    Decomposition d;
    d.sigma = unpack_sigma(x, dim);
    d.sigma.gamma = reduce_mod_2pi(d.sigma.gamma);
    auto entry = library.get(d.sigma.mu);
    const ComplexField u =
        inverse_transform(psi, TransformParams(d.sigma.a, d.sigma.v, d.sigma.gamma));
    d.w = u - entry->profile.eta;
    d.w_h1 = std::sqrt(h1_norm_sq(d.w));
    d.constraint_residual = norm_inf(g);
    d.converged = true;
    d.tube_warning = d.w_h1 > opts.tube_delta;
    return d;
}

AlphaSeries alpha_from_trajectory(const std::vector<double>& times,
                                  const std::vector<ModulationParams>& sigmas,
                                  const Potential& potential) {
    const std::size_t n = times.size();
    if (n != sigmas.size()) throw error("alpha_from_trajectory: length mismatch");
    if (n < 3) throw error("alpha_from_trajectory: need at least 3 samples");
    const int dim = sigmas.front().dim();

    // unwrap gamma: remove 2 pi jumps so dgamma/dt is well defined
    std::vector<double> gamma(n);
    gamma[0] = sigmas[0].gamma;
    for (std::size_t i = 1; i < n; ++i) {
        double dg = sigmas[i].gamma - sigmas[i - 1].gamma;
        dg -= 2.0 * kPi * std::round(dg / (2.0 * kPi));
        gamma[i] = gamma[i - 1] + dg;
    }

    auto ddt = [&](auto&& get, std::size_t i) -> double {
        if (i == 0)
            return (-3.0 * get(0) + 4.0 * get(1) - get(2)) / (2.0 * (times[1] - times[0]));
        if (i == n - 1)
            return (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3)) /
                   (2.0 * (times[n - 1] - times[n - 2]));
        return (get(i + 1) - get(i - 1)) / (times[i + 1] - times[i - 1]);
    };

    AlphaSeries series;
    series.samples.resize(n);
    double max_alpha = 0.0, max_diff_scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        AlphaSample& smp = series.samples[i];
        smp.t = times[i];
        smp.alpha.assign(2 * dim + 2, 0.0);
        const ModulationParams& s = sigmas[i];
        std::vector<double> da(dim), dv(dim);
        for (int d = 0; d < dim; ++d) {
            da[d] = ddt([&](std::size_t j) { return sigmas[j].a[d]; }, i);
            dv[d] = ddt([&](std::size_t j) { return sigmas[j].v[d]; }, i);
        }
        const double dgamma = ddt([&](std::size_t j) { return gamma[j]; }, i);
        const double dmu = ddt([&](std::size_t j) { return sigmas[j].mu; }, i);

        const auto gv = potential.grad(times[i], s.a);
        double v2 = 0.0, dav = 0.0;
        for (int d = 0; d < dim; ++d) {
            v2 += s.v[d] * s.v[d];
            dav += da[d] * s.v[d];
            smp.alpha[d] = da[d] - s.v[d];
            smp.alpha[dim + d] = -0.5 * dv[d] - gv[d];
        }
        smp.alpha[2 * dim] =
            s.mu - 0.25 * v2 + 0.5 * dav - potential.eval(times[i], s.a) - dgamma;
        smp.alpha[2 * dim + 1] = -dmu;
        smp.sup_norm = norm_inf(smp.alpha);
        max_alpha = std::max(max_alpha, smp.sup_norm);
    }

    // differencing error estimate from third differences of every parameter
    // series (near-Nyquist aliasing shows up strongest there); when it rivals
    // |alpha| the residuals are differencing artifacts rather than dynamics
    auto scan_series = [&](auto&& get) {
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const double d3 = get(i + 1) - 3.0 * get(i) + 3.0 * get(i - 1) - get(i - 2);
            const double dt = times[i + 1] - times[i];
            if (dt > 0.0) max_diff_scale = std::max(max_diff_scale, std::abs(d3) / (6.0 * dt));
        }
    };
    scan_series([&](std::size_t i) { return gamma[i]; });
    scan_series([&](std::size_t i) { return sigmas[i].mu; });
    for (int d = 0; d < dim; ++d) {
        scan_series([&](std::size_t i) { return sigmas[i].a[d]; });
        scan_series([&](std::size_t i) { return sigmas[i].v[d]; });
    }
    double gamma_span = 0.0;
    for (double gv : gamma) gamma_span = std::max(gamma_span, std::abs(gv - gamma.front()));
    const double floor = 1e-9 * std::max(1.0, gamma_span);
    series.sampling_warning = max_diff_scale > std::max(0.25 * max_alpha, floor);
    return series;
}

EffectiveRhs corrected_rhs(const Decomposition& decomp, double t, const Potential& potential,
                           const ProfileLibrary& library) {
    if (!decomp.converged) throw error("corrected_rhs: decomposition not converged");
    const int dim = decomp.sigma.dim();
    const int n = 2 * dim + 2;
    auto entry = library.get(decomp.sigma.mu);
    const SolitonProfile& prof = entry->profile;
    const TangentBasis& basis = entry->basis;
    const Nonlinearity& nl = library.nonlinearity();
    const ComplexField& eta = prof.eta;
    const ComplexField& w = decomp.w;
    const Grid& grid = eta.grid;

    // N_mu(w) = f(eta + w) - f(eta) - f'(eta) w
    const ComplexField N_w = nl.f_eval(eta + w) - nl.f_eval(eta) - nl.f_prime_apply(eta, w);
    const ComplexField rv = potential.rv_residual(t, decomp.sigma.a, grid);
    const ComplexField rv_total = multiply(rv, eta + w);  // R_V (eta + w)

    // b_k = <e_k, N_mu(w) + R_V (eta + w)>
    std::vector<double> b(n);
    for (int k = 0; k < n; ++k) b[k] = inner_product(basis.fields[k], N_w + rv_total);

    // generators applied to eta: L_j eta = [d_j eta, i x_j eta, i eta, d_mu eta]
    std::vector<ComplexField> L_eta;
    L_eta.reserve(n);
    for (int d = 0; d < dim; ++d) L_eta.push_back(spectral_derivative(eta, d));
    for (int d = 0; d < dim; ++d) L_eta.push_back(basis.e_b(d));  // i x eta
    L_eta.push_back(basis.e_g());                                 // i eta
    L_eta.push_back(basis.e_s());                                 // d_mu eta

    // A_kj = omega(L_j eta, e_k)
    SmallMatrix A(n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) A(k, j) = symplectic_form(L_eta[j], basis.fields[k]);

    // C_kj = <w, i L_j e_k>; d/dmu of basis fields from the stored profiles
    const double inv_dmu2 = 1.0 / (prof.delta_mu * prof.delta_mu);
    ComplexField es_prime(grid);  // d2 eta / dmu2 (second difference)
    for (std::size_t i = 0; i < es_prime.size(); ++i)
        es_prime[i] = cplx{(prof.eta_plus[i].real() - 2.0 * eta[i].real() +
                            prof.eta_minus[i].real()) *
                               inv_dmu2,
                           0.0};
    const ComplexField& es = basis.e_s();

    auto dmu_of_basis = [&](int k) -> ComplexField {
        if (k < dim) return -1.0 * spectral_derivative(es, k);                    // d_mu e_t
        if (k < 2 * dim)
            return cplx{0.0, 1.0} * multiply(coordinate_field(grid, k - dim), es);  // d_mu e_b
        if (k == 2 * dim) return cplx{0.0, 1.0} * es;                              // d_mu e_g
        return es_prime;                                                           // d_mu e_s
    };

    SmallMatrix C(n);
    for (int k = 0; k < n; ++k) {
        const ComplexField& ek = basis.fields[k];
        for (int j = 0; j < n; ++j) {
            ComplexField Lek(grid);
            if (j < dim) {
                Lek = spectral_derivative(ek, j);
            } else if (j < 2 * dim) {
                Lek = cplx{0.0, 1.0} * multiply(coordinate_field(grid, j - dim), ek);
            } else if (j == 2 * dim) {
                Lek = cplx{0.0, 1.0} * ek;
            } else {
                Lek = dmu_of_basis(k);
            }
            // <w, i L_j e_k> = -omega(L_j e_k, w)
            C(k, j) = -symplectic_form(Lek, w);
        }
    }

    // two fixed-point sweeps from alpha = 0: alpha <- A^-1 (b + C alpha)
    std::vector<double> alpha(n, 0.0), alpha_prev(n, 0.0);
    double step0 = 0.0, step1 = 0.0;
    for (int sweep = 0; sweep < 2; ++sweep) {
        std::vector<double> rhs = b;
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) rhs[k] += C(k, j) * alpha[j];
        alpha_prev = alpha;
        alpha = solve_dense(A, rhs);
        double step = 0.0;
        for (int k = 0; k < n; ++k) step = std::max(step, std::abs(alpha[k] - alpha_prev[k]));
        (sweep == 0 ? step0 : step1) = step;
    }
    if (step1 > step0 && step0 > 0.0)
        throw error("corrected_rhs: fixed-point sweeps diverge (fluctuation too large)");

    // map alpha back to parameter derivatives
    EffectiveRhs r;
    r.da.resize(dim);
    r.dv.resize(dim);
    const auto gv = potential.grad(t, decomp.sigma.a);
    double v2 = 0.0, dav = 0.0;
    for (int d = 0; d < dim; ++d) {
        r.da[d] = decomp.sigma.v[d] + alpha[d];
        r.dv[d] = -2.0 * (alpha[dim + d] + gv[d]);
        v2 += decomp.sigma.v[d] * decomp.sigma.v[d];
        dav += r.da[d] * decomp.sigma.v[d];
    }
    r.dgamma = decomp.sigma.mu - 0.25 * v2 + 0.5 * dav -
               potential.eval(t, decomp.sigma.a) - alpha[2 * dim];
    r.dmu = -alpha[2 * dim + 1];
    return r;
}

double energy_functional(const ComplexField& u, double mu, const Nonlinearity& nl) {
    const double grad_sq = h1_norm_sq(u) - l2_norm_sq(u);
    return 0.5 * (grad_sq + mu * l2_norm_sq(u)) - nl.F_eval(u);
}

double lyapunov_value(const Decomposition& decomp, const ProfileLibrary& library) {
    if (!decomp.converged) throw error("lyapunov_value: decomposition not converged");
    auto entry = library.get(decomp.sigma.mu);
    const Nonlinearity& nl = library.nonlinearity();
    return energy_functional(entry->profile.eta + decomp.w, decomp.sigma.mu, nl) -
           energy_functional(entry->profile.eta, decomp.sigma.mu, nl);
}

ComplexField project_skew_orthogonal(const ComplexField& w, const TangentBasis& basis) {
    const int n = basis.size();
    // constraint directions i z_k; Gram once per call (fields are small)
    std::vector<ComplexField> dirs;
    dirs.reserve(n);
    for (int k = 0; k < n; ++k) dirs.push_back(cplx{0.0, 1.0} * basis.fields[k]);
    SmallMatrix gram(n);
    std::vector<double> rhs(n);
    for (int j = 0; j < n; ++j) {
        rhs[j] = inner_product(w, dirs[j]);
        for (int k = 0; k < n; ++k) gram(j, k) = inner_product(dirs[k], dirs[j]);
    }
    const auto beta = solve_dense(gram, rhs);
    ComplexField out = w;
    for (int k = 0; k < n; ++k)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= beta[k] * dirs[k][i];
    return out;
}

double coercivity_quadform(const ComplexField& w, const SolitonProfile& profile,
                           const Nonlinearity& nl, const TangentBasis& basis) {
    const ComplexField wp = project_skew_orthogonal(w, basis);
    return inner_product(wp, apply_linearization(profile, nl, wp));
}

double rho_estimate(const SolitonProfile& profile, const Nonlinearity& nl,
                    const TangentBasis& basis) {
    const Grid& grid = profile.eta.grid;
    const double mu = profile.mu;

    // Substitute y = B^{1/2} w with B = 1 - Lap (so <y,y> = ||w||_H1^2); the
    // generalized problem becomes a standard one for At = B^-1/2 L B^-1/2 on
    // the complement of g_k = B^-1/2 (i z_k).
    auto b_half_inv = [](const ComplexField& u) {
        return spectral_multiplier(u, [](double k2) { return 1.0 / std::sqrt(1.0 + k2); });
    };
    auto At = [&](const ComplexField& y) {
        return b_half_inv(apply_linearization(profile, nl, b_half_inv(y)));
    };

    const int n = basis.size();
    std::vector<ComplexField> g;
    g.reserve(n);
    for (int k = 0; k < n; ++k) g.push_back(b_half_inv(cplx{0.0, 1.0} * basis.fields[k]));
    SmallMatrix gram(n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) gram(j, k) = inner_product(g[k], g[j]);
    auto project = [&](const ComplexField& y) {
        std::vector<double> rhs(n);
        for (int j = 0; j < n; ++j) rhs[j] = inner_product(y, g[j]);
        const auto beta = solve_dense(gram, rhs);
        ComplexField out = y;
        for (int k = 0; k < n; ++k)
            for (std::size_t i = 0; i < out.size(); ++i) out[i] -= beta[k] * g[k][i];
        return out;
    };
    auto precond = [&](const ComplexField& y) {
        // inverse of B^-1/2 (-Lap + mu) B^-1/2
        return spectral_multiplier(y, [mu](double k2) { return (1.0 + k2) / (k2 + mu); });
    };

    // smooth deterministic seed, projected
    ComplexField y(grid);
    for (std::size_t p = 0; p < y.size(); ++p) {
        const auto idx = grid.unravel(p);
        double r2 = 0.0, x0 = 0.0;
        for (int d = 0; d < grid.dim; ++d) {
            const double x = grid.coord(idx[d]);
            r2 += x * x;
            if (d == 0) x0 = x;
        }
        y[p] = cplx{std::exp(-0.3 * r2) * (1.0 + 0.3 * x0), std::exp(-0.5 * r2) * x0};
    }
    y = project(y);

    double rho = 0.0, rho_prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        auto op = [&](const ComplexField& u) { return At(u); };
        const KrylovResult kr =
            conjugate_gradient(op, y, precond, project, 1e-10, 500);
        ComplexField z = project(kr.x);
        const double norm = std::sqrt(l2_norm_sq(z));
        if (norm == 0.0) throw error("rho_estimate: inverse iteration collapsed");
        y = (1.0 / norm) * z;
        rho = inner_product(y, At(y)) / l2_norm_sq(y);
        if (std::abs(rho - rho_prev) <= 1e-8 * std::abs(rho)) break;
        rho_prev = rho;
    }
    if (rho <= 0.0) throw error("rho_estimate: coercivity constant not positive");
    return rho;
}

double frame_energy_identity_check(const ComplexField& psi, const Decomposition& decomp,
                                   const NlsModel& model, double t) {
    if (!decomp.converged) throw error("frame_energy_identity_check: not converged");
    const ModulationParams& s = decomp.sigma;
    const ComplexField u = inverse_transform(psi, TransformParams(s.a, s.v, s.gamma));
    const double lhs = energy_functional(u, s.mu, model.nonlinearity);

    const Grid& g = psi.grid;
    const ComplexField V = model.potential.sample(t, g);
    const double w = std::pow(g.spacing(), g.dim);
    double pot = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) pot += V[i].real() * std::norm(psi[i]);
    const double grad_sq = h1_norm_sq(psi) - l2_norm_sq(psi);
    const double h_v = 0.5 * (grad_sq + pot * w) - model.nonlinearity.F_eval(psi);

    double v2 = 0.0;
    for (double vd : s.v) v2 += vd * vd;
    const auto P = momentum(psi);  // <psi, -i grad psi> = <i psi, grad psi>
    double vP = 0.0;
    for (int d = 0; d < g.dim; ++d) vP += s.v[d] * P[d];

    const double rhs = h_v + 0.5 * (0.25 * v2 + s.mu) * l2_norm_sq(psi) - 0.5 * vP -
                       0.5 * pot * w;
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

void write_decomposition_csv(const std::string& path,
                             const std::vector<DecompositionSample>& series, int dim) {
    CsvWriter csv(path);
    std::vector<std::string> cols = {"t"};
    for (int d = 1; d <= dim; ++d) cols.push_back("a_" + std::to_string(d));
    for (int d = 1; d <= dim; ++d) cols.push_back("v_" + std::to_string(d));
    cols.insert(cols.end(), {"gamma", "mu", "w_h1", "constraint_residual"});
    for (int k = 1; k <= 2 * dim + 2; ++k) cols.push_back("alpha_" + std::to_string(k));
    cols.push_back("lyapunov");
    csv.header(cols);
    for (const auto& smp : series) {
        std::vector<double> row = {smp.t};
        for (int d = 0; d < dim; ++d) row.push_back(smp.decomposition.sigma.a[d]);
        for (int d = 0; d < dim; ++d) row.push_back(smp.decomposition.sigma.v[d]);
        row.insert(row.end(),
                   {smp.decomposition.sigma.gamma, smp.decomposition.sigma.mu,
                    smp.decomposition.w_h1, smp.decomposition.constraint_residual});
        for (int k = 0; k < 2 * dim + 2; ++k)
            row.push_back(k < static_cast<int>(smp.alpha.size()) ? smp.alpha[k] : 0.0);
        row.push_back(smp.lyapunov);
        csv.row(row);
    }
}

}  // namespace solab
