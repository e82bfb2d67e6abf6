#include "solab/krylov.hpp"

#include <cmath>

namespace solab {

namespace {
ComplexField axpy(double alpha, const ComplexField& x, const ComplexField& y) {
    ComplexField r(x.grid);
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = alpha * x[i] + y[i];
    return r;
}
}  // namespace

KrylovResult conjugate_gradient(const FieldOp& A, const ComplexField& b, const FieldOp& precond,
                                const FieldOp& project, double rel_tol, int max_iter) {
    auto P = [&](const ComplexField& u) { return project ? project(u) : u; };
    auto M = [&](const ComplexField& u) { return precond ? P(precond(u)) : P(u); };

    KrylovResult res;
    const ComplexField b_proj = P(b);
    const double bnorm = std::sqrt(l2_norm_sq(b_proj));
    res.x = ComplexField(b.grid);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    ComplexField r = b_proj;
    ComplexField z = M(r);
    ComplexField p = z;
    double rz = inner_product(r, z);
    for (int it = 0; it < max_iter; ++it) {
        const ComplexField Ap = P(A(p));
        const double pAp = inner_product(p, Ap);
        if (pAp <= 0.0) break;  // lost positivity; return best iterate
        const double alpha = rz / pAp;
        res.x = axpy(alpha, p, res.x);
        r = axpy(-alpha, Ap, r);
        res.iterations = it + 1;
        const double rnorm = std::sqrt(l2_norm_sq(r));
        res.residual = rnorm / bnorm;
        if (res.residual <= rel_tol) {
            res.converged = true;
            return res;
        }
        z = M(r);
        const double rz_new = inner_product(r, z);
        p = axpy(rz_new / rz, p, z);
        rz = rz_new;
    }
    return res;
}

KrylovResult minres(const FieldOp& A, const ComplexField& b, const FieldOp& precond,
                    double rel_tol, int max_iter) {
    // Preconditioned MINRES as in Elman, Silvester & Wathen; the tracked
    // quantity |eta| is the residual norm in the preconditioner inner product.
    auto M = [&](const ComplexField& u) { return precond ? precond(u) : u; };

    KrylovResult res;
    res.x = ComplexField(b.grid);

    ComplexField v_old(b.grid);  // v_0 = 0
    ComplexField v = b;          // v_1 = b - A x0, x0 = 0
    ComplexField z = M(v);
    double gamma2 = inner_product(z, v);
    if (gamma2 <= 0.0) {
        res.converged = (gamma2 == 0.0);
        return res;
    }
    double gamma = std::sqrt(gamma2);
    double gamma_old = 1.0;
    const double gamma1 = gamma;
    double eta = gamma;
    double s = 0.0, s_old = 0.0, c = 1.0, c_old = 1.0;
    ComplexField w(b.grid), w_old(b.grid);

    for (int it = 0; it < max_iter; ++it) {
        ComplexField zn = (1.0 / gamma) * z;
        const ComplexField Az = A(zn);
        const double delta = inner_product(Az, zn);
        ComplexField v_new = axpy(-delta / gamma, v, Az);
        if (it > 0) v_new = axpy(-gamma / gamma_old, v_old, v_new);
        ComplexField z_new = M(v_new);
        double g2 = inner_product(z_new, v_new);
        if (g2 < 0.0) g2 = 0.0;
        const double gamma_new = std::sqrt(g2);

        const double a0 = c * delta - c_old * s * gamma;
        const double a1 = std::hypot(a0, gamma_new);
        const double a2 = s * delta + c_old * c * gamma;
        const double a3 = s_old * gamma;
        if (a1 == 0.0) break;
        c_old = c;
        s_old = s;
        c = a0 / a1;
        s = gamma_new / a1;

        ComplexField w_new(b.grid);
        for (std::size_t i = 0; i < w_new.size(); ++i)
            w_new[i] = (zn[i] - a3 * w_old[i] - a2 * w[i]) / a1;
        res.x = axpy(c * eta, w_new, res.x);
        eta = -s * eta;

        w_old = w;
        w = w_new;
        v_old = v;
        v = v_new;
        z = z_new;
        gamma_old = gamma;
        gamma = gamma_new;

        res.iterations = it + 1;
        res.residual = std::abs(eta) / gamma1;
        if (res.residual <= rel_tol) {
            res.converged = true;
            return res;
        }
        if (gamma == 0.0) break;
    }
    return res;
}

}  // namespace solab
