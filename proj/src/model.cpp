#include "solab/model.hpp"

#include <algorithm>
#include <cmath>

#include "solab/fourier.hpp"

namespace solab {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> coords_of(const Grid& g, std::size_t p) {
    const auto idx = g.unravel(p);
    std::vector<double> x(g.dim);
    for (int d = 0; d < g.dim; ++d) x[d] = g.coord(idx[d]);
    return x;
}
}  // namespace

// -- Nonlinearity -------------------------------------------------------------

Nonlinearity Nonlinearity::local_power(double lambda, double s, int dim) {
    if (lambda <= 0.0) throw error("Nonlinearity: lambda must be positive");
    if (s <= 0.0 || s >= 4.0 / dim)
        throw error("Nonlinearity: subcriticality requires 0 < s < 4/N");
    Nonlinearity nl;
    nl.kind_ = NonlinearityKind::local_power;
    nl.lambda_ = lambda;
    nl.s_ = s;
    nl.dim_ = dim;
    return nl;
}

Nonlinearity Nonlinearity::hartree(double lambda, int dim, std::function<double(double)> kernel) {
    if (lambda <= 0.0) throw error("Nonlinearity: lambda must be positive");
    Nonlinearity nl;
    nl.kind_ = NonlinearityKind::hartree;
    nl.lambda_ = lambda;
    nl.dim_ = dim;
    if (kernel) {
        nl.kernel_ = std::move(kernel);
    } else {
        const double width = 1.0;
        const double norm = std::pow(2.0 * kPi * width * width, -0.5 * dim);
        nl.kernel_ = [norm, width](double r) { return norm * std::exp(-0.5 * r * r / (width * width)); };
    }
    return nl;
}

double Nonlinearity::power_degree() const {
    return kind_ == NonlinearityKind::local_power ? s_ + 1.0 : 3.0;
}

const ComplexField& Nonlinearity::kernel_on(const Grid& g) const {
    if (kind_ != NonlinearityKind::hartree) throw error("kernel_on: not a hartree nonlinearity");
    if (!kernel_cache_ || kernel_cache_->grid != g) {
        // Sampled in index-offset (wrap) order, peak at index 0, so that the
        // spectral product implements sum_m rho[m] W(x_n - x_m) directly.
        ComplexField W(g);
        for (std::size_t p = 0; p < W.size(); ++p) {
            const auto idx = g.unravel(p);
            double r2 = 0.0;
            for (int d = 0; d < g.dim; ++d) {
                const int wrapped = idx[d] <= g.points / 2 ? idx[d] : idx[d] - g.points;
                const double x = wrapped * g.spacing();
                r2 += x * x;
            }
            W[p] = cplx{kernel_(std::sqrt(r2)), 0.0};
        }
        kernel_cache_ = std::make_shared<ComplexField>(std::move(W));
    }
    return *kernel_cache_;
}

ComplexField Nonlinearity::convolve_kernel(const ComplexField& rho) const {
    // (W * rho)(x) = int W(x - y) rho(y) dy computed spectrally; the kernel is
    // even so the paper's f*g(x) = int f(y-x) g(y) dy coincides with this.
    const ComplexField& W = kernel_on(rho.grid);
    std::vector<cplx> what = W.values;
    std::vector<cplx> rhat = rho.values;
    fft_forward(rho.grid, what);
    fft_forward(rho.grid, rhat);
    const double scale = std::pow(rho.grid.spacing(), rho.grid.dim) /
                         static_cast<double>(rho.grid.size());
    for (std::size_t p = 0; p < rhat.size(); ++p) rhat[p] *= what[p] * scale;
    fft_backward(rho.grid, rhat);
    return ComplexField(rho.grid, std::move(rhat));
}

ComplexField Nonlinearity::f_eval(const ComplexField& u) const {
    ComplexField r(u.grid);
    if (kind_ == NonlinearityKind::local_power) {
        for (std::size_t i = 0; i < u.size(); ++i)
            r[i] = lambda_ * std::pow(std::abs(u[i]), s_) * u[i];
    } else {
        ComplexField rho(u.grid);
        for (std::size_t i = 0; i < u.size(); ++i) rho[i] = cplx{std::norm(u[i]), 0.0};
        const ComplexField conv = convolve_kernel(rho);
        for (std::size_t i = 0; i < u.size(); ++i) r[i] = lambda_ * conv[i].real() * u[i];
    }
    return r;
}

double Nonlinearity::F_eval(const ComplexField& u) const {
    const double w = std::pow(u.grid.spacing(), u.grid.dim);
    double s = 0.0;
    if (kind_ == NonlinearityKind::local_power) {
        for (std::size_t i = 0; i < u.size(); ++i) s += std::pow(std::abs(u[i]), s_ + 2.0);
        return lambda_ / (s_ + 2.0) * s * w;
    }
    ComplexField rho(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) rho[i] = cplx{std::norm(u[i]), 0.0};
    const ComplexField conv = convolve_kernel(rho);
    for (std::size_t i = 0; i < u.size(); ++i) s += conv[i].real() * rho[i].real();
    return 0.25 * lambda_ * s * w;
}

ComplexField Nonlinearity::f_prime_apply(const ComplexField& eta, const ComplexField& w) const {
    if (eta.grid != w.grid) throw error("f_prime_apply: grid mismatch");
    for (const auto& z : eta.values)
        if (z.imag() != 0.0) throw error("f_prime_apply: eta must be real-valued");
    ComplexField r(eta.grid);
    if (kind_ == NonlinearityKind::local_power) {
        for (std::size_t i = 0; i < eta.size(); ++i) {
            const double es = lambda_ * std::pow(std::abs(eta[i].real()), s_);
            r[i] = cplx{es * (s_ + 1.0) * w[i].real(), es * w[i].imag()};
        }
    } else {
        ComplexField rho(eta.grid), cross(eta.grid);
        for (std::size_t i = 0; i < eta.size(); ++i) {
            const double e = eta[i].real();
            rho[i] = cplx{e * e, 0.0};
            cross[i] = cplx{e * w[i].real(), 0.0};
        }
        const ComplexField conv_rho = convolve_kernel(rho);
        const ComplexField conv_cross = convolve_kernel(cross);
        for (std::size_t i = 0; i < eta.size(); ++i)
            r[i] = lambda_ * conv_rho[i].real() * w[i] +
                   2.0 * lambda_ * conv_cross[i].real() * eta[i].real();
    }
    return r;
}

// -- Envelope ------------------------------------------------------------------

Envelope cutoff_envelope(double r, double theta) {
    if (theta <= 0.0 || r <= theta) return {1.0, 0.0};
    const double half = 0.5 * theta;
    if (r >= 1.5 * theta) return {0.0, 0.0};
    const double xi = (r - theta) / half;
    const double smooth = xi * xi * xi * (10.0 + xi * (-15.0 + 6.0 * xi));
    const double dsmooth = 30.0 * xi * xi * (1.0 - xi) * (1.0 - xi);
    return {1.0 - smooth, -dsmooth / half};
}

// -- Potential -----------------------------------------------------------------

Potential Potential::zero(int dim) {
    Potential p;
    p.kind_ = PotentialKind::zero;
    p.dim_ = dim;
    return p;
}

Potential Potential::moving_trap(int dim, double h, double omega0, std::vector<double> drift,
                                 double cutoff_theta) {
    if (h <= 0.0 || h >= 1.0) throw error("Potential: h must be in (0,1)");
    if (static_cast<int>(drift.size()) != dim) throw error("Potential: drift dimension mismatch");
    Potential p;
    p.kind_ = PotentialKind::moving_trap;
    p.dim_ = dim;
    p.h_ = h;
    p.omega0_ = omega0;
    p.drift_ = std::move(drift);
    p.theta_ = cutoff_theta;
    return p;
}

Potential Potential::mathieu_trap(int dim, double h, double omega0, double delta, double omega,
                                  double cutoff_theta) {
    if (h <= 0.0 || h >= 1.0) throw error("Potential: h must be in (0,1)");
    if (omega <= 0.0) throw error("Potential: omega must be positive");
    Potential p;
    p.kind_ = PotentialKind::mathieu_trap;
    p.dim_ = dim;
    p.h_ = h;
    p.omega0_ = omega0;
    p.delta_ = delta;
    p.omega_ = omega;
    p.theta_ = cutoff_theta;
    return p;
}

Potential Potential::custom(int dim, std::function<double(double, const std::vector<double>&)> V,
                            std::function<std::vector<double>(double, const std::vector<double>&)>
                                gradV,
                            std::function<double(double, const std::vector<double>&)> dtV) {
    Potential p;
    p.kind_ = PotentialKind::custom;
    p.dim_ = dim;
    p.custom_v_ = std::move(V);
    p.custom_grad_ = std::move(gradV);
    p.custom_dt_ = std::move(dtV);
    return p;
}

Potential Potential::tabulated(std::vector<PotentialTableSlice> slices) {
    if (slices.empty()) throw error("Potential: empty table");
    for (std::size_t i = 1; i < slices.size(); ++i)
        if (slices[i].t <= slices[i - 1].t) throw error("Potential: table times must increase");
    Potential p;
    p.kind_ = PotentialKind::custom;
    p.dim_ = slices.front().values.grid.dim;
    p.table_ = std::move(slices);
    return p;
}

double Potential::trap_radial(double t, double r2) const {
    const double r = std::sqrt(r2);
    const auto env = cutoff_envelope(r, theta_);
    double q = 0.25 * h_ * h_ * omega0_ * omega0_;
    if (kind_ == PotentialKind::mathieu_trap) q *= 1.0 + delta_ * std::cos(omega_ * t);
    return q * r2 * env.value;
}

namespace {
// linear interpolation helpers for tabulated potentials
struct TableLookup {
    std::size_t i0, i1;
    double w0, w1;
};
TableLookup locate(const std::vector<PotentialTableSlice>& tab, double t) {
    if (t <= tab.front().t) return {0, 0, 1.0, 0.0};
    if (t >= tab.back().t) return {tab.size() - 1, tab.size() - 1, 1.0, 0.0};
    std::size_t hi = 1;
    while (tab[hi].t < t) ++hi;
    const double dt = tab[hi].t - tab[hi - 1].t;
    const double w1 = (t - tab[hi - 1].t) / dt;
    return {hi - 1, hi, 1.0 - w1, w1};
}
cplx sample_at(const ComplexField& f, const std::vector<double>& x) {
    // nearest-grid-point lookup; tabulated potentials are an exchange format,
    // not a high-order evaluator
    const Grid& g = f.grid;
    std::size_t p = 0;
    for (int d = 0; d < g.dim; ++d) {
        long i = std::lround((x[d] + 0.5 * g.extent) / g.spacing());
        i = ((i % g.points) + g.points) % g.points;
        p = p * g.points + static_cast<std::size_t>(i);
    }
    return f[p];
}
}  // namespace

double Potential::eval(double t, const std::vector<double>& x) const {
    switch (kind_) {
        case PotentialKind::zero:
            return 0.0;
        case PotentialKind::moving_trap: {
            double r2 = 0.0;
            for (int d = 0; d < dim_; ++d) {
                const double y = x[d] - drift_[d] * t;
                r2 += y * y;
            }
            return trap_radial(t, r2);
        }
        case PotentialKind::mathieu_trap: {
            double r2 = 0.0;
            for (int d = 0; d < dim_; ++d) r2 += x[d] * x[d];
            return trap_radial(t, r2);
        }
        case PotentialKind::custom: {
            if (!table_.empty()) {
                const auto lk = locate(table_, t);
                return lk.w0 * sample_at(table_[lk.i0].values, x).real() +
                       lk.w1 * sample_at(table_[lk.i1].values, x).real();
            }
            return custom_v_(t, x);
        }
    }
    return 0.0;
}

std::vector<double> Potential::grad(double t, const std::vector<double>& x) const {
    std::vector<double> g(dim_, 0.0);
    switch (kind_) {
        case PotentialKind::zero:
            return g;
        case PotentialKind::moving_trap:
        case PotentialKind::mathieu_trap: {
            std::vector<double> y(dim_);
            double r2 = 0.0;
            for (int d = 0; d < dim_; ++d) {
                y[d] = x[d] - (kind_ == PotentialKind::moving_trap ? drift_[d] * t : 0.0);
                r2 += y[d] * y[d];
            }
            const double r = std::sqrt(r2);
            const auto env = cutoff_envelope(r, theta_);
            double q = 0.25 * h_ * h_ * omega0_ * omega0_;
            if (kind_ == PotentialKind::mathieu_trap) q *= 1.0 + delta_ * std::cos(omega_ * t);
            // d/dy (q r^2 env(r)) = q (2 y env + r^2 env'(r) y / r)
            for (int d = 0; d < dim_; ++d) {
                double gd = 2.0 * y[d] * env.value;
                if (r > 0.0) gd += r * env.slope * y[d];
                g[d] = q * gd;
            }
            return g;
        }
        case PotentialKind::custom: {
            if (custom_grad_) return custom_grad_(t, x);
            if (!table_.empty()) {
                // spectral gradient of the interpolated slice, sampled at x
                const auto lk = locate(table_, t);
                for (int d = 0; d < dim_; ++d) {
                    const auto g0 = spectral_derivative(table_[lk.i0].values, d);
                    const auto g1 = spectral_derivative(table_[lk.i1].values, d);
                    g[d] = lk.w0 * sample_at(g0, x).real() + lk.w1 * sample_at(g1, x).real();
                }
                return g;
            }
            const double step = 1e-6;
            for (int d = 0; d < dim_; ++d) {
                auto xp = x, xm = x;
                xp[d] += step;
                xm[d] -= step;
                g[d] = (custom_v_(t, xp) - custom_v_(t, xm)) / (2.0 * step);
            }
            return g;
        }
    }
    return g;
}

double Potential::dt(double t, const std::vector<double>& x) const {
    switch (kind_) {
        case PotentialKind::zero:
            return 0.0;
        case PotentialKind::moving_trap: {
            // center moves: dV/dt = -s . grad V
            const auto g = grad(t, x);
            double s = 0.0;
            for (int d = 0; d < dim_; ++d) s -= drift_[d] * g[d];
            return s;
        }
        case PotentialKind::mathieu_trap: {
            double r2 = 0.0;
            for (int d = 0; d < dim_; ++d) r2 += x[d] * x[d];
            const double r = std::sqrt(r2);
            const auto env = cutoff_envelope(r, theta_);
            return -0.25 * h_ * h_ * omega0_ * omega0_ * delta_ * omega_ * std::sin(omega_ * t) *
                   r2 * env.value;
        }
        case PotentialKind::custom: {
            if (custom_dt_) return custom_dt_(t, x);
            if (!table_.empty()) {
                if (table_.size() < 2) return 0.0;
                const auto lk = locate(table_, t);
                std::size_t i0 = lk.i0, i1 = lk.i1;
                if (i0 == i1) {  // clamp at the ends
                    if (i0 == 0) i1 = 1;
                    else i0 = i1 - 1;
                }
                const double dtv = table_[i1].t - table_[i0].t;
                return (sample_at(table_[i1].values, x).real() -
                        sample_at(table_[i0].values, x).real()) /
                       dtv;
            }
            const double step = 1e-6;
            return (custom_v_(t + step, x) - custom_v_(t - step, x)) / (2.0 * step);
        }
    }
    return 0.0;
}

ComplexField Potential::sample(double t, const Grid& g) const {
    ComplexField r(g);
    if (kind_ == PotentialKind::zero) return r;
    for (std::size_t p = 0; p < r.size(); ++p) r[p] = cplx{eval(t, coords_of(g, p)), 0.0};
    return r;
}

ComplexField Potential::rv_residual(double t, const std::vector<double>& a, const Grid& g) const {
    if (static_cast<int>(a.size()) != dim_) throw error("rv_residual: dimension mismatch");
    const double va = eval(t, a);
    const auto ga = grad(t, a);
    ComplexField r(g);
    for (std::size_t p = 0; p < r.size(); ++p) {
        auto x = coords_of(g, p);
        std::vector<double> xa(x);
        double lin = 0.0;
        for (int d = 0; d < dim_; ++d) {
            xa[d] += a[d];
            lin += ga[d] * x[d];
        }
        r[p] = cplx{eval(t, xa) - va - lin, 0.0};
    }
    return r;
}

}  // namespace solab
