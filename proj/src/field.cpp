#include "solab/field.hpp"

#include <algorithm>
#include <cmath>

#include "solab/fourier.hpp"

namespace solab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_same_grid(const ComplexField& u, const ComplexField& v) {
    if (u.grid != v.grid) throw error("field operation: grid mismatch");
}

// |k|^2 for a row-major FFT bin.
double k2_of_bin(const Grid& g, std::size_t p) {
    const auto idx = g.unravel(p);
    double k2 = 0.0;
    for (int d = 0; d < g.dim; ++d) {
        const double k = g.wavenumber(idx[d]);
        k2 += k * k;
    }
    return k2;
}

}  // namespace

TransformParams::TransformParams(std::vector<double> a_, std::vector<double> v_, double gamma_)
    : a(std::move(a_)), v(std::move(v_)), gamma(reduce_mod_2pi(gamma_)) {
    if (a.size() != v.size()) throw error("TransformParams: a and v dimension mismatch");
}

double reduce_mod_2pi(double gamma) {
    double g = std::fmod(gamma, 2.0 * kPi);
    if (g < 0.0) g += 2.0 * kPi;
    return g;
}

TransformParams compose(const TransformParams& p1, const TransformParams& p2) {
    if (p1.a.size() != p2.a.size()) throw error("compose: dimension mismatch");
    TransformParams r;
    r.a.resize(p1.a.size());
    r.v.resize(p1.v.size());
    double va = 0.0;
    for (std::size_t d = 0; d < p1.a.size(); ++d) {
        r.a[d] = p1.a[d] + p2.a[d];
        r.v[d] = p1.v[d] + p2.v[d];
        va += p1.v[d] * p2.a[d];
    }
    r.gamma = reduce_mod_2pi(p1.gamma + p2.gamma + 0.5 * va);
    return r;
}

double inner_product(const ComplexField& u, const ComplexField& v) {
    require_same_grid(u, v);
    const double w = std::pow(u.grid.spacing(), u.grid.dim);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += u[i].real() * v[i].real() + u[i].imag() * v[i].imag();
    return s * w;
}

double symplectic_form(const ComplexField& u, const ComplexField& v) {
    require_same_grid(u, v);
    const double w = std::pow(u.grid.spacing(), u.grid.dim);
    // Im(u conj(v)) accumulated termwise keeps omega(u,v) = -omega(v,u) exact.
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += u[i].imag() * v[i].real() - u[i].real() * v[i].imag();
    return s * w;
}

double l2_norm_sq(const ComplexField& u) {
    const double w = std::pow(u.grid.spacing(), u.grid.dim);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += std::norm(u[i]);
    return s * w;
}

double h1_norm_sq(const ComplexField& u) {
    std::vector<cplx> hat = u.values;
    fft_forward(u.grid, hat);
    const double w =
        std::pow(u.grid.spacing(), u.grid.dim) / static_cast<double>(u.grid.size());
    double s = 0.0;
    for (std::size_t p = 0; p < hat.size(); ++p) s += (1.0 + k2_of_bin(u.grid, p)) * std::norm(hat[p]);
    return s * w;
}

double charge(const ComplexField& u) { return 0.5 * l2_norm_sq(u); }

std::vector<double> momentum(const ComplexField& u) {
    std::vector<double> P(u.grid.dim, 0.0);
    const auto grad = spectral_gradient(u);
    for (int d = 0; d < u.grid.dim; ++d) {
        // <psi, -i dpsi> = Im \int conj(psi) dpsi
        P[d] = -symplectic_form(u, grad[d]);
    }
    return P;
}

double max_abs(const ComplexField& u) {
    double m = 0.0;
    for (const auto& z : u.values) m = std::max(m, std::abs(z));
    return m;
}

bool all_finite(const ComplexField& u) {
    for (const auto& z : u.values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

ComplexField operator+(const ComplexField& u, const ComplexField& v) {
    require_same_grid(u, v);
    ComplexField r(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] + v[i];
    return r;
}

ComplexField operator-(const ComplexField& u, const ComplexField& v) {
    require_same_grid(u, v);
    ComplexField r(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] - v[i];
    return r;
}

ComplexField operator*(cplx s, const ComplexField& u) {
    ComplexField r(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = s * u[i];
    return r;
}

ComplexField operator*(double s, const ComplexField& u) { return cplx{s, 0.0} * u; }

ComplexField multiply(const ComplexField& u, const ComplexField& v) {
    require_same_grid(u, v);
    ComplexField r(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] * v[i];
    return r;
}

ComplexField conj(const ComplexField& u) {
    ComplexField r(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = std::conj(u[i]);
    return r;
}

ComplexField real_part(const ComplexField& u) {
    ComplexField r(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = cplx{u[i].real(), 0.0};
    return r;
}

ComplexField imag_part(const ComplexField& u) {
    ComplexField r(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = cplx{u[i].imag(), 0.0};
    return r;
}

ComplexField coordinate_field(const Grid& g, int axis) {
    if (axis < 0 || axis >= g.dim) throw error("coordinate_field: axis out of range");
    ComplexField r(g);
    for (std::size_t p = 0; p < r.size(); ++p) {
        const auto idx = g.unravel(p);
        r[p] = cplx{g.coord(idx[axis]), 0.0};
    }
    return r;
}

ComplexField spectral_derivative(const ComplexField& u, int axis) {
    if (axis < 0 || axis >= u.grid.dim) throw error("spectral_derivative: axis out of range");
    std::vector<cplx> hat = u.values;
    fft_forward(u.grid, hat);
    const double inv_n = 1.0 / static_cast<double>(u.grid.size());
    for (std::size_t p = 0; p < hat.size(); ++p) {
        const auto idx = u.grid.unravel(p);
        hat[p] *= cplx{0.0, u.grid.wavenumber(idx[axis])} * inv_n;
    }
    fft_backward(u.grid, hat);
    return ComplexField(u.grid, std::move(hat));
}

std::vector<ComplexField> spectral_gradient(const ComplexField& u) {
    std::vector<ComplexField> g;
    g.reserve(u.grid.dim);
    for (int d = 0; d < u.grid.dim; ++d) g.push_back(spectral_derivative(u, d));
    return g;
}

ComplexField spectral_laplacian(const ComplexField& u) {
    std::vector<cplx> hat = u.values;
    fft_forward(u.grid, hat);
    const double inv_n = 1.0 / static_cast<double>(u.grid.size());
    for (std::size_t p = 0; p < hat.size(); ++p) hat[p] *= -k2_of_bin(u.grid, p) * inv_n;
    fft_backward(u.grid, hat);
    return ComplexField(u.grid, std::move(hat));
}

ComplexField spectral_multiplier(const ComplexField& u, const std::function<double(double)>& symbol) {
    std::vector<cplx> hat = u.values;
    fft_forward(u.grid, hat);
    const double inv_n = 1.0 / static_cast<double>(u.grid.size());
    for (std::size_t p = 0; p < hat.size(); ++p) hat[p] *= symbol(k2_of_bin(u.grid, p)) * inv_n;
    fft_backward(u.grid, hat);
    return ComplexField(u.grid, std::move(hat));
}

double boundary_amplitude(const ComplexField& u) {
    double m = 0.0;
    for (std::size_t p = 0; p < u.size(); ++p) {
        const auto idx = u.grid.unravel(p);
        bool on_boundary = false;
        for (int d = 0; d < u.grid.dim; ++d) on_boundary |= (idx[d] == 0);
        if (on_boundary) m = std::max(m, std::abs(u[p]));
    }
    return m;
}

ComplexField translate(const ComplexField& u, const std::vector<double>& a) {
    if (static_cast<int>(a.size()) != u.grid.dim) throw error("translate: dimension mismatch");
    std::vector<cplx> hat = u.values;
    fft_forward(u.grid, hat);
    const double inv_n = 1.0 / static_cast<double>(u.grid.size());
    for (std::size_t p = 0; p < hat.size(); ++p) {
        const auto idx = u.grid.unravel(p);
        double phase = 0.0;
        for (int d = 0; d < u.grid.dim; ++d) phase -= u.grid.wavenumber(idx[d]) * a[d];
        hat[p] *= std::polar(inv_n, phase);
    }
    fft_backward(u.grid, hat);
    ComplexField r(u.grid, std::move(hat));
    r.boundary_warning = u.boundary_warning;
    return r;
}

ComplexField apply_transform(const ComplexField& u, const TransformParams& p) {
    if (static_cast<int>(p.a.size()) != u.grid.dim) throw error("apply_transform: dimension mismatch");
    const bool warn = boundary_amplitude(u) > 1e-12 * max_abs(u);
    ComplexField r = translate(u, p.a);
    for (std::size_t q = 0; q < r.size(); ++q) {
        const auto idx = r.grid.unravel(q);
        double phase = p.gamma;
        for (int d = 0; d < r.grid.dim; ++d)
            phase += 0.5 * p.v[d] * (r.grid.coord(idx[d]) - p.a[d]);
        r[q] *= std::polar(1.0, phase);
    }
    r.boundary_warning = u.boundary_warning || warn;
    return r;
}

ComplexField inverse_transform(const ComplexField& psi, const TransformParams& p) {
    if (static_cast<int>(p.a.size()) != psi.grid.dim)
        throw error("inverse_transform: dimension mismatch");
    const bool warn = boundary_amplitude(psi) > 1e-12 * max_abs(psi);
    // u(x) = e^{-i(v.x/2 + gamma)} psi(x + a): strip the phase about x = a first,
    // then shift, so both steps act on fields that decay at the seam.
    ComplexField tmp(psi.grid);
    for (std::size_t q = 0; q < psi.size(); ++q) {
        const auto idx = psi.grid.unravel(q);
        double phase = -p.gamma;
        for (int d = 0; d < psi.grid.dim; ++d)
            phase -= 0.5 * p.v[d] * (psi.grid.coord(idx[d]) - p.a[d]);
        tmp[q] = psi[q] * std::polar(1.0, phase);
    }
    std::vector<double> minus_a(p.a.size());
    for (std::size_t d = 0; d < p.a.size(); ++d) minus_a[d] = -p.a[d];
    ComplexField r = translate(tmp, minus_a);
    r.boundary_warning = psi.boundary_warning || warn;
    return r;
}

}  // namespace solab
