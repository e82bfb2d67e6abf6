#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "solab/grid.hpp"

namespace solab {

using cplx = std::complex<double>;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Complex samples on a periodic grid. Fields are treated as immutable values:
/// every operation returns a new field, so sharing across threads is safe.
struct ComplexField {
    Grid grid;
    std::vector<cplx> values;
    // Set when a transform was applied to a field whose boundary amplitude
    // exceeds 1e-12 * max|u| (tube condition violated; periodic seam artifacts
    // are then not negligible).
    bool boundary_warning = false;

    ComplexField() = default;
    explicit ComplexField(const Grid& g) : grid(g), values(g.size(), cplx{0.0, 0.0}) {}
    ComplexField(const Grid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size()) throw error("ComplexField: sample count mismatch");
    }

    std::size_t size() const { return values.size(); }
    cplx& operator[](std::size_t i) { return values[i]; }
    const cplx& operator[](std::size_t i) const { return values[i]; }
};

struct TransformParams {
    std::vector<double> a;  // translation, size N
    std::vector<double> v;  // boost velocity, size N
    double gamma = 0.0;     // phase, stored reduced mod 2*pi

    TransformParams() = default;
    TransformParams(std::vector<double> a_, std::vector<double> v_, double gamma_);
};

/// Heisenberg composition (Remark on the group structure): p1 * p2 has
/// a'' = a + a', v'' = v + v', gamma'' = gamma + gamma' + v . a' / 2.
TransformParams compose(const TransformParams& p1, const TransformParams& p2);

double reduce_mod_2pi(double gamma);

// -- inner products and norms ------------------------------------------------

/// Re \int u conj(v), plain Riemann sum (spectrally accurate on periodic grids).
double inner_product(const ComplexField& u, const ComplexField& v);

/// omega(u, v) = Im \int u conj(v) = <u, i v>. Antisymmetric.
double symplectic_form(const ComplexField& u, const ComplexField& v);

double l2_norm_sq(const ComplexField& u);

/// ||u||_{L2}^2 + ||grad u||_{L2}^2 evaluated spectrally as sum (1+|k|^2)|u_k|^2.
double h1_norm_sq(const ComplexField& u);

/// Charge N(psi) = (1/2) \int |psi|^2.
double charge(const ComplexField& u);

/// Field momentum P = <psi, -i grad psi> = Im \int conj(psi) grad psi, one entry per axis.
std::vector<double> momentum(const ComplexField& u);

double max_abs(const ComplexField& u);
bool all_finite(const ComplexField& u);

// -- pointwise algebra --------------------------------------------------------

ComplexField operator+(const ComplexField& u, const ComplexField& v);
ComplexField operator-(const ComplexField& u, const ComplexField& v);
ComplexField operator*(cplx s, const ComplexField& u);
ComplexField operator*(double s, const ComplexField& u);
ComplexField multiply(const ComplexField& u, const ComplexField& v);  // pointwise
ComplexField conj(const ComplexField& u);
ComplexField real_part(const ComplexField& u);
ComplexField imag_part(const ComplexField& u);  // Im(u) as a real field

/// Field of coordinate values along one axis (the sawtooth x in [-L/2, L/2)).
ComplexField coordinate_field(const Grid& g, int axis);

// -- spectral calculus ---------------------------------------------------------

std::vector<ComplexField> spectral_gradient(const ComplexField& u);
ComplexField spectral_laplacian(const ComplexField& u);

/// Exact differentiation component: d/dx_axis via ik multiplier.
ComplexField spectral_derivative(const ComplexField& u, int axis);

/// Apply a Fourier multiplier m(|k|^2) (real symbol), e.g. (1+|k|^2)^(-1/2).
ComplexField spectral_multiplier(const ComplexField& u, const std::function<double(double)>& symbol);

// -- symmetry transformations ---------------------------------------------------

/// T_{a v gamma} u = e^{i( v.(x-a)/2 + gamma)} u(x - a); translation is the exact
/// spectral phase shift, so a need not be grid-aligned.
ComplexField apply_transform(const ComplexField& u, const TransformParams& p);

/// Inverse: u(x) = e^{-i( v.x/2 + gamma)} psi(x + a).
ComplexField inverse_transform(const ComplexField& psi, const TransformParams& p);

/// Translation only: u(x - a).
ComplexField translate(const ComplexField& u, const std::vector<double>& a);

/// max |u| over the x = -L/2 boundary plane(s), used for the tube condition.
double boundary_amplitude(const ComplexField& u);

}  // namespace solab
