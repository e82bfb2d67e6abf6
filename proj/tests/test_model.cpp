#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "solab/model.hpp"
#include "solab/numerics.hpp"

using namespace solab;

namespace {
const Grid grid1d{1, 60.0, 2048};
const Nonlinearity cubic = Nonlinearity::local_power(1.0, 2.0, 1);
}  // namespace

TEST_CASE("nonlinearity construction enforces subcriticality") {
    CHECK_THROWS_AS(Nonlinearity::local_power(1.0, 4.0, 1), error);   // s = 4/N
    CHECK_THROWS_AS(Nonlinearity::local_power(1.0, 5.0, 1), error);
    CHECK_THROWS_AS(Nonlinearity::local_power(-1.0, 2.0, 1), error);  // lambda <= 0
    CHECK_NOTHROW(Nonlinearity::local_power(1.0, 3.9, 1));
    CHECK_THROWS_AS(Nonlinearity::local_power(1.0, 2.5, 2), error);   // 4/N = 2 in 2D
}

TEST_CASE("f and F: zero field and cubic soliton values") {
    ComplexField zero(grid1d);
    CHECK(max_abs(cubic.f_eval(zero)) == 0.0);
    CHECK(cubic.F_eval(zero) == 0.0);

    const auto eta = oracles::sample_real(grid1d, [](double x) { return oracles::eta_cubic(x); });
    // f(eta) = eta^3 = 2 sqrt(2) sech^3 pointwise
    const auto feta = cubic.f_eval(eta);
    double err = 0.0;
    for (int i = 0; i < grid1d.points; ++i) {
        const double expected = std::pow(oracles::eta_cubic(grid1d.coord(i)), 3);
        err = std::max(err, std::abs(feta[i].real() - expected));
    }
    CHECK(err < 1e-10);

    // F(eta) = (1/4) int eta^4 = int sech^4 = 4/3 by the quadrature oracle
    const double oracle = oracles::quad_line(
        [](double x) { return 0.25 * std::pow(oracles::eta_cubic(x), 4); });
    CHECK(oracle == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
    CHECK(cubic.F_eval(eta) == doctest::Approx(4.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("gauge covariance and translation invariance of F") {
    const auto u = oracles::random_smooth_field(grid1d, 3);
    for (double gamma : {0.4, 2.0, 5.5}) {
        const cplx phase = std::polar(1.0, gamma);
        const auto lhs = cubic.f_eval(phase * u);
        const auto rhs = phase * cubic.f_eval(u);
        CHECK(max_abs(lhs - rhs) <= 1e-12 * std::max(1.0, max_abs(rhs)));
        CHECK(cubic.F_eval(phase * u) == doctest::Approx(cubic.F_eval(u)).epsilon(1e-12));
    }
    const auto shifted = translate(u, {7.3});
    CHECK(cubic.F_eval(shifted) == doctest::Approx(cubic.F_eval(u)).epsilon(1e-10));
}

TEST_CASE("f_prime branches at a real profile") {
    const auto eta = oracles::sample_real(grid1d, [](double x) { return oracles::eta_cubic(x); });

    // real direction: f'(eta) w = 3 eta^2 w
    const auto w_re = oracles::sample_real(grid1d, [](double x) { return std::exp(-x * x); });
    const auto fw_re = cubic.f_prime_apply(eta, w_re);
    double err = 0.0;
    for (int i = 0; i < grid1d.points; ++i) {
        const double e = eta[i].real();
        err = std::max(err, std::abs(fw_re[i].real() - 3.0 * e * e * w_re[i].real()));
    }
    CHECK(err < 1e-12);

    // imaginary direction: f'(eta) (i w) = i eta^2 w
    const auto fw_im = cubic.f_prime_apply(eta, cplx{0.0, 1.0} * w_re);
    err = 0.0;
    for (int i = 0; i < grid1d.points; ++i) {
        const double e = eta[i].real();
        err = std::max(err, std::abs(fw_im[i].imag() - e * e * w_re[i].real()));
        err = std::max(err, std::abs(fw_im[i].real()));
    }
    CHECK(err < 1e-12);

    CHECK_THROWS_AS(cubic.f_prime_apply(cplx{0.0, 1.0} * eta, w_re), error);
}

TEST_CASE("f_prime matches the finite-difference directional derivative") {
    const auto eta = oracles::sample_real(grid1d, [](double x) { return oracles::eta_cubic(x); });
    const auto w = oracles::random_smooth_field(grid1d, 17);
    const auto fpw = cubic.f_prime_apply(eta, w);
    std::vector<double> errs;
    for (double eps : {1e-3, 1e-4}) {
        const auto diff = (1.0 / eps) * (cubic.f_eval(eta + eps * w) - cubic.f_eval(eta));
        errs.push_back(max_abs(diff - fpw));
    }
    // first-order convergence in eps
    const double order = oracles::observed_order(errs[0], errs[1], 10.0);
    CHECK(order > 0.9);
}

TEST_CASE("hartree nonlinearity: gauge covariance and derivative consistency") {
    Grid g{1, 60.0, 512};
    const Nonlinearity hart = Nonlinearity::hartree(0.8, 1);
    const auto eta = oracles::sample_real(g, [](double x) { return oracles::eta_cubic(x); });
    const auto w = oracles::random_smooth_field(g, 23);

    const cplx phase = std::polar(1.0, 1.234);
    CHECK(max_abs(hart.f_eval(phase * eta) - phase * hart.f_eval(eta)) < 1e-12);
    CHECK(hart.F_eval(phase * eta) == doctest::Approx(hart.F_eval(eta)).epsilon(1e-12));

    const auto fpw = hart.f_prime_apply(eta, w);
    std::vector<double> errs;
    for (double eps : {1e-3, 1e-4}) {
        const auto diff = (1.0 / eps) * (hart.f_eval(eta + eps * w) - hart.f_eval(eta));
        errs.push_back(max_abs(diff - fpw));
    }
    CHECK(oracles::observed_order(errs[0], errs[1], 10.0) > 0.9);
}

TEST_CASE("potentials: zero, trap center, mathieu time derivative") {
    const Potential none = Potential::zero(1);
    CHECK(none.eval(1.0, {2.0}) == 0.0);
    CHECK(none.grad(1.0, {2.0})[0] == 0.0);
    CHECK(none.dt(1.0, {2.0}) == 0.0);

    const double h = 0.1, w0 = 2.0, s = 0.3;
    const Potential trap = Potential::moving_trap(1, h, w0, {s}, 10.0);
    // at the trap center x = s t: V = 0, grad V = 0
    CHECK(trap.eval(2.0, {s * 2.0}) == doctest::Approx(0.0));
    CHECK(trap.grad(2.0, {s * 2.0})[0] == doctest::Approx(0.0));
    // inside the cutoff: V = (1/4) h^2 w0^2 (x - st)^2 and -2 grad V = -(h w0)^2 (x - st)
    const double x = s * 2.0 + 1.5;
    CHECK(trap.eval(2.0, {x}) == doctest::Approx(0.25 * h * h * w0 * w0 * 1.5 * 1.5));
    CHECK(-2.0 * trap.grad(2.0, {x})[0] == doctest::Approx(-h * h * w0 * w0 * 1.5));

    const double delta = 0.2, om = 1.3;
    const Potential mat = Potential::mathieu_trap(1, h, w0, delta, om, 10.0);
    const double t = 0.7, xm = 2.2;
    CHECK(mat.dt(t, {xm}) ==
          doctest::Approx(-0.25 * h * h * w0 * w0 * delta * om * std::sin(om * t) * xm * xm)
              .epsilon(1e-12));
    // finite-difference cross-checks of grad and dt
    const double step = 1e-6;
    CHECK(mat.grad(t, {xm})[0] ==
          doctest::Approx((mat.eval(t, {xm + step}) - mat.eval(t, {xm - step})) / (2 * step))
              .epsilon(1e-6));
    CHECK(mat.dt(t, {xm}) ==
          doctest::Approx((mat.eval(t + step, {xm}) - mat.eval(t - step, {xm})) / (2 * step))
              .epsilon(1e-6));
}

TEST_CASE("potential envelope: C2 cutoff and boundedness") {
    const double theta = 10.0;
    CHECK(cutoff_envelope(theta - 1.0, theta).value == 1.0);
    CHECK(cutoff_envelope(1.5 * theta + 0.1, theta).value == 0.0);
    // continuity of value and slope across the blending region
    double prev_v = 1.0, prev_s = 0.0;
    double max_jump = 0.0;
    for (double r = theta - 0.5; r <= 1.5 * theta + 0.5; r += 1e-3) {
        const auto e = cutoff_envelope(r, theta);
        max_jump = std::max(max_jump, std::abs(e.value - prev_v));
        max_jump = std::max(max_jump, 1e-3 * std::abs(e.slope - prev_s));
        prev_v = e.value;
        prev_s = e.slope;
    }
    CHECK(max_jump < 1e-3);

    // grad V stays bounded over the whole line (A2 consequence)
    const Potential trap = Potential::moving_trap(1, 0.1, 2.0, {0.0}, theta);
    double max_grad = 0.0;
    for (double x = -100.0; x <= 100.0; x += 0.05)
        max_grad = std::max(max_grad, std::abs(trap.grad(0.0, {x})[0]));
    CHECK(max_grad < 1.0);
}

TEST_CASE("R_V: linear potential, quadratic trap, h^2 scaling") {
    // linear-in-x potential inside the cutoff: R_V = 0
    const Potential lin = Potential::custom(
        1, [](double, const std::vector<double>& x) { return 0.3 * x[0]; },
        [](double, const std::vector<double>&) { return std::vector<double>{0.3}; },
        [](double, const std::vector<double>&) { return 0.0; });
    Grid g{1, 20.0, 256};
    CHECK(max_abs(lin.rv_residual(0.0, {1.2}, g)) < 1e-12);

    // moving trap at its center: R_V = (1/4) h^2 w0^2 x^2 inside the cutoff
    const double h = 0.1, w0 = 2.0;
    const Potential trap = Potential::moving_trap(1, h, w0, {0.0}, 30.0);
    const auto rv = trap.rv_residual(0.0, {0.0}, g);
    double err = 0.0;
    for (int i = 0; i < g.points; ++i) {
        const double x = g.coord(i);
        err = std::max(err, std::abs(rv[i].real() - 0.25 * h * h * w0 * w0 * x * x));
    }
    CHECK(err < 1e-12);

    // sup |R_V| over the soliton support scales like h^2 (slope 2 +- 0.1)
    std::vector<double> log_h, log_sup;
    for (double hh : {0.2, 0.1, 0.05}) {
        const Potential p = Potential::moving_trap(1, hh, w0, {0.0}, 30.0);
        const auto r = p.rv_residual(0.0, {0.4}, g);
        double sup = 0.0;
        for (int i = 0; i < g.points; ++i)
            if (std::abs(g.coord(i)) <= 8.0) sup = std::max(sup, std::abs(r[i].real()));
        log_h.push_back(std::log(hh));
        log_sup.push_back(std::log(sup));
    }
    const auto fit = fit_line(log_h, log_sup);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("tabulated potential matches its analytic source") {
    // envelope support (1.5 theta = 12) must sit well inside the box so the
    // slices are smoothly periodic for the spectral gradient
    Grid g{1, 40.0, 1024};
    const Potential mat = Potential::mathieu_trap(1, 0.1, 2.0, 0.2, 1.0, 8.0);
    std::vector<PotentialTableSlice> slices;
    for (double t = 0.0; t <= 2.0 + 1e-9; t += 0.01) slices.push_back({t, mat.sample(t, g)});
    const Potential tab = Potential::tabulated(std::move(slices));

    double max_v_err = 0.0, max_g_err = 0.0;
    for (double t : {0.105, 0.5, 1.995}) {
        for (double x : {-3.0, 0.0, 1.5}) {
            // nearest-grid-sample lookup: compare at a grid point
            const double xg = g.coord(static_cast<int>((x + 20.0) / g.spacing()));
            max_v_err = std::max(max_v_err, std::abs(tab.eval(t, {xg}) - mat.eval(t, {xg})));
            max_g_err =
                std::max(max_g_err, std::abs(tab.grad(t, {xg})[0] - mat.grad(t, {xg})[0]));
        }
    }
    CHECK(max_v_err < 1e-5);
    CHECK(max_g_err < 1e-4);
}
