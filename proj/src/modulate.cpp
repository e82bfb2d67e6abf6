#include "solab/modulate.hpp"

#include <cmath>

#include "solab/csv.hpp"

namespace solab {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kUnstableTol = 1e-6;

struct StateVec {
    std::vector<double> a, v;
    double gamma = 0.0, mu = 0.0;

    StateVec& axpy(double c, const StateVec& o) {
        for (std::size_t d = 0; d < a.size(); ++d) {
            a[d] += c * o.a[d];
            v[d] += c * o.v[d];
        }
        gamma += c * o.gamma;
        mu += c * o.mu;
        return *this;
    }
};

StateVec eval_rhs(const StateVec& y, double t, const Potential& pot) {
    StateVec f;
    f.a = y.v;
    const auto g = pot.grad(t, y.a);
    f.v.resize(g.size());
    for (std::size_t d = 0; d < g.size(); ++d) f.v[d] = -2.0 * g[d];
    double v2 = 0.0;
    for (double vd : y.v) v2 += vd * vd;
    f.gamma = y.mu - pot.eval(t, y.a) + 0.25 * v2;
    f.mu = 0.0;
    return f;
}

StateVec rk4_step(const StateVec& y, double t, double dt, const Potential& pot) {
    const StateVec k1 = eval_rhs(y, t, pot);
    StateVec y2 = y;
    y2.axpy(0.5 * dt, k1);
    const StateVec k2 = eval_rhs(y2, t + 0.5 * dt, pot);
    StateVec y3 = y;
    y3.axpy(0.5 * dt, k2);
    const StateVec k3 = eval_rhs(y3, t + 0.5 * dt, pot);
    StateVec y4 = y;
    y4.axpy(dt, k3);
    const StateVec k4 = eval_rhs(y4, t + dt, pot);
    StateVec out = y;
    out.axpy(dt / 6.0, k1);
    out.axpy(dt / 3.0, k2);
    out.axpy(dt / 3.0, k3);
    out.axpy(dt / 6.0, k4);
    return out;
}

}  // namespace

EffectiveRhs rhs_leading(const ModulationParams& sigma, double t, const Potential& potential) {
    EffectiveRhs r;
    r.da = sigma.v;
    const auto g = potential.grad(t, sigma.a);
    r.dv.resize(g.size());
    for (std::size_t d = 0; d < g.size(); ++d) r.dv[d] = -2.0 * g[d];
    double v2 = 0.0;
    for (double vd : sigma.v) v2 += vd * vd;
    r.dgamma = sigma.mu - potential.eval(t, sigma.a) + 0.25 * v2;
    r.dmu = 0.0;
    return r;
}

EffectiveTrajectory integrate_effective(const EffectiveState& state0, const Potential& potential,
                                        double dt, double t_end, const MuInterval& interval) {
    if (dt <= 0.0) throw error("integrate_effective: dt must be positive");
    EffectiveTrajectory traj;
    StateVec y{state0.sigma.a, state0.sigma.v, state0.sigma.gamma, state0.sigma.mu};
    const long n = std::lround(t_end / dt);
    traj.states.reserve(n + 1);
    for (long k = 0; k <= n; ++k) {
        const double t = state0.t + k * dt;
        if (y.mu < interval.lo || y.mu > interval.hi)
            throw error("integrate_effective: mu left the validated interval");
        EffectiveState st;
        st.t = t;
        st.sigma.a = y.a;
        st.sigma.v = y.v;
        st.sigma.gamma = y.gamma;  // unreduced; callers fold mod 2pi for reporting
        st.sigma.mu = y.mu;
        traj.states.push_back(std::move(st));
        if (k == n) break;
        y = rk4_step(y, t, dt, potential);
    }
    return traj;
}

std::vector<double> adiabatic_reference(const std::vector<double>& s, double h, double omega0,
                                        double t) {
    std::vector<double> a(s.size(), 0.0);
    const double w = h * omega0;
    for (std::size_t d = 0; d < s.size(); ++d)
        a[d] = s[d] * t - (w > 0.0 ? s[d] / w * std::sin(w * t) : 0.0);
    return a;
}

FloquetResult floquet_monodromy(double h, double omega0, double omega, double delta) {
    if (omega <= 0.0) throw error("floquet_monodromy: omega must be positive");
    const double period = 2.0 * kPi / omega;
    const int n_steps = 8192;
    const double dt = period / n_steps;
    const double w2 = h * h * omega0 * omega0;

    // integrate (a, adot) columns of the fundamental matrix
    double m[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
    auto accel = [&](double t, double a) { return -w2 * (1.0 + delta * std::cos(omega * t)) * a; };
    for (int col = 0; col < 2; ++col) {
        double a = (col == 0) ? 1.0 : 0.0;
        double ad = (col == 0) ? 0.0 : 1.0;
        for (int k = 0; k < n_steps; ++k) {
            const double t = k * dt;
            const double k1a = ad, k1v = accel(t, a);
            const double k2a = ad + 0.5 * dt * k1v, k2v = accel(t + 0.5 * dt, a + 0.5 * dt * k1a);
            const double k3a = ad + 0.5 * dt * k2v, k3v = accel(t + 0.5 * dt, a + 0.5 * dt * k2a);
            const double k4a = ad + dt * k3v, k4v = accel(t + dt, a + dt * k3a);
            a += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
            ad += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        m[0][col] = a;
        m[1][col] = ad;
    }

    const double tr = m[0][0] + m[1][1];
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det, 0.0));
    FloquetResult res;
    res.multipliers[0] = 0.5 * (tr + disc);
    res.multipliers[1] = 0.5 * (tr - disc);
    res.product_error = std::abs(res.multipliers[0] * res.multipliers[1] - 1.0);
    const double max_mod = std::max(std::abs(res.multipliers[0]), std::abs(res.multipliers[1]));
    res.unstable = max_mod > 1.0 + kUnstableTol;
    return res;
}

void write_trajectory_csv(const std::string& path, const EffectiveTrajectory& traj) {
    CsvWriter csv(path);
    const int dim = traj.states.empty() ? 1 : traj.states.front().sigma.dim();
    std::vector<std::string> cols = {"t"};
    for (int d = 1; d <= dim; ++d) cols.push_back("a_" + std::to_string(d));
    for (int d = 1; d <= dim; ++d) cols.push_back("v_" + std::to_string(d));
    cols.push_back("gamma");
    cols.push_back("mu");
    csv.header(cols);
    for (const auto& st : traj.states) {
        std::vector<double> row = {st.t};
        for (int d = 0; d < dim; ++d) row.push_back(st.sigma.a[d]);
        for (int d = 0; d < dim; ++d) row.push_back(st.sigma.v[d]);
        row.push_back(reduce_mod_2pi(st.sigma.gamma));
        row.push_back(st.sigma.mu);
        csv.row(row);
    }
}

}  // namespace solab
