#include "solab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace solab {

std::vector<double> solve_dense(SmallMatrix A, std::vector<double> b) {
    const int n = A.n;
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("solve_dense: size mismatch");
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A(r, col)) > std::abs(A(piv, col))) piv = r;
        if (A(piv, col) == 0.0) throw std::runtime_error("solve_dense: singular matrix");
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(A(piv, c), A(col, c));
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = A(r, col) / A(col, col);
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) A(r, c) -= f * A(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A(r, c) * x[c];
        x[r] = s / A(r, r);
    }
    return x;
}

SmallMatrix invert_dense(const SmallMatrix& A) {
    const int n = A.n;
    SmallMatrix inv(n);
    for (int j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        const auto col = solve_dense(A, e);
        for (int i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

namespace {
double norm_inf(const SmallMatrix& A) {
    double m = 0.0;
    for (int i = 0; i < A.n; ++i) {
        double row = 0.0;
        for (int j = 0; j < A.n; ++j) row += std::abs(A(i, j));
        m = std::max(m, row);
    }
    return m;
}
}  // namespace

double condition_inf(const SmallMatrix& A) {
    try {
        return norm_inf(A) * norm_inf(invert_dense(A));
    } catch (const std::runtime_error&) {
        return std::numeric_limits<double>::infinity();
    }
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        rss += r * r;
    }
    f.residual_rms = std::sqrt(rss / n);
    return f;
}

RandomStream::RandomStream(std::uint64_t seed) {
    if (seed == 0) seed = 0x9e3779b97f4a7c15ULL;
    state_[0] = seed;
    for (int i = 1; i < 312; ++i)
        state_[i] = 6364136223846793005ULL * (state_[i - 1] ^ (state_[i - 1] >> 62)) +
                    static_cast<std::uint64_t>(i);
    index_ = 312;
}

std::uint64_t RandomStream::next_u64() {
    // mt19937_64 generation step
    constexpr std::uint64_t kLoMask = 0x7fffffffULL;
    constexpr std::uint64_t kHiMask = ~kLoMask;
    if (index_ >= 312) {
        for (int i = 0; i < 312; ++i) {
            const std::uint64_t x = (state_[i] & kHiMask) | (state_[(i + 1) % 312] & kLoMask);
            std::uint64_t xa = x >> 1;
            if (x & 1ULL) xa ^= 0xb5026f5aa96619e9ULL;
            state_[i] = state_[(i + 156) % 312] ^ xa;
        }
        index_ = 0;
    }
    std::uint64_t y = state_[index_++];
    y ^= (y >> 29) & 0x5555555555555555ULL;
    y ^= (y << 17) & 0x71d67fffeda60000ULL;
    y ^= (y << 37) & 0xfff7eee000000000ULL;
    y ^= y >> 43;
    return y;
}

double RandomStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

}  // namespace solab
