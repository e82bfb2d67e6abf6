#pragma once

#include <cstdint>
#include <vector>

namespace solab {

/// Dense row-major n x n matrix, only used at tangent-space size (2N+2 <= 8).
struct SmallMatrix {
    int n = 0;
    std::vector<double> a;  // row-major

    SmallMatrix() = default;
    explicit SmallMatrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

/// Solve A x = b by Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(SmallMatrix A, std::vector<double> b);

SmallMatrix invert_dense(const SmallMatrix& A);

/// Infinity-norm condition estimate |A|_inf * |A^-1|_inf.
double condition_inf(const SmallMatrix& A);

/// Least-squares slope (and intercept) of y against x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Deterministic random stream. The mt19937_64 bit sequence is pinned by the
/// standard; uniform and normal draws are derived by hand (not by the
/// implementation-defined std distributions) so artifacts are byte-identical
/// across platforms.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);
    std::uint64_t next_u64();
    double uniform();  // [0, 1)
    double normal();   // standard normal, Box-Muller

private:
    std::uint64_t state_[312];
    int index_ = 312;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace solab
