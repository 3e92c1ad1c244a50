#pragma once

// Independent reference implementations used only by the tests. None of
// these call into the library's numerical code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// Gaussian elimination with partial pivoting on a dense copy.
inline std::vector<double> dense_solve(Matrix a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) throw std::runtime_error("singular");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

inline double spherical(double nugget, double sill, double range, double h) {
    if (h == 0.0) return 0.0;
    if (h >= range) return sill;
    const double r = h / range;
    return nugget + (sill - nugget) * (1.5 * r - 0.5 * r * r * r);
}

struct Pt {
    double x, y, v;
};

inline double dist(double ax, double ay, double bx, double by) {
    return std::sqrt((ax - bx) * (ax - bx) + (ay - by) * (ay - by));
}

/// Ordinary kriging weights (plus Lagrange multiplier last) for a spherical model.
inline std::vector<double> ok_weights(const std::vector<Pt>& s, double tx, double ty, double nugget,
                                      double sill, double range) {
    const std::size_t n = s.size();
    Matrix a(n + 1, std::vector<double>(n + 1, 1.0));
    std::vector<double> b(n + 1, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            a[i][j] = spherical(nugget, sill, range, dist(s[i].x, s[i].y, s[j].x, s[j].y));
        b[i] = spherical(nugget, sill, range, dist(s[i].x, s[i].y, tx, ty));
    }
    a[n][n] = 0.0;
    return dense_solve(a, b);
}

/// Inverse-distance weighting written straight from its definition.
inline double idw(const std::vector<Pt>& s, double tx, double ty, double p) {
    double num = 0.0, den = 0.0;
    for (const auto& q : s) {
        const double w = 1.0 / std::pow(dist(q.x, q.y, tx, ty), p);
        num += w * q.v;
        den += w;
    }
    return num / den;
}

/// Moran's I from the double sum.
inline double morans_i(const std::vector<double>& y, const Matrix& w) {
    const std::size_t n = y.size();
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    double num = 0.0, den = 0.0, s0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        den += (y[i] - mean) * (y[i] - mean);
        for (std::size_t j = 0; j < n; ++j) {
            num += w[i][j] * (y[i] - mean) * (y[j] - mean);
            s0 += w[i][j];
        }
    }
    return static_cast<double>(n) / s0 * num / den;
}

struct Mk {
    std::int64_t s = 0;
    double tau = 0.0;
    double variance = 0.0;
};

/// Mann-Kendall by enumerating every pair; tie groups counted pairwise.
inline Mk mann_kendall(const std::vector<double>& y) {
    const std::size_t n = y.size();
    Mk r;
    std::int64_t tied_pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (y[j] > y[i]) ++r.s;
            else if (y[j] < y[i]) --r.s;
            else ++tied_pairs;
        }
    double tie_var = 0.0;
    std::vector<bool> done(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        double t = 0.0;
        for (std::size_t j = i; j < n; ++j)
            if (y[j] == y[i]) {
                done[j] = true;
                t += 1.0;
            }
        tie_var += t * (t - 1.0) * (2.0 * t + 5.0);
    }
    const double nd = static_cast<double>(n);
    const double n0 = nd * (nd - 1.0) / 2.0;
    r.tau = static_cast<double>(r.s) / std::sqrt(n0 * (n0 - static_cast<double>(tied_pairs)));
    r.variance = (nd * (nd - 1.0) * (2.0 * nd + 5.0) - tie_var) / 18.0;
    return r;
}

/// OLS through the normal equations X'X b = X'y for the 2x2 DID design.
inline std::vector<double> did_normal_equations(const std::vector<double>& y, const std::vector<int>& it,
                                                const std::vector<int>& z) {
    Matrix xtx(4, std::vector<double>(4, 0.0));
    std::vector<double> xty(4, 0.0);
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double row[4] = {1.0, double(it[k]), double(z[k]), double(it[k] * z[k])};
        for (int i = 0; i < 4; ++i) {
            xty[i] += row[i] * y[k];
            for (int j = 0; j < 4; ++j) xtx[i][j] += row[i] * row[j];
        }
    }
    return dense_solve(xtx, xty);
}

}  // namespace oracle
