#pragma once

// Brute-force reference computations used by the tests. They deliberately
// avoid the library's closed forms and solvers: designs are built from
// std::cos/std::sin, projections go through Eigen's complete orthogonal
// decomposition, and covariance matrices are formed as explicit products.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Rows (1, cos(2 pi k j/s), sin(2 pi k j/s), ..., cos(pi j)) for the given lags.
inline Mat trig_design(int s, const std::vector<long long>& lags) {
    const int pairs = (s - 1) / 2;
    const bool nyquist = s % 2 == 0;
    const int width = 1 + 2 * pairs + (nyquist ? 1 : 0);
    Mat x(static_cast<Eigen::Index>(lags.size()), width);
    for (std::size_t r = 0; r < lags.size(); ++r) {
        const double j = static_cast<double>(lags[r]);
        int c = 0;
        x(r, c++) = 1.0;
        for (int k = 1; k <= pairs; ++k) {
            x(r, c++) = std::cos(2.0 * std::numbers::pi * k * j / s);
            x(r, c++) = std::sin(2.0 * std::numbers::pi * k * j / s);
        }
        if (nyquist) {
            x(r, c++) = std::cos(std::numbers::pi * j);
        }
    }
    return x;
}

inline std::vector<long long> lag_range(long long lo, long long hi) {
    std::vector<long long> v;
    for (long long j = lo; j <= hi; ++j) v.push_back(j);
    return v;
}

/// w = K X (X'KX)^+ x0 computed as K^{1/2} times the minimum-norm solution of
/// (K^{1/2} X)' v = x0. An empty kernel means K = I.
inline Vec projection(const Mat& x, const std::vector<double>& kernel, const Vec& x0) {
    Vec root = Vec::Ones(x.rows());
    if (!kernel.empty()) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) root(i) = std::sqrt(kernel[static_cast<std::size_t>(i)]);
    }
    const Mat xr = root.asDiagonal() * x;
    const Mat xt = xr.transpose();
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(xt.rows(), xt.cols());
    cod.setThreshold(1e-10);  // rounding in std::cos must not count as rank
    const Vec v = cod.compute(xt).solve(x0);
    return root.asDiagonal() * v;
}

/// Plain least-squares weights X (X'X)^{-1} x0 via normal equations and QR.
inline Vec ls_weights(const Mat& x, const Vec& x0) {
    const Mat xtx = x.transpose() * x;
    return x * xtx.colPivHouseholderQr().solve(x0);
}

/// Residual of v after (kernel-)weighted least-squares projection on X.
inline Vec weighted_residual(const Mat& x, const std::vector<double>& kernel, const Vec& v) {
    Vec root = Vec::Ones(x.rows());
    if (!kernel.empty()) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) root(i) = std::sqrt(kernel[static_cast<std::size_t>(i)]);
    }
    const Mat xr = root.asDiagonal() * x;
    const Vec vr = root.asDiagonal() * v;
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(xr.rows(), xr.cols());
    cod.setThreshold(1e-10);
    const Vec beta = cod.compute(xr).solve(vr);
    return v - x * beta;
}

/// Difference matrix D (size x (size + s d)) of (1 - L^s)^d; Sigma = D D'.
inline Mat seasonal_difference_matrix(int d, int s, int size) {
    const int width = size + s * d;
    Mat dm = Mat::Zero(size, width);
    std::vector<double> coef(static_cast<std::size_t>(d) + 1);
    double c = 1.0;
    for (int i = 0; i <= d; ++i) {
        coef[static_cast<std::size_t>(i)] = (i % 2 == 0 ? 1.0 : -1.0) * c;
        c = c * (d - i) / (i + 1);
    }
    for (int r = 0; r < size; ++r) {
        for (int i = 0; i <= d; ++i) {
            dm(r, r + s * d - s * i) = coef[static_cast<std::size_t>(i)];
        }
    }
    return dm;
}

inline Mat smoothness_sigma(int d, int s, int size) {
    const Mat dm = seasonal_difference_matrix(d, s, size);
    return dm * dm.transpose();
}

/// Unnormalised polynomial kernel prod_{i=1..d} ((h+i)^2 - j^2), j = -h..h.
inline Vec polynomial_kernel(int d, int h) {
    Vec k(2 * h + 1);
    for (int j = -h; j <= h; ++j) {
        double v = 1.0;
        for (int i = 1; i <= d; ++i) v *= static_cast<double>((h + i) * (h + i) - j * j);
        k(j + h) = v;
    }
    return k;
}

/// Toeplitz matrix from an autocovariance sequence.
inline Mat toeplitz(const std::vector<double>& acov, int size) {
    Mat t(size, size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) t(i, j) = acov[static_cast<std::size_t>(std::abs(i - j))];
    return t;
}

/// Analytic minimiser over lambda in [0, 1] of
/// (lambda - 1)^2 b2 + (wc + lambda wa)' G (wc + lambda wa).
inline double lambda_star(double b2, const Vec& wc, const Vec& wa, const Mat& g) {
    const double num = b2 - wa.dot(g * wc);
    const double den = b2 + wa.dot(g * wa);
    if (den <= 0.0) return 0.0;
    return std::clamp(num / den, 0.0, 1.0);
}

/// Direct convolution mu_t = sum_i w_i y_{t - (first + i)}, NaN when out of range.
inline std::vector<double> convolve(const std::vector<double>& y, const std::vector<double>& w, long long first) {
    const auto n = static_cast<long long>(y.size());
    std::vector<double> out(y.size(), std::nan(""));
    for (long long t = 0; t < n; ++t) {
        double acc = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const long long idx = t - (first + static_cast<long long>(i));
            if (idx < 0 || idx >= n) {
                ok = false;
                break;
            }
            acc += w[i] * y[static_cast<std::size_t>(idx)];
        }
        if (ok) out[static_cast<std::size_t>(t)] = acc;
    }
    return out;
}

}  // namespace oracle
