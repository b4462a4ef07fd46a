#include "climnorm/kernels.hpp"

#include "climnorm/error.hpp"
#include "climnorm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace climnorm {

long long KernelWeights::first_offset() const noexcept {
    if (window == Window::Causal) {
        return 0;
    }
    return -static_cast<long long>(period) * bandwidth;
}

double KernelWeights::at(long long offset) const noexcept {
    const long long i = offset - first_offset();
    if (i < 0 || i >= static_cast<long long>(weights.size())) {
        return 0.0;
    }
    return weights[static_cast<std::size_t>(i)];
}

namespace {

double polynomial_value(int order, int h, long long j) {
    double v = 1.0;
    for (int i = 1; i <= order; ++i) {
        const double a = static_cast<double>(h + i);
        v *= a * a - static_cast<double>(j * j);
    }
    return v;
}

void normalise(std::vector<double>& w) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) {
        v /= total;
    }
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return std::round(r);
}

// Sigma^{-1} X, falling back to a pseudo-inverse when Sigma is singular.
Matrix precision_times(const Matrix& sigma, const Matrix& x) {
    Matrix out(x.rows(), x.cols());
    try {
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            out.col(c) = linalg::solve_spd(sigma, x.col(c));
        }
    } catch (const DecompositionError&) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            out.col(c) = linalg::solve_psd_min_norm(sigma, x.col(c)).x;
        }
    }
    return out;
}

Matrix inverse_spd_or_rank_error(const Matrix& a, const char* what) {
    const auto n = a.rows();
    Matrix inv(n, n);
    try {
        for (Eigen::Index c = 0; c < n; ++c) {
            inv.col(c) = linalg::solve_spd(a, Vector::Unit(n, c));
        }
    } catch (const DecompositionError& e) {
        throw Error(ErrorCode::RankDeficient,
                    std::string(what) + ": design is rank deficient (Cholesky pivot " +
                        std::to_string(e.pivot()) + ")");
    }
    return inv;
}

void check_conformable(const Matrix& x, const Matrix& sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() != x.rows()) {
        throw_invalid("kernel optimality: Sigma must be " + std::to_string(x.rows()) + "x" +
                      std::to_string(x.rows()));
    }
}

}  // namespace

KernelWeights polynomial_kernel(int order, int half_bandwidth) {
    if (order < 0) {
        throw_invalid("polynomial_kernel: order must be >= 0");
    }
    if (half_bandwidth < 1) {
        throw_invalid("polynomial_kernel: half-bandwidth must be >= 1");
    }
    KernelWeights k;
    k.order = order;
    k.period = 1;
    k.bandwidth = half_bandwidth;
    k.window = Window::TwoSided;
    for (long long j = -half_bandwidth; j <= half_bandwidth; ++j) {
        k.weights.push_back(polynomial_value(order, half_bandwidth, j));
    }
    normalise(k.weights);
    return k;
}

KernelWeights seasonal_kernel(int order, int bandwidth, int period, Window window) {
    if (order < 0) {
        throw_invalid("seasonal_kernel: order must be >= 0");
    }
    if (bandwidth < 1) {
        throw_invalid("seasonal_kernel: bandwidth must be >= 1");
    }
    if (period < 1) {
        throw_invalid("seasonal_kernel: period must be >= 1");
    }
    KernelWeights k;
    k.order = order;
    k.period = period;
    k.bandwidth = bandwidth;
    k.window = window;
    const long long sm = static_cast<long long>(period) * bandwidth;
    const long long first = window == Window::Causal ? 0 : -sm;
    for (long long j = first; j <= sm; ++j) {
        k.weights.push_back(j % period == 0 ? polynomial_value(order, bandwidth, j / period) : 0.0);
    }
    normalise(k.weights);
    return k;
}

Matrix smoothness_covariance(int order, int period, std::size_t size) {
    if (order < 0 || period < 1 || size == 0) {
        throw_invalid("smoothness_covariance: need order >= 0, period >= 1, size >= 1");
    }
    std::vector<double> acov(size, 0.0);
    for (int k = 0; k <= order; ++k) {
        const std::size_t lag = static_cast<std::size_t>(k) * static_cast<std::size_t>(period);
        if (lag < size) {
            acov[lag] = ((k % 2) ? -1.0 : 1.0) * binomial(2 * order, order + k);
        }
    }
    return linalg::symmetric_toeplitz(acov, size);
}

Matrix optimality_operator(const Matrix& x, const Matrix& sigma) {
    check_conformable(x, sigma);
    const Matrix pinv_x = precision_times(sigma, x);
    const Matrix gls_gram = x.transpose() * pinv_x;
    const Matrix inv = inverse_spd_or_rank_error(gls_gram, "optimality_operator");
    const Matrix a = sigma - x * inv * x.transpose();

    const auto q = x.rows();
    const auto p = x.cols();
    Matrix l(p * q, q);
    for (Eigen::Index i = 0; i < q; ++i) {
        for (Eigen::Index r = 0; r < p; ++r) {
            l.col(i).segment(r * q, q) = x(i, r) * a.col(i);
        }
    }
    return l;
}

double optimality_residual(std::span<const double> kernel, const Matrix& x, const Matrix& sigma) {
    if (kernel.size() != static_cast<std::size_t>(x.rows())) {
        throw_invalid("optimality_residual: kernel length does not match design rows");
    }
    const Matrix l = optimality_operator(x, sigma);
    const Eigen::Map<const Vector> kappa(kernel.data(), static_cast<Eigen::Index>(kernel.size()));
    const double norm = kappa.cwiseAbs().maxCoeff();
    if (!(norm > 0.0)) {
        throw_invalid("optimality_residual: kernel is identically zero");
    }
    return (l * kappa).cwiseAbs().maxCoeff() / norm;
}

std::vector<Vector> optimal_kernel_basis(const Matrix& x, const Matrix& sigma, double tol) {
    return linalg::null_space(optimality_operator(x, sigma), tol);
}

double wls_gls_gap(const Matrix& x, const Matrix& sigma, std::span<const double> kernel, int trials,
                   std::uint64_t seed) {
    check_conformable(x, sigma);
    if (kernel.size() != static_cast<std::size_t>(x.rows())) {
        throw_invalid("wls_gls_gap: kernel length does not match design rows");
    }
    Matrix kx = x;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        kx.row(i) *= kernel[static_cast<std::size_t>(i)];
    }
    const Matrix wls_inv = inverse_spd_or_rank_error(x.transpose() * kx, "wls_gls_gap");
    const Matrix pinv_x = precision_times(sigma, x);
    const Matrix gls_inv = inverse_spd_or_rank_error(x.transpose() * pinv_x, "wls_gls_gap");
    const Matrix wls_map = wls_inv * kx.transpose();
    const Matrix gls_map = gls_inv * pinv_x.transpose();

    Rng rng(seed);
    double gap = 0.0;
    for (int t = 0; t < trials; ++t) {
        Vector y(x.rows());
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            y(i) = rng.normal();
        }
        gap = std::max(gap, (wls_map * y - gls_map * y).cwiseAbs().maxCoeff());
    }
    return gap;
}

Matrix polynomial_design(int degree, int half_bandwidth) {
    if (degree < 0 || half_bandwidth < 1) {
        throw_invalid("polynomial_design: need degree >= 0 and half-bandwidth >= 1");
    }
    const auto n = static_cast<Eigen::Index>(2 * half_bandwidth + 1);
    Matrix x(n, degree + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double j = static_cast<double>(i - half_bandwidth);
        double v = 1.0;
        for (int c = 0; c <= degree; ++c) {
            x(i, c) = v;
            v *= j;
        }
    }
    return x;
}

}  // namespace climnorm
