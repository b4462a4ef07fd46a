#pragma once

#include "climnorm/linalg.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace climnorm {

using linalg::Matrix;
using linalg::Vector;

enum class Window { TwoSided, Causal };

/// Non-negative kernel weights over window offsets. Two-sided windows cover
/// offsets -s*m..s*m, causal windows 0..s*m. Weights are normalised to sum 1.
struct KernelWeights {
    std::vector<double> weights;
    Window window = Window::TwoSided;
    int order = 0;      ///< smoothness order d
    int period = 1;     ///< s
    int bandwidth = 0;  ///< m (h for s = 1)

    long long first_offset() const noexcept;
    double at(long long offset) const noexcept;
};

/// kappa_j proportional to prod_{i=1..d} [(h+i)^2 - j^2], j = -h..h.
KernelWeights polynomial_kernel(int order, int half_bandwidth);

/// Order-d polynomial kernel (half-bandwidth m, annual units) placed on the
/// seasonal lags j = r*s and zero elsewhere. The causal window keeps r = 0..m
/// and renormalises.
KernelWeights seasonal_kernel(int order, int bandwidth, int period, Window window);

/// Autocovariance matrix of (1 - L^s)^d xi_t (unit white noise xi) over `size`
/// consecutive points. Valid for every size >= 1.
Matrix smoothness_covariance(int order, int period, std::size_t size);

/// L = (X' kron (Sigma - X (X' Sigma^-1 X)^-1 X')) Z' with Z selecting the
/// diagonal of K. Column i equals kron(x_i, a_i), so the Kronecker product is
/// never materialised.
Matrix optimality_operator(const Matrix& x, const Matrix& sigma);

/// ||L kappa||_inf / ||kappa||_inf.
double optimality_residual(std::span<const double> kernel, const Matrix& x, const Matrix& sigma);

/// Orthonormal basis of the null space of L.
std::vector<Vector> optimal_kernel_basis(const Matrix& x, const Matrix& sigma,
                                         double tol = linalg::kDefaultNullTol);

/// Largest coefficient gap between the kernel-weighted LS and the GLS
/// estimators over `trials` seeded random responses.
double wls_gls_gap(const Matrix& x, const Matrix& sigma, std::span<const double> kernel,
                   int trials = 16, std::uint64_t seed = 20240101);

/// Matrix with columns x^0 .. x^p evaluated at j = -h..h.
Matrix polynomial_design(int degree, int half_bandwidth);

}  // namespace climnorm
