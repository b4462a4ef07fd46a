#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace climnorm::linalg {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultNullTol = 1e-10;

/// Solves A x = b for symmetric positive definite A by Cholesky.
/// Throws DecompositionError naming the first non-positive pivot.
Vector solve_spd(const Matrix& a, const Vector& b);

/// Orthonormal basis of {v : A v ~ 0}: right singular vectors whose singular
/// value is <= tol * (largest singular value).
std::vector<Vector> null_space(const Matrix& a, double tol = kDefaultNullTol);

Matrix kronecker(const Matrix& a, const Matrix& b);

/// Covariance of (1-L)^d applied to unit white noise over `size` points:
/// the banded Toeplitz matrix carrying the signed binomial coefficients of
/// (1-L)^{2d}. Requires size >= 2d+1.
Matrix banded_toeplitz_sigma(int d, std::size_t size);

/// Symmetric Toeplitz matrix with first row `acov[0..size)`.
Matrix symmetric_toeplitz(std::span<const double> acov, std::size_t size);

struct MinNormSolve {
    Vector x;
    double residual = 0.0;  ///< ||A x - b||_inf
    std::size_t rank = 0;
};

/// Minimum-norm solution of A x = b for symmetric positive semidefinite A,
/// discarding eigen-directions below tol * (largest eigenvalue).
MinNormSolve solve_psd_min_norm(const Matrix& a, const Vector& b, double tol = kDefaultNullTol);

/// True when the smallest eigenvalue of symmetric A is >= -tol * max(1, |largest|).
bool is_psd(const Matrix& a, double tol = 1e-10);

bool all_finite(const Matrix& a);

}  // namespace climnorm::linalg
