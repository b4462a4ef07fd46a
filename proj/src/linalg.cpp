#include "climnorm/linalg.hpp"

#include "climnorm/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace climnorm::linalg {

namespace {

double binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0.0;
    }
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return std::round(r);
}

}  // namespace

Vector solve_spd(const Matrix& a, const Vector& b) {
    const auto n = a.rows();
    if (a.cols() != n || b.size() != n) {
        throw_invalid("solve_spd: dimension mismatch");
    }
    if (n == 0) {
        throw_invalid("solve_spd: empty matrix");
    }
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::abs(a(i, j) - a(j, i)) > 1e-10 * scale) {
                throw_invalid("solve_spd: matrix is not symmetric at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
            }
        }
    }

    // Lower-triangular factor, column by column.
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (Eigen::Index k = 0; k < j; ++k) {
            diag -= l(j, k) * l(j, k);
        }
        if (!(diag > 0.0)) {
            throw DecompositionError(static_cast<std::size_t>(j), diag);
        }
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) {
                v -= l(i, k) * l(j, k);
            }
            l(i, j) = v / ljj;
        }
    }

    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double v = b(i);
        for (Eigen::Index k = 0; k < i; ++k) {
            v -= l(i, k) * y(k);
        }
        y(i) = v / l(i, i);
    }
    Vector x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double v = y(i);
        for (Eigen::Index k = i + 1; k < n; ++k) {
            v -= l(k, i) * x(k);
        }
        x(i) = v / l(i, i);
    }
    return x;
}

std::vector<Vector> null_space(const Matrix& a, double tol) {
    if (a.rows() == 0 || a.cols() == 0) {
        throw_invalid("null_space: empty matrix");
    }
    if (!(tol > 0.0)) {
        throw_invalid("null_space: tolerance must be positive");
    }
    Eigen::MatrixXd dense = a;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = tol * (sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) {
            ++rank;
        }
    }
    std::vector<Vector> basis;
    const auto& v = svd.matrixV();
    for (Eigen::Index c = rank; c < v.cols(); ++c) {
        basis.emplace_back(v.col(c));
    }
    return basis;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return k;
}

Matrix banded_toeplitz_sigma(int d, std::size_t size) {
    if (d < 0) {
        throw_invalid("banded_toeplitz_sigma: order must be non-negative");
    }
    if (size < static_cast<std::size_t>(2 * d + 1)) {
        throw_invalid("banded_toeplitz_sigma: size " + std::to_string(size) +
                      " is below 2d+1 = " + std::to_string(2 * d + 1));
    }
    std::vector<double> coef(size, 0.0);
    for (int k = 0; k <= d && static_cast<std::size_t>(k) < size; ++k) {
        coef[static_cast<std::size_t>(k)] = ((k % 2) ? -1.0 : 1.0) * binomial(2 * d, d + k);
    }
    return symmetric_toeplitz(coef, size);
}

Matrix symmetric_toeplitz(std::span<const double> acov, std::size_t size) {
    if (acov.size() < size) {
        throw_invalid("symmetric_toeplitz: need " + std::to_string(size) + " coefficients, got " +
                      std::to_string(acov.size()));
    }
    const auto n = static_cast<Eigen::Index>(size);
    Matrix t(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            t(i, j) = acov[static_cast<std::size_t>(std::abs(i - j))];
        }
    }
    return t;
}

MinNormSolve solve_psd_min_norm(const Matrix& a, const Vector& b, double tol) {
    if (a.rows() != a.cols() || a.rows() != b.size() || a.rows() == 0) {
        throw_invalid("solve_psd_min_norm: dimension mismatch");
    }
    Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    const auto& values = eig.eigenvalues();
    const auto& vectors = eig.eigenvectors();
    const double top = std::max(std::abs(values.maxCoeff()), std::abs(values.minCoeff()));
    const double cutoff = tol * top;

    MinNormSolve out;
    out.x = Vector::Zero(a.rows());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i) > cutoff) {
            out.x += vectors.col(i) * (vectors.col(i).dot(b) / values(i));
            ++out.rank;
        }
    }
    out.residual = (a * out.x - b).cwiseAbs().maxCoeff();
    return out;
}

bool is_psd(const Matrix& a, double tol) {
    Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
    const auto& values = eig.eigenvalues();
    const double scale = std::max(1.0, std::abs(values.maxCoeff()));
    return values.minCoeff() >= -tol * scale;
}

bool all_finite(const Matrix& a) {
    return a.allFinite();
}

}  // namespace climnorm::linalg
