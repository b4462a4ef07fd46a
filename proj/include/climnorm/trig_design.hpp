#pragma once

#include "climnorm/linalg.hpp"

#include <span>
#include <string>
#include <vector>

namespace climnorm {

using linalg::Matrix;
using linalg::Vector;

/// Number of columns of the trigonometric design (level plus harmonics):
/// s for s even, s for s odd as well (level + (s-1)/2 cos/sin pairs).
std::size_t design_width(int period) noexcept;

/// Column labels in design order: level, cos1, sin1, ..., nyquist.
std::vector<std::string> design_labels(int period);

/// Regressor row for the observation `lag` steps before the target:
/// (1, cos(2 pi lag/s), sin(2 pi lag/s), ..., cos(pi lag)).
Vector design_row(int period, long long lag);

/// Stacks design_row for each lag.
Matrix design_matrix(int period, std::span<const long long> lags);

/// Local trigonometric regression design for bandwidth m years. Row order:
/// Xp has lags 1..sm, Xf lags -sm..-1, Xc = [x0; Xp] (lags 0..sm), and
/// X = [Xf; x0; Xp] (lags -sm..sm).
struct DesignSet {
    Vector x0;
    Matrix xp;
    Matrix xf;
    Matrix xc;
    Matrix x;
    int period = 0;
    int bandwidth = 0;

    std::size_t causal_length() const noexcept { return xc.rows(); }
    std::size_t two_sided_length() const noexcept { return x.rows(); }
};

DesignSet build_design(int period, int bandwidth);

/// Exchange matrix (reverses row order).
Matrix exchange_matrix(std::size_t n);
/// Sign switch on the sine columns.
Matrix sine_sign_switch(int period);

/// Weights w = K X g where g is the minimum-norm solution of X'K X g = target.
/// An empty `kernel` means K = I. Throws RankDeficient when the target is not
/// estimable under the kernel, naming the design column that fails.
Vector projection_weights(const Matrix& x, std::span<const double> kernel, const Vector& target,
                          std::span<const std::string> labels = {});

/// Residual of v after weighted projection onto the columns of X.
Vector weighted_residual(const Matrix& x, std::span<const double> kernel, const Vector& v);

struct TrendColumns {
    Vector jc;        ///< trend values at lags 0..sm: (0, -1, ..., -sm)
    Vector jc_star;   ///< jc minus its kernel-weighted projection on Xc
    double j0c_star = 0.0;
};

/// Causal trend orthogonalisation under a diagonal kernel over lags 0..sm
/// (empty span = uniform).
TrendColumns orthogonalize_trend(const DesignSet& design, std::span<const double> causal_kernel = {});

/// Two-sided analogue: j over lags -sm..sm orthogonalised against X.
Vector orthogonalize_trend_two_sided(const DesignSet& design, std::span<const double> kernel = {});

}  // namespace climnorm
