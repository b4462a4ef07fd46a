#include "climnorm/trig_design.hpp"

#include "climnorm/error.hpp"
#include "climnorm/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace climnorm {

std::size_t design_width(int period) noexcept {
    return 1 + cosine_count(period) + sine_count(period);
}

std::vector<std::string> design_labels(int period) {
    std::vector<std::string> labels{"level"};
    const auto pairs = sine_count(period);
    for (std::size_t k = 1; k <= pairs; ++k) {
        labels.push_back("cos" + std::to_string(k));
        labels.push_back("sin" + std::to_string(k));
    }
    if (period % 2 == 0 && period >= 2) {
        labels.emplace_back("nyquist");
    }
    return labels;
}

Vector design_row(int period, long long lag) {
    Vector row(static_cast<Eigen::Index>(design_width(period)));
    Eigen::Index c = 0;
    row(c++) = 1.0;
    const auto pairs = static_cast<long long>(sine_count(period));
    for (long long k = 1; k <= pairs; ++k) {
        row(c++) = seasonal_cos(k, lag, period);
        row(c++) = seasonal_sin(k, lag, period);
    }
    if (period % 2 == 0 && period >= 2) {
        row(c++) = seasonal_cos(period / 2, lag, period);
    }
    return row;
}

Matrix design_matrix(int period, std::span<const long long> lags) {
    Matrix x(static_cast<Eigen::Index>(lags.size()), static_cast<Eigen::Index>(design_width(period)));
    for (std::size_t i = 0; i < lags.size(); ++i) {
        x.row(static_cast<Eigen::Index>(i)) = design_row(period, lags[i]).transpose();
    }
    return x;
}

DesignSet build_design(int period, int bandwidth) {
    if (period < 2) {
        throw_invalid("build_design: period must be >= 2, got " + std::to_string(period));
    }
    if (bandwidth < 1) {
        throw_invalid("build_design: bandwidth must be >= 1, got " + std::to_string(bandwidth));
    }
    const long long sm = static_cast<long long>(period) * bandwidth;

    std::vector<long long> past(static_cast<std::size_t>(sm));
    std::vector<long long> future(static_cast<std::size_t>(sm));
    std::vector<long long> causal(static_cast<std::size_t>(sm + 1));
    std::vector<long long> both(static_cast<std::size_t>(2 * sm + 1));
    for (long long j = 0; j < sm; ++j) {
        past[static_cast<std::size_t>(j)] = j + 1;
        future[static_cast<std::size_t>(j)] = j - sm;
    }
    for (long long j = 0; j <= sm; ++j) {
        causal[static_cast<std::size_t>(j)] = j;
    }
    for (long long j = -sm; j <= sm; ++j) {
        both[static_cast<std::size_t>(j + sm)] = j;
    }

    DesignSet d;
    d.period = period;
    d.bandwidth = bandwidth;
    d.x0 = design_row(period, 0);
    d.xp = design_matrix(period, past);
    d.xf = design_matrix(period, future);
    d.xc = design_matrix(period, causal);
    d.x = design_matrix(period, both);
    return d;
}

Matrix exchange_matrix(std::size_t n) {
    const auto k = static_cast<Eigen::Index>(n);
    Matrix e = Matrix::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        e(i, k - 1 - i) = 1.0;
    }
    return e;
}

Matrix sine_sign_switch(int period) {
    const auto w = static_cast<Eigen::Index>(design_width(period));
    Matrix s = Matrix::Identity(w, w);
    const auto pairs = static_cast<Eigen::Index>(sine_count(period));
    for (Eigen::Index k = 1; k <= pairs; ++k) {
        s(2 * k, 2 * k) = -1.0;
    }
    return s;
}

namespace {

Matrix weighted_gram(const Matrix& x, std::span<const double> kernel, Matrix& kx) {
    kx = x;
    if (!kernel.empty()) {
        if (kernel.size() != static_cast<std::size_t>(x.rows())) {
            throw_invalid("kernel length " + std::to_string(kernel.size()) +
                          " does not match window length " + std::to_string(x.rows()));
        }
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double k = kernel[static_cast<std::size_t>(i)];
            if (!(k >= 0.0) || !std::isfinite(k)) {
                throw_invalid("kernel weights must be finite and non-negative");
            }
            kx.row(i) *= k;
        }
    }
    return x.transpose() * kx;
}

}  // namespace

Vector projection_weights(const Matrix& x, std::span<const double> kernel, const Vector& target,
                          std::span<const std::string> labels) {
    Matrix kx;
    const Matrix gram = weighted_gram(x, kernel, kx);
    const auto sol = linalg::solve_psd_min_norm(gram, target);
    const double scale = std::max(1.0, target.cwiseAbs().maxCoeff());
    if (!(sol.residual <= 1e-8 * scale)) {
        Eigen::Index worst = 0;
        (gram * sol.x - target).cwiseAbs().maxCoeff(&worst);
        const std::string name = static_cast<std::size_t>(worst) < labels.size()
                                     ? labels[static_cast<std::size_t>(worst)]
                                     : "column " + std::to_string(worst);
        throw Error(ErrorCode::RankDeficient,
                    "weighted design is rank deficient: target not estimable, offending column " +
                        name);
    }
    return kx * sol.x;
}

Vector weighted_residual(const Matrix& x, std::span<const double> kernel, const Vector& v) {
    Matrix kx;
    const Matrix gram = weighted_gram(x, kernel, kx);
    const auto sol = linalg::solve_psd_min_norm(gram, kx.transpose() * v);
    return v - x * sol.x;
}

TrendColumns orthogonalize_trend(const DesignSet& design, std::span<const double> causal_kernel) {
    const auto n = static_cast<Eigen::Index>(design.causal_length());
    TrendColumns t;
    t.jc.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        t.jc(j) = -static_cast<double>(j);
    }
    t.jc_star = weighted_residual(design.xc, causal_kernel, t.jc);
    t.j0c_star = t.jc_star(0);

    double energy = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double k = causal_kernel.empty() ? 1.0 : causal_kernel[static_cast<std::size_t>(j)];
        energy += k * t.jc_star(j) * t.jc_star(j);
    }
    double total = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double k = causal_kernel.empty() ? 1.0 : causal_kernel[static_cast<std::size_t>(j)];
        total += k * t.jc(j) * t.jc(j);
    }
    if (!(energy > 1e-12 * std::max(1.0, total))) {
        throw Error(ErrorCode::RankDeficient,
                    "trend column is not identifiable under the kernel: it lies in the span of "
                    "the level and seasonal columns on the kernel support");
    }
    return t;
}

Vector orthogonalize_trend_two_sided(const DesignSet& design, std::span<const double> kernel) {
    const auto n = static_cast<Eigen::Index>(design.two_sided_length());
    const long long sm = static_cast<long long>(design.period) * design.bandwidth;
    Vector j(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        j(i) = static_cast<double>(sm - i);
    }
    return weighted_residual(design.x, kernel, j);
}

}  // namespace climnorm
