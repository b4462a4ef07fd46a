#include "climnorm/selection.hpp"

#include "climnorm/error.hpp"
#include "climnorm/linalg.hpp"
#include "climnorm/trig_design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace climnorm {

MseInputs make_mse_inputs(double beta1_hat, std::vector<double> gamma_psi, int period) {
    if (gamma_psi.empty() || !(gamma_psi[0] > 0.0)) {
        throw_invalid("MSE inputs: lag-0 autocovariance must be positive");
    }
    if (!std::isfinite(beta1_hat)) {
        throw_invalid("MSE inputs: slope is not finite");
    }
    const auto gamma = linalg::symmetric_toeplitz(gamma_psi, gamma_psi.size());
    if (!linalg::is_psd(gamma / gamma_psi[0])) {
        throw_invalid("MSE inputs: autocovariance sequence does not give a positive semidefinite "
                      "Toeplitz matrix");
    }
    return MseInputs{beta1_hat, std::move(gamma_psi), period};
}

double estimate_slope(const SeasonalSeries& y) {
    const int s = y.period();
    if (s < 2) {
        throw_invalid("estimate_slope: period must be >= 2");
    }
    const std::size_t n = y.size();
    if (n < 3 * static_cast<std::size_t>(s)) {
        throw_invalid("estimate_slope: need at least three full years (" + std::to_string(3 * s) +
                      " observations), got " + std::to_string(n));
    }
    if (y.any_missing()) {
        throw_invalid("estimate_slope: series contains missing values");
    }
    const auto width = static_cast<Eigen::Index>(design_width(s));
    const double centre = 0.5 * static_cast<double>(n - 1);
    linalg::Matrix x(static_cast<Eigen::Index>(n), width + 1);
    linalg::Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < n; ++t) {
        const auto row = static_cast<Eigen::Index>(t);
        x.row(row).head(width) = design_row(s, static_cast<long long>(t)).transpose();
        x(row, width) = (static_cast<double>(t) - centre) / static_cast<double>(n);
        v(row) = y[t];
    }
    const linalg::Vector coef = linalg::solve_spd(x.transpose() * x, x.transpose() * v);
    return coef(width) / static_cast<double>(n);
}

AcovEstimate estimate_anomaly_acov(const SeasonalSeries& y, int pilot_m, std::size_t max_lag) {
    if (pilot_m < 1) {
        throw_invalid("estimate_anomaly_acov: pilot bandwidth must be >= 1");
    }
    const auto pilot = two_sided_weights(pilot_m, y.period(), KernelSpec::uniform());
    const std::size_t span = 2 * static_cast<std::size_t>(y.period()) * static_cast<std::size_t>(pilot_m);
    if (y.size() <= span + max_lag) {
        throw CoverageError("estimate_anomaly_acov: " + std::to_string(y.size()) +
                                " observations cannot support a pilot window of " +
                                std::to_string(span + 1) + " plus " + std::to_string(max_lag) +
                                " lags",
                            span + max_lag + 1);
    }
    const NormalsResult r = apply_filter(y, pilot);

    std::vector<double> a;
    std::vector<bool> present;
    for (std::size_t t = r.valid_from; t < r.valid_to; ++t) {
        present.push_back(!r.anomalies.missing(t));
        a.push_back(present.back() ? r.anomalies[t] : 0.0);
    }
    double mean = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (present[i]) {
            mean += a[i];
            ++count;
        }
    }
    if (count <= max_lag) {
        throw CoverageError("estimate_anomaly_acov: too few valid pilot anomalies", span + max_lag + 1);
    }
    mean /= static_cast<double>(count);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = present[i] ? a[i] - mean : 0.0;
    }

    AcovEstimate out;
    out.pilot_count = count;
    out.values.assign(max_lag + 1, 0.0);
    const double dof = (2.0 * pilot_m + 1.0) / (2.0 * pilot_m);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t + k < a.size(); ++t) {
            acc += a[t] * a[t + k];
        }
        const double taper = 1.0 - static_cast<double>(k) / static_cast<double>(max_lag + 1);
        out.values[k] = dof * taper * acc / static_cast<double>(count);
    }
    double scale = 0.0;
    for (std::size_t t = r.valid_from; t < r.valid_to; ++t) {
        if (!y.missing(t)) {
            scale = std::max(scale, std::abs(y[t]));
        }
    }
    out.degenerate = !(out.values[0] > 1e-24 * std::max(1.0, scale * scale));
    if (out.degenerate) {
        std::fill(out.values.begin(), out.values.end(), 0.0);
    }
    return out;
}

namespace {

struct Quadratics {
    double bias_sq = 0.0;  ///< beta1^2 j*_{0c}^2
    double vcc = 0.0;
    double vca = 0.0;
    double vaa = 0.0;
};

Quadratics quadratics(int m, const MseInputs& inputs, const KernelSpec& kernel) {
    const std::size_t size = static_cast<std::size_t>(inputs.period) * static_cast<std::size_t>(m) + 1;
    if (inputs.gamma_psi.size() < size) {
        throw_invalid("MSE: autocovariances available to lag " +
                      std::to_string(inputs.gamma_psi.size() - 1) + ", need lag " +
                      std::to_string(size - 1));
    }
    const auto c = causal_components(m, inputs.period, kernel);
    const auto gamma = linalg::symmetric_toeplitz(inputs.gamma_psi, size);
    const linalg::Vector gc = gamma * c.wc;
    const linalg::Vector ga = gamma * c.wa;
    Quadratics q;
    q.bias_sq = inputs.beta1_hat * inputs.beta1_hat * c.j0c_star * c.j0c_star;
    q.vcc = c.wc.dot(gc);
    q.vca = c.wa.dot(gc);
    q.vaa = c.wa.dot(ga);
    return q;
}

void check_grids(const std::vector<double>& grid_lambda, const std::vector<int>& grid_m) {
    if (grid_lambda.empty() || grid_m.empty()) {
        throw_invalid("selection grid is empty");
    }
    for (double l : grid_lambda) {
        if (!(l >= 0.0 && l <= 1.0)) {
            throw_invalid("selection grid: lambda " + std::to_string(l) + " outside [0, 1]");
        }
    }
    for (int m : grid_m) {
        if (m < 1) {
            throw_invalid("selection grid: bandwidth " + std::to_string(m) + " below 1");
        }
    }
}

}  // namespace

double mse(double lambda, int m, const MseInputs& inputs, const KernelSpec& kernel) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw_invalid("mse: lambda must lie in [0, 1]");
    }
    const std::size_t size = static_cast<std::size_t>(inputs.period) * static_cast<std::size_t>(m) + 1;
    if (inputs.gamma_psi.size() < size) {
        throw_invalid("mse: autocovariances do not reach lag " + std::to_string(size - 1));
    }
    const auto c = causal_components(m, inputs.period, kernel);
    const linalg::Vector wr = c.wc + lambda * c.wa;
    const auto gamma = linalg::symmetric_toeplitz(inputs.gamma_psi, size);
    const double bias = (lambda - 1.0) * inputs.beta1_hat * c.j0c_star;
    return bias * bias + wr.dot(gamma * wr);
}

std::vector<double> default_lambda_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 10; ++i) {
        g.push_back(i / 10.0);
    }
    return g;
}

std::vector<int> default_m_grid() {
    std::vector<int> g;
    for (int m = 6; m <= 30; ++m) {
        g.push_back(m);
    }
    return g;
}

SelectionResult select_params(const MseInputs& inputs, const std::vector<double>& grid_lambda,
                              const std::vector<int>& grid_m, const KernelSpec& kernel) {
    check_grids(grid_lambda, grid_m);
    SelectionResult r;
    r.grid_lambda = grid_lambda;
    r.requested_m = grid_m;
    r.inputs = inputs;
    r.kernel = kernel;
    for (int m : grid_m) {
        const std::size_t size = static_cast<std::size_t>(inputs.period) * static_cast<std::size_t>(m) + 1;
        if (size <= inputs.gamma_psi.size()) {
            r.grid_m.push_back(m);
        }
    }
    if (r.grid_m.empty()) {
        throw CoverageError("selection: no bandwidth in the grid is supported by the data",
                            static_cast<std::size_t>(inputs.period) *
                                    static_cast<std::size_t>(*std::min_element(grid_m.begin(), grid_m.end())) +
                                1);
    }

    r.mse_surface.assign(grid_lambda.size(), std::vector<double>(r.grid_m.size(), 0.0));
    for (std::size_t im = 0; im < r.grid_m.size(); ++im) {
        const Quadratics q = quadratics(r.grid_m[im], inputs, kernel);
        for (std::size_t il = 0; il < grid_lambda.size(); ++il) {
            const double l = grid_lambda[il];
            r.mse_surface[il][im] =
                (l - 1.0) * (l - 1.0) * q.bias_sq + q.vcc + 2.0 * l * q.vca + l * l * q.vaa;
        }
    }

    // Visit cells by increasing m, then increasing lambda; keep the first minimum.
    std::vector<std::size_t> m_order(r.grid_m.size());
    std::vector<std::size_t> l_order(grid_lambda.size());
    for (std::size_t i = 0; i < m_order.size(); ++i) m_order[i] = i;
    for (std::size_t i = 0; i < l_order.size(); ++i) l_order[i] = i;
    std::stable_sort(m_order.begin(), m_order.end(),
                     [&](std::size_t a, std::size_t b) { return r.grid_m[a] < r.grid_m[b]; });
    std::stable_sort(l_order.begin(), l_order.end(),
                     [&](std::size_t a, std::size_t b) { return grid_lambda[a] < grid_lambda[b]; });
    bool found = false;
    for (std::size_t im : m_order) {
        for (std::size_t il : l_order) {
            const double v = r.mse_surface[il][im];
            if (!found || v < r.mse_min) {
                found = true;
                r.mse_min = v;
                r.m_hat = r.grid_m[im];
                r.lambda_hat = grid_lambda[il];
            }
        }
    }
    return r;
}

SelectionResult select_params(const SeasonalSeries& y, const std::vector<double>& grid_lambda,
                              const std::vector<int>& grid_m, const KernelSpec& kernel,
                              const SelectionOptions& options) {
    check_grids(grid_lambda, grid_m);
    const int s = y.period();
    const std::size_t pilot_span = 2 * static_cast<std::size_t>(s) * static_cast<std::size_t>(options.pilot_m);

    std::vector<int> feasible;
    for (int m : grid_m) {
        const std::size_t lag = static_cast<std::size_t>(s) * static_cast<std::size_t>(m);
        if (lag + 1 <= y.size() && y.size() > pilot_span + lag) {
            feasible.push_back(m);
        }
    }
    if (feasible.empty()) {
        const int smallest = *std::min_element(grid_m.begin(), grid_m.end());
        throw CoverageError("selection: series of length " + std::to_string(y.size()) +
                                " supports no bandwidth in the grid",
                            pilot_span + static_cast<std::size_t>(s) * static_cast<std::size_t>(smallest) + 1);
    }
    const int m_max = *std::max_element(feasible.begin(), feasible.end());

    const double beta1 = estimate_slope(y);
    const AcovEstimate acov =
        estimate_anomaly_acov(y, options.pilot_m, static_cast<std::size_t>(s) * static_cast<std::size_t>(m_max));
    if (acov.degenerate) {
        throw_invalid("selection: pilot anomalies are identically zero");
    }
    const MseInputs inputs = make_mse_inputs(beta1, acov.values, s);
    SelectionResult r = select_params(inputs, grid_lambda, feasible, kernel);
    r.requested_m = grid_m;
    return r;
}

}  // namespace climnorm
