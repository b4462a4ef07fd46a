#include "climnorm/stability.hpp"

#include "climnorm/error.hpp"
#include "climnorm/linalg.hpp"
#include "climnorm/trig_design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace climnorm {

double bartlett_lrv(std::span<const double> e, int lags) {
    if (lags < 0) {
        throw_invalid("bartlett_lrv: truncation lag must be >= 0");
    }
    const std::size_t n = e.size();
    if (n <= static_cast<std::size_t>(lags)) {
        throw_invalid("bartlett_lrv: series length " + std::to_string(n) +
                      " must exceed the truncation lag " + std::to_string(lags));
    }
    double mean = 0.0;
    for (double v : e) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    auto acov = [&](std::size_t k) {
        double acc = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) {
            acc += (e[t] - mean) * (e[t + k] - mean);
        }
        return acc / static_cast<double>(n);
    };
    const double g0 = acov(0);
    double lrv = g0;
    for (int k = 1; k <= lags; ++k) {
        lrv += 2.0 * (1.0 - static_cast<double>(k) / (lags + 1.0)) * acov(static_cast<std::size_t>(k));
    }
    const double floor = g0 * static_cast<double>(lags + 1) / static_cast<double>(n);
    if (!(g0 > 0.0) || !(lrv > floor)) {
        throw Error(ErrorCode::DegenerateVariance,
                    "long-run variance estimate " + std::to_string(lrv) +
                        " is degenerate (statistic undefined)");
    }
    return lrv;
}

StabilityReport stability_stats(const SeasonalSeries& y, bool include_trend, int lags) {
    const int s = y.period();
    if (s < 2) {
        throw_invalid("stability_stats: period must be >= 2");
    }
    std::vector<std::size_t> keep;
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (!y.missing(t)) {
            keep.push_back(t);
        }
    }
    const std::size_t n = keep.size();
    if (n < 3 * static_cast<std::size_t>(s)) {
        throw_invalid("stability_stats: need at least three years of observations");
    }

    const auto width = static_cast<Eigen::Index>(design_width(s));
    const Eigen::Index cols = width + (include_trend ? 1 : 0);
    const double centre = 0.5 * static_cast<double>(y.size() - 1);
    linalg::Matrix x(static_cast<Eigen::Index>(n), cols);
    linalg::Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        const auto t = keep[i];
        x.row(row).head(width) = design_row(s, static_cast<long long>(t + 1)).transpose();
        if (include_trend) {
            x(row, width) = (static_cast<double>(t) - centre) / static_cast<double>(y.size());
        }
        v(row) = y[t];
    }
    const linalg::Vector coef = linalg::solve_spd(x.transpose() * x, x.transpose() * v);
    const linalg::Vector resid = v - x * coef;
    std::vector<double> e(resid.data(), resid.data() + resid.size());

    StabilityReport rep;
    rep.lags = lags;
    rep.trend_included = include_trend;
    rep.n = n;
    rep.long_run_variance = bartlett_lrv(e, lags);
    const double denom = static_cast<double>(n) * static_cast<double>(n) * rep.long_run_variance;

    {
        double partial = 0.0;
        double acc = 0.0;
        for (double r : e) {
            partial += r;
            acc += partial * partial;
        }
        rep.omega.push_back(acc / denom);
        rep.critical_values.push_back(include_trend ? kCritLevelWithTrend : kCritSingle);
    }
    const auto pairs = static_cast<long long>(sine_count(s));
    for (long long j = 1; j <= pairs; ++j) {
        double pc = 0.0;
        double ps = 0.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto idx = static_cast<long long>(keep[i] + 1);
            pc += e[i] * seasonal_cos(j, idx, s);
            ps += e[i] * seasonal_sin(j, idx, s);
            acc += pc * pc + ps * ps;
        }
        // Each of e cos and e sin carries half the long-run variance.
        rep.omega.push_back(2.0 * acc / denom);
        rep.critical_values.push_back(kCritSeasonalPair);
    }
    if (s % 2 == 0) {
        double pc = 0.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            pc += e[i] * seasonal_cos(s / 2, static_cast<long long>(keep[i] + 1), s);
            acc += pc * pc;
        }
        rep.omega.push_back(acc / denom);
        rep.critical_values.push_back(kCritSingle);
    }
    for (std::size_t j = 0; j < rep.omega.size(); ++j) {
        rep.reject.push_back(rep.omega[j] > rep.critical_values[j]);
    }
    return rep;
}

std::vector<PersistenceValue> anomaly_persistence_check(const SeasonalSeries& anomalies,
                                                        std::span<const int> lag_values) {
    std::vector<double> e;
    for (std::size_t t = 0; t < anomalies.size(); ++t) {
        if (!anomalies.missing(t)) {
            e.push_back(anomalies[t]);
        }
    }
    if (e.empty()) {
        throw Error(ErrorCode::DegenerateVariance, "anomaly_persistence_check: no valid anomalies");
    }
    double mean = 0.0;
    for (double v : e) {
        mean += v;
    }
    mean /= static_cast<double>(e.size());
    for (double& v : e) {
        v -= mean;
    }
    double partial = 0.0;
    double acc = 0.0;
    for (double v : e) {
        partial += v;
        acc += partial * partial;
    }
    const double n = static_cast<double>(e.size());
    std::vector<PersistenceValue> out;
    for (int m : lag_values) {
        const double lrv = bartlett_lrv(e, m);
        const double omega = acc / (n * n * lrv);
        out.push_back({m, omega, omega > kCritSingle});
    }
    return out;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) {
        throw_invalid("quantile of empty data");
    }
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<std::vector<double>> stability_deciles(std::span<const StabilityReport> reports) {
    if (reports.empty()) {
        throw_invalid("stability_deciles: no reports");
    }
    const std::size_t k = reports.front().omega.size();
    std::vector<std::vector<double>> table(9, std::vector<double>(k, 0.0));
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> col;
        for (const auto& r : reports) {
            if (r.omega.size() != k) {
                throw_invalid("stability_deciles: reports have different periods");
            }
            col.push_back(r.omega[j]);
        }
        for (int d = 1; d <= 9; ++d) {
            table[static_cast<std::size_t>(d - 1)][j] = quantile(col, d / 10.0);
        }
    }
    return table;
}

}  // namespace climnorm
