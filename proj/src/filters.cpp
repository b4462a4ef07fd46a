#include "climnorm/filters.hpp"

#include "climnorm/error.hpp"
#include "climnorm/trig_design.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace climnorm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_ltr_args(int m, int period) {
    if (period < 2) {
        throw_invalid("LTR filters need period >= 2, got " + std::to_string(period));
    }
    if (m < 1) {
        throw_invalid("LTR filters need bandwidth m >= 1, got " + std::to_string(m));
    }
}

std::vector<double> to_std(const linalg::Vector& v) {
    return {v.data(), v.data() + v.size()};
}

FilterWeights make_weights(std::vector<double> w, long long first, int period, int m,
                           FilterKind kind, std::optional<int> order, double lambda = 0.0) {
    FilterWeights f;
    f.weights = std::move(w);
    f.first_offset = first;
    f.period = period;
    f.bandwidth = m;
    f.kind = kind;
    f.kernel_order = order;
    f.lambda = lambda;
    return f;
}

std::vector<double> causal_part(int m, int period, const KernelWeights& kernel) {
    const long long sm = static_cast<long long>(period) * m;
    const auto expected = static_cast<std::size_t>(sm + 1);
    if (kernel.window == Window::Causal) {
        if (kernel.weights.size() != expected) {
            throw_invalid("causal kernel length " + std::to_string(kernel.weights.size()) +
                          " does not match window sm+1 = " + std::to_string(expected));
        }
        return kernel.weights;
    }
    if (kernel.weights.size() != static_cast<std::size_t>(2 * sm + 1)) {
        throw_invalid("two-sided kernel length " + std::to_string(kernel.weights.size()) +
                      " does not match window 2sm+1 = " + std::to_string(2 * sm + 1));
    }
    return {kernel.weights.begin() + sm, kernel.weights.end()};
}

// Uniform-kernel trend residual: j minus the mean of its residue class mod s
// within lags 0..sm (the level and harmonics span every s-periodic sequence).
linalg::Vector uniform_trend_residual(int m, int period) {
    const long long sm = static_cast<long long>(period) * m;
    std::vector<double> sum(static_cast<std::size_t>(period), 0.0);
    std::vector<double> count(static_cast<std::size_t>(period), 0.0);
    for (long long j = 0; j <= sm; ++j) {
        sum[static_cast<std::size_t>(j % period)] += -static_cast<double>(j);
        count[static_cast<std::size_t>(j % period)] += 1.0;
    }
    linalg::Vector r(sm + 1);
    for (long long j = 0; j <= sm; ++j) {
        const auto c = static_cast<std::size_t>(j % period);
        r(j) = -static_cast<double>(j) - sum[c] / count[c];
    }
    return r;
}

linalg::Vector adjustment_from_residual(const linalg::Vector& jstar, std::span<const double> kernel) {
    linalg::Vector kj = jstar;
    if (!kernel.empty()) {
        for (Eigen::Index i = 0; i < kj.size(); ++i) {
            kj(i) *= kernel[static_cast<std::size_t>(i)];
        }
    }
    const double energy = jstar.dot(kj);
    return kj * (jstar(0) / energy);
}

CausalComponents components_for_kernel(int m, int period, std::span<const double> causal_kernel) {
    require_ltr_args(m, period);
    const DesignSet design = build_design(period, m);
    const auto labels = design_labels(period);
    CausalComponents c;
    c.wc = projection_weights(design.xc, causal_kernel, design.x0, labels);
    const TrendColumns trend = orthogonalize_trend(design, causal_kernel);
    c.j0c_star = trend.j0c_star;
    c.wa = adjustment_from_residual(trend.jc_star, causal_kernel);
    return c;
}

}  // namespace

std::string_view to_string(FilterKind kind) {
    switch (kind) {
        case FilterKind::Wmo: return "wmo";
        case FilterKind::Concurrent: return "concurrent";
        case FilterKind::TwoSided: return "two_sided";
        case FilterKind::Daf: return "daf";
        case FilterKind::TrendAdjustment: return "trend_adjusted";
        case FilterKind::Regularized: return "regularized";
    }
    return "unknown";
}

std::optional<FilterKind> parse_filter_kind(std::string_view text) {
    for (auto k : {FilterKind::Wmo, FilterKind::Concurrent, FilterKind::TwoSided, FilterKind::Daf,
                   FilterKind::TrendAdjustment, FilterKind::Regularized}) {
        if (text == to_string(k)) {
            return k;
        }
    }
    return std::nullopt;
}

double FilterWeights::at(long long offset) const noexcept {
    const long long i = offset - first_offset;
    if (i < 0 || i >= static_cast<long long>(weights.size())) {
        return 0.0;
    }
    return weights[static_cast<std::size_t>(i)];
}

double FilterWeights::sum() const noexcept {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

long long wmo_reference_end(const SeasonalSeries& y, std::size_t target, int cadence) {
    if (cadence != 5 && cadence != 10) {
        throw_invalid("WMO update cadence must be 5 or 10 years, got " + std::to_string(cadence));
    }
    const int year = y.year_at(target);
    // Largest multiple of the cadence strictly before the target's year.
    const long long prev = static_cast<long long>(year) - 1;
    const long long anchor = (prev >= 0 ? prev / cadence : (prev - cadence + 1) / cadence) * cadence;
    return y.index_of(static_cast<int>(anchor), y.period());
}

FilterWeights wmo_weights(int m, int period, long long target, long long reference_end) {
    if (m < 0) {
        throw_invalid("WMO filter needs m >= 0");
    }
    if (period < 1) {
        throw_invalid("WMO filter needs period >= 1");
    }
    if (target < reference_end) {
        throw_invalid("WMO target " + std::to_string(target) + " precedes the reference end " +
                      std::to_string(reference_end));
    }
    const long long gap = target - reference_end;
    const long long lead = period * ((gap + period - 1) / period);
    const long long span = static_cast<long long>(period) * m;
    if (target - lead - span < 0) {
        throw CoverageError("WMO reference block for target " + std::to_string(target) +
                                " starts before the series; reference end must be at index >= " +
                                std::to_string(span),
                            static_cast<std::size_t>(span));
    }
    std::vector<double> w(static_cast<std::size_t>(span + 1), 0.0);
    for (long long i = 0; i <= m; ++i) {
        w[static_cast<std::size_t>(i * period)] = 1.0 / (m + 1);
    }
    return make_weights(std::move(w), lead, period, m, FilterKind::Wmo, 0);
}

FilterWeights concurrent_weights(int m, int period) {
    if (m < 0) {
        throw_invalid("concurrent filter needs m >= 0");
    }
    if (period < 1) {
        throw_invalid("concurrent filter needs period >= 1");
    }
    const long long sm = static_cast<long long>(period) * m;
    std::vector<double> w(static_cast<std::size_t>(sm + 1), 0.0);
    for (long long j = 0; j <= sm; j += period) {
        w[static_cast<std::size_t>(j)] = 1.0 / (m + 1);
    }
    return make_weights(std::move(w), 0, period, m, FilterKind::Concurrent, 0);
}

FilterWeights two_sided_weights(int m, int period, const KernelSpec& kernel) {
    require_ltr_args(m, period);
    if (!kernel.is_uniform()) {
        return two_sided_weights(m, period, seasonal_kernel(*kernel.order, m, period, Window::TwoSided));
    }
    const long long sm = static_cast<long long>(period) * m;
    std::vector<double> w(static_cast<std::size_t>(2 * sm + 1), 0.0);
    for (long long j = -sm; j <= sm; j += period) {
        w[static_cast<std::size_t>(j + sm)] = 1.0 / (2 * m + 1);
    }
    return make_weights(std::move(w), -sm, period, m, FilterKind::TwoSided, std::nullopt);
}

FilterWeights two_sided_weights(int m, int period, const KernelWeights& kernel) {
    require_ltr_args(m, period);
    const long long sm = static_cast<long long>(period) * m;
    if (kernel.window != Window::TwoSided || kernel.weights.size() != static_cast<std::size_t>(2 * sm + 1)) {
        throw_invalid("two-sided filter needs a two-sided kernel of length 2sm+1 = " +
                      std::to_string(2 * sm + 1));
    }
    const DesignSet design = build_design(period, m);
    const auto w = projection_weights(design.x, kernel.weights, design.x0, design_labels(period));
    return make_weights(to_std(w), -sm, period, m, FilterKind::TwoSided, kernel.order);
}

FilterWeights daf_weights(int m, int period, const KernelSpec& kernel) {
    require_ltr_args(m, period);
    if (!kernel.is_uniform()) {
        return daf_weights(m, period, seasonal_kernel(*kernel.order, m, period, Window::Causal));
    }
    auto w = concurrent_weights(m, period);
    w.kind = FilterKind::Daf;
    w.kernel_order = std::nullopt;
    return w;
}

FilterWeights daf_weights(int m, int period, const KernelWeights& kernel) {
    require_ltr_args(m, period);
    const auto kc = causal_part(m, period, kernel);
    const DesignSet design = build_design(period, m);
    const auto w = projection_weights(design.xc, kc, design.x0, design_labels(period));
    return make_weights(to_std(w), 0, period, m, FilterKind::Daf, kernel.order);
}

FilterWeights trend_adjustment_weights(int m, int period, const KernelSpec& kernel) {
    require_ltr_args(m, period);
    if (!kernel.is_uniform()) {
        return trend_adjustment_weights(m, period,
                                        seasonal_kernel(*kernel.order, m, period, Window::Causal));
    }
    const auto wa = adjustment_from_residual(uniform_trend_residual(m, period), {});
    return make_weights(to_std(wa), 0, period, m, FilterKind::TrendAdjustment, std::nullopt);
}

FilterWeights trend_adjustment_weights(int m, int period, const KernelWeights& kernel) {
    require_ltr_args(m, period);
    const auto kc = causal_part(m, period, kernel);
    const DesignSet design = build_design(period, m);
    const TrendColumns trend = orthogonalize_trend(design, kc);
    const auto wa = adjustment_from_residual(trend.jc_star, kc);
    return make_weights(to_std(wa), 0, period, m, FilterKind::TrendAdjustment, kernel.order);
}

namespace {

FilterWeights combine(const FilterWeights& wc, const FilterWeights& wa, double lambda) {
    FilterWeights r = wc;
    for (std::size_t i = 0; i < r.weights.size(); ++i) {
        r.weights[i] += lambda * wa.weights[i];
    }
    r.kind = FilterKind::Regularized;
    r.lambda = lambda;
    return r;
}

void require_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw_invalid("shrinkage lambda must lie in [0, 1], got " + std::to_string(lambda));
    }
}

}  // namespace

FilterWeights regularized_weights(int m, int period, double lambda, const KernelSpec& kernel) {
    require_lambda(lambda);
    return combine(daf_weights(m, period, kernel), trend_adjustment_weights(m, period, kernel), lambda);
}

FilterWeights regularized_weights(int m, int period, double lambda, const KernelWeights& kernel) {
    require_lambda(lambda);
    return combine(daf_weights(m, period, kernel), trend_adjustment_weights(m, period, kernel), lambda);
}

std::vector<double> causal_kernel_diag(int m, int period, const KernelSpec& kernel) {
    if (kernel.is_uniform()) {
        return {};
    }
    return seasonal_kernel(*kernel.order, m, period, Window::Causal).weights;
}

CausalComponents causal_components(int m, int period, const KernelSpec& kernel) {
    require_ltr_args(m, period);
    if (kernel.is_uniform()) {
        CausalComponents c;
        const auto wc = concurrent_weights(m, period);
        c.wc = Eigen::Map<const linalg::Vector>(wc.weights.data(),
                                                static_cast<Eigen::Index>(wc.weights.size()));
        const auto jstar = uniform_trend_residual(m, period);
        c.j0c_star = jstar(0);
        c.wa = adjustment_from_residual(jstar, {});
        return c;
    }
    const auto kc = causal_kernel_diag(m, period, kernel);
    return components_for_kernel(m, period, kc);
}

namespace {

SeasonalSeries masked_like(const SeasonalSeries& y, std::vector<double> values, std::vector<bool> mask) {
    return SeasonalSeries(std::move(values), std::move(mask), y.period(), y.start_year(),
                          y.start_season());
}

}  // namespace

NormalsResult apply_filter(const SeasonalSeries& y, const FilterWeights& w) {
    if (w.weights.empty()) {
        throw_invalid("apply_filter: empty filter");
    }
    if (w.period != y.period()) {
        throw_invalid("apply_filter: filter period " + std::to_string(w.period) +
                      " differs from series period " + std::to_string(y.period()));
    }
    const auto n = static_cast<long long>(y.size());
    const long long lo = w.first_offset;
    const long long hi = w.last_offset();
    const long long first = std::max<long long>(0, hi);
    const long long last = std::min<long long>(n, n + lo);  // one past
    if (first >= last) {
        throw CoverageError("series of length " + std::to_string(n) +
                                " is shorter than the filter window",
                            static_cast<std::size_t>(std::max<long long>(0, hi)));
    }

    std::vector<double> normals(static_cast<std::size_t>(n), kNaN);
    std::vector<double> anomalies(static_cast<std::size_t>(n), kNaN);
    std::vector<bool> mask(static_cast<std::size_t>(n), true);
    for (long long t = first; t < last; ++t) {
        double mu = 0.0;
        bool ok = !y.missing(static_cast<std::size_t>(t));
        for (long long j = lo; j <= hi && ok; ++j) {
            const double wj = w.weights[static_cast<std::size_t>(j - lo)];
            if (wj == 0.0) {
                continue;
            }
            const auto idx = static_cast<std::size_t>(t - j);
            if (y.missing(idx)) {
                ok = false;
                break;
            }
            mu += wj * y[idx];
        }
        if (ok) {
            const auto i = static_cast<std::size_t>(t);
            normals[i] = mu;
            anomalies[i] = y[i] - mu;
            mask[i] = false;
        }
    }
    NormalsResult r{masked_like(y, std::move(normals), mask), masked_like(y, std::move(anomalies), mask),
                    static_cast<std::size_t>(first), static_cast<std::size_t>(last), w};
    return r;
}

NormalsResult apply_wmo(const SeasonalSeries& y, int m, int cadence) {
    const auto n = y.size();
    std::vector<double> normals(n, kNaN);
    std::vector<double> anomalies(n, kNaN);
    std::vector<bool> mask(n, true);
    std::optional<std::size_t> first;
    std::size_t last = 0;
    FilterWeights used;
    for (std::size_t t = 0; t < n; ++t) {
        const long long ref_end = wmo_reference_end(y, t, cadence);
        const long long gap = static_cast<long long>(t) - ref_end;
        const long long lead = y.period() * ((gap + y.period() - 1) / y.period());
        if (static_cast<long long>(t) - lead - static_cast<long long>(y.period()) * m < 0) {
            continue;
        }
        const FilterWeights w = wmo_weights(m, y.period(), static_cast<long long>(t), ref_end);
        if (!first) {
            first = t;
        }
        last = t + 1;
        used = w;
        bool ok = !y.missing(t);
        double mu = 0.0;
        for (std::size_t i = 0; i < w.weights.size() && ok; ++i) {
            if (w.weights[i] == 0.0) {
                continue;
            }
            const auto idx = t - static_cast<std::size_t>(w.first_offset) - i;
            if (y.missing(idx)) {
                ok = false;
            } else {
                mu += w.weights[i] * y[idx];
            }
        }
        if (ok) {
            normals[t] = mu;
            anomalies[t] = y[t] - mu;
            mask[t] = false;
        }
    }
    if (!first) {
        throw CoverageError("series is too short for a " + std::to_string(m + 1) +
                                "-year reference period",
                            n);
    }
    return NormalsResult{masked_like(y, std::move(normals), mask), masked_like(y, std::move(anomalies), mask),
                         *first, last, used};
}

}  // namespace climnorm
