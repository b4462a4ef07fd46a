#include "climnorm/series.hpp"

#include "climnorm/error.hpp"
#include "climnorm/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace climnorm {

SeasonalSeries::SeasonalSeries(std::vector<double> values, int period, int start_year,
                               int start_season)
    : values_(std::move(values)),
      missing_(values_.size(), false),
      period_(period),
      start_year_(start_year),
      start_season_(start_season) {
    validate();
}

SeasonalSeries::SeasonalSeries(std::vector<double> values, std::vector<bool> missing, int period,
                               int start_year, int start_season)
    : values_(std::move(values)),
      missing_(std::move(missing)),
      period_(period),
      start_year_(start_year),
      start_season_(start_season) {
    validate();
}

void SeasonalSeries::validate() const {
    if (period_ < 1) {
        throw_invalid("series: period must be >= 1, got " + std::to_string(period_));
    }
    if (values_.empty()) {
        throw_invalid("series: empty");
    }
    if (start_season_ < 1 || start_season_ > period_) {
        throw_invalid("series: start season " + std::to_string(start_season_) + " outside [1, " +
                      std::to_string(period_) + "]");
    }
    if (missing_.size() != values_.size()) {
        throw_invalid("series: mask length differs from value count");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!missing_[i] && !std::isfinite(values_[i])) {
            throw_invalid("series: non-finite value at index " + std::to_string(i));
        }
    }
}

bool SeasonalSeries::any_missing() const noexcept {
    return std::find(missing_.begin(), missing_.end(), true) != missing_.end();
}

int SeasonalSeries::year_at(std::size_t i) const noexcept {
    const long long offset = static_cast<long long>(start_season_ - 1) + static_cast<long long>(i);
    return start_year_ + static_cast<int>(offset / period_);
}

int SeasonalSeries::season_at(std::size_t i) const noexcept {
    const long long offset = static_cast<long long>(start_season_ - 1) + static_cast<long long>(i);
    return static_cast<int>(offset % period_) + 1;
}

std::ptrdiff_t SeasonalSeries::index_of(int year, int season) const noexcept {
    return static_cast<std::ptrdiff_t>(year - start_year_) * period_ + (season - start_season_);
}

TrigParams TrigParams::zero(int period) {
    TrigParams p;
    p.gammas.assign(cosine_count(period), 0.0);
    p.gamma_stars.assign(sine_count(period), 0.0);
    return p;
}

std::size_t cosine_count(int period) noexcept {
    return period >= 2 ? static_cast<std::size_t>(period / 2) : 0;
}

std::size_t sine_count(int period) noexcept {
    return period >= 2 ? static_cast<std::size_t>((period - 1) / 2) : 0;
}

namespace {

long long reduce_phase(long long k, long long j, int period) {
    const long long s = period;
    long long r = ((k % s) * (j % s)) % s;
    return r < 0 ? r + s : r;
}

}  // namespace

double seasonal_cos(long long k, long long j, int period) noexcept {
    const long long r = reduce_phase(k, j, period);
    const long long s = period;
    if (r == 0) return 1.0;
    if (2 * r == s) return -1.0;
    if (4 * r == s || 4 * r == 3 * s) return 0.0;
    return std::cos(2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(s));
}

double seasonal_sin(long long k, long long j, int period) noexcept {
    const long long r = reduce_phase(k, j, period);
    const long long s = period;
    if (r == 0 || 2 * r == s) return 0.0;
    if (4 * r == s) return 1.0;
    if (4 * r == 3 * s) return -1.0;
    return std::sin(2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(s));
}

double eval_normal(const TrigParams& params, long long j, int period) {
    if (period < 2) {
        throw_invalid("eval_normal: period must be >= 2");
    }
    if (params.gammas.size() != cosine_count(period) ||
        params.gamma_stars.size() != sine_count(period)) {
        throw_invalid("eval_normal: expected " + std::to_string(cosine_count(period)) +
                      " cosine and " + std::to_string(sine_count(period)) +
                      " sine amplitudes for period " + std::to_string(period));
    }
    double mu = params.beta0 + params.beta1 * static_cast<double>(j);
    for (std::size_t k = 1; k <= params.gammas.size(); ++k) {
        mu += params.gammas[k - 1] * seasonal_cos(static_cast<long long>(k), j, period);
    }
    for (std::size_t k = 1; k <= params.gamma_stars.size(); ++k) {
        mu += params.gamma_stars[k - 1] * seasonal_sin(static_cast<long long>(k), j, period);
    }
    return mu;
}

namespace {

double spectral_radius(const ArProcess& ar) {
    const auto p = static_cast<Eigen::Index>(ar.phi.size());
    if (p == 0) {
        return 0.0;
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        companion(0, i) = ar.phi[static_cast<std::size_t>(i)];
    }
    for (Eigen::Index i = 1; i < p; ++i) {
        companion(i, i - 1) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

void check_stationary(const ArProcess& ar) {
    if (!(ar.innovation_variance >= 0.0) || !std::isfinite(ar.innovation_variance)) {
        throw_invalid("AR process: innovation variance must be finite and >= 0");
    }
    for (double c : ar.phi) {
        if (!std::isfinite(c)) {
            throw_invalid("AR process: non-finite coefficient");
        }
    }
    const double radius = spectral_radius(ar);
    if (!(radius < 1.0 - 1e-12)) {
        throw_invalid("AR process is not stationary: largest companion root modulus " +
                      std::to_string(radius));
    }
}

std::vector<double> simulate_ar(const ArProcess& ar, std::size_t n, std::uint64_t seed,
                                std::uint64_t stream) {
    check_stationary(ar);
    const double radius = spectral_radius(ar);
    std::size_t burn_in = 1000;
    if (radius > 0.0) {
        const double needed = std::log(1e-16) / std::log(radius);
        burn_in = std::max<std::size_t>(burn_in, static_cast<std::size_t>(std::ceil(needed)));
    }
    burn_in = std::min<std::size_t>(burn_in, 2'000'000);

    Rng rng(seed, stream);
    const double sd = std::sqrt(ar.innovation_variance);
    const std::size_t p = ar.phi.size();
    std::vector<double> path(burn_in + n, 0.0);
    for (std::size_t t = 0; t < path.size(); ++t) {
        double v = sd * rng.normal();
        for (std::size_t i = 1; i <= p && i <= t; ++i) {
            v += ar.phi[i - 1] * path[t - i];
        }
        path[t] = v;
    }
    return {path.begin() + static_cast<std::ptrdiff_t>(burn_in), path.end()};
}

SeasonalSeries generate_synthetic(const TrigParams& params, std::size_t n, int period,
                                  const ArProcess& anomaly, std::uint64_t seed, int start_year,
                                  int start_season) {
    if (n == 0) {
        throw_invalid("generate_synthetic: length must be positive");
    }
    const std::vector<double> psi = simulate_ar(anomaly, n, seed);
    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t) {
        y[t] = eval_normal(params, static_cast<long long>(t), period) + psi[t];
    }
    return SeasonalSeries(std::move(y), period, start_year, start_season);
}

SeasonalSeries seasonal_difference(const SeasonalSeries& y, int lag_multiple) {
    if (lag_multiple < 1) {
        throw_invalid("seasonal_difference: lag multiple must be >= 1");
    }
    const std::size_t lag = static_cast<std::size_t>(y.period()) * static_cast<std::size_t>(lag_multiple);
    if (y.size() <= lag) {
        throw_invalid("seasonal_difference: series of length " + std::to_string(y.size()) +
                      " is too short for lag " + std::to_string(lag));
    }
    const std::size_t n = y.size() - lag;
    std::vector<double> out(n);
    std::vector<bool> mask(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = i + lag;
        mask[i] = y.missing(t) || y.missing(t - lag);
        out[i] = mask[i] ? std::numeric_limits<double>::quiet_NaN() : y[t] - y[t - lag];
    }
    return SeasonalSeries(std::move(out), std::move(mask), y.period(), y.year_at(lag),
                          y.season_at(lag));
}

}  // namespace climnorm
