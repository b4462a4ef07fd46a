#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace climnorm {

/// A regularly sampled series with seasonal period s. Index 0 is the
/// observation at (start_year, start_season); seasons run 1..s.
class SeasonalSeries {
public:
    SeasonalSeries(std::vector<double> values, int period, int start_year = 1, int start_season = 1);
    SeasonalSeries(std::vector<double> values, std::vector<bool> missing, int period,
                   int start_year = 1, int start_season = 1);

    std::size_t size() const noexcept { return values_.size(); }
    int period() const noexcept { return period_; }
    int start_year() const noexcept { return start_year_; }
    int start_season() const noexcept { return start_season_; }

    double operator[](std::size_t i) const { return values_[i]; }
    bool missing(std::size_t i) const { return missing_[i]; }
    bool any_missing() const noexcept;

    std::span<const double> values() const noexcept { return values_; }
    const std::vector<bool>& missing_mask() const noexcept { return missing_; }

    int year_at(std::size_t i) const noexcept;
    int season_at(std::size_t i) const noexcept;
    /// Index of (year, season) relative to the start; may be negative.
    std::ptrdiff_t index_of(int year, int season) const noexcept;

private:
    void validate() const;

    std::vector<double> values_;
    std::vector<bool> missing_;
    int period_;
    int start_year_;
    int start_season_;
};

/// Coefficients of the local trigonometric model with linear trend.
/// gammas[k-1] multiplies cos(2 pi j k / s) for k = 1..floor(s/2) (the last is
/// the Nyquist term when s is even); gamma_stars[k-1] multiplies
/// sin(2 pi j k / s) for k = 1..ceil(s/2)-1.
struct TrigParams {
    double beta0 = 0.0;
    double beta1 = 0.0;
    std::vector<double> gammas;
    std::vector<double> gamma_stars;

    static TrigParams zero(int period);
};

std::size_t cosine_count(int period) noexcept;
std::size_t sine_count(int period) noexcept;

/// cos(2 pi k j / s) and sin(2 pi k j / s) with the phase reduced exactly
/// mod s; quarter, half and full turns are returned exactly.
double seasonal_cos(long long k, long long j, int period) noexcept;
double seasonal_sin(long long k, long long j, int period) noexcept;

double eval_normal(const TrigParams& params, long long j, int period);

struct ArProcess {
    std::vector<double> phi;
    double innovation_variance = 1.0;
};

/// Throws InvalidInput unless every root of 1 - phi_1 z - ... lies outside
/// the unit circle.
void check_stationary(const ArProcess& ar);

/// y_t = mu_t + psi_t with mu_t = eval_normal(params, t) and psi a seeded
/// stationary AR draw. Deterministic for a given seed.
SeasonalSeries generate_synthetic(const TrigParams& params, std::size_t n, int period,
                                  const ArProcess& anomaly, std::uint64_t seed,
                                  int start_year = 1, int start_season = 1);

/// Stationary AR path of length n (no deterministic part).
std::vector<double> simulate_ar(const ArProcess& ar, std::size_t n, std::uint64_t seed,
                                std::uint64_t stream = 0);

/// y_t - y_{t - s*lag_multiple}; output starts at index s*lag_multiple of the
/// input. Missing when either operand is missing.
SeasonalSeries seasonal_difference(const SeasonalSeries& y, int lag_multiple = 1);

}  // namespace climnorm
