#pragma once

#include "climnorm/series.hpp"

#include <span>
#include <vector>

namespace climnorm {

inline constexpr int kDefaultBartlettLags = 12;
inline constexpr double kCritSeasonalPair = 0.749;  ///< CvM(2), 5%
inline constexpr double kCritSingle = 0.470;        ///< CvM(1), 5%
inline constexpr double kCritLevelWithTrend = 0.146;  ///< second-level CvM(1), 5%

/// gamma(0) + 2 sum_{k=1..M} (1 - k/(M+1)) gamma(k), sample autocovariances
/// of the demeaned series. Throws DegenerateVariance when the estimate is
/// not above the O((M+1)/n) edge-effect floor relative to gamma(0).
double bartlett_lrv(std::span<const double> e, int lags);

/// omega[0] is the level statistic, omega[1..] the seasonal frequencies
/// 2 pi j / s; the last entry is the Nyquist statistic when s is even.
struct StabilityReport {
    std::vector<double> omega;
    std::vector<double> critical_values;
    std::vector<bool> reject;
    int lags = kDefaultBartlettLags;
    bool trend_included = false;
    std::size_t n = 0;
    double long_run_variance = 0.0;
};

/// Residuals of y on level (+ trend) and all seasonal harmonics, then the
/// cumulative-sum statistics. Missing points are dropped; the remaining
/// observations keep their original time index in the regressors and the
/// cos/sin weights, but partial sums run over the retained points only.
StabilityReport stability_stats(const SeasonalSeries& y, bool include_trend,
                                int lags = kDefaultBartlettLags);

struct PersistenceValue {
    int lags = 0;
    double omega0 = 0.0;
    bool reject = false;  ///< omega0 > 0.470
};

/// Level statistic of demeaned anomalies for each truncation lag.
std::vector<PersistenceValue> anomaly_persistence_check(const SeasonalSeries& anomalies,
                                                        std::span<const int> lag_values);

/// Deciles 1..9 (linear interpolation between order statistics) of each
/// statistic across reports: result[decile-1][statistic].
std::vector<std::vector<double>> stability_deciles(std::span<const StabilityReport> reports);

/// Linear-interpolation sample quantile (R type 7) of unsorted data.
double quantile(std::vector<double> values, double p);

}  // namespace climnorm
