#pragma once

#include "climnorm/kernels.hpp"
#include "climnorm/linalg.hpp"
#include "climnorm/series.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace climnorm {

enum class FilterKind { Wmo, Concurrent, TwoSided, Daf, TrendAdjustment, Regularized };

std::string_view to_string(FilterKind kind);
std::optional<FilterKind> parse_filter_kind(std::string_view text);

/// Kernel choice for LTR filters: uniform weights over the whole window, or
/// the seasonal polynomial kernel of a given order.
struct KernelSpec {
    std::optional<int> order;

    static KernelSpec uniform() { return {}; }
    static KernelSpec seasonal(int d) { return KernelSpec{d}; }
    bool is_uniform() const noexcept { return !order.has_value(); }
};

/// Impulse response: weights[i] applies to y_{t - (first_offset + i)}.
struct FilterWeights {
    std::vector<double> weights;
    long long first_offset = 0;
    int period = 12;
    int bandwidth = 0;
    FilterKind kind = FilterKind::Daf;
    double lambda = 0.0;
    std::optional<int> kernel_order;

    long long last_offset() const noexcept {
        return first_offset + static_cast<long long>(weights.size()) - 1;
    }
    double at(long long offset) const noexcept;
    double sum() const noexcept;
};

struct NormalsResult {
    SeasonalSeries normals;
    SeasonalSeries anomalies;
    std::size_t valid_from = 0;  ///< first index with a full window
    std::size_t valid_to = 0;    ///< one past the last index with a full window
    FilterWeights filter;
};

// --- reference-period (WMO) filter ------------------------------------------

/// Index of the last season of the reference period in force at `target`:
/// the final season of the latest year Y with Y % cadence == 0 and Y before
/// the target's year. Negative when that season precedes the series start.
long long wmo_reference_end(const SeasonalSeries& y, std::size_t target, int cadence);

/// Equal weights 1/(m+1) on the m+1 same-season values of the reference
/// period ending at `reference_end`, expressed as lags from `target`.
FilterWeights wmo_weights(int m, int period, long long target, long long reference_end);

NormalsResult apply_wmo(const SeasonalSeries& y, int m, int cadence);

// --- time-invariant LTR filters -----------------------------------------------

FilterWeights concurrent_weights(int m, int period);

FilterWeights two_sided_weights(int m, int period, const KernelSpec& kernel = {});
FilterWeights two_sided_weights(int m, int period, const KernelWeights& kernel);

FilterWeights daf_weights(int m, int period, const KernelSpec& kernel = {});
FilterWeights daf_weights(int m, int period, const KernelWeights& kernel);

/// Zero-sum adjustment w_a = K_c j*_c (j*_c' K_c j*_c)^{-1} j*_{0c}.
FilterWeights trend_adjustment_weights(int m, int period, const KernelSpec& kernel = {});
FilterWeights trend_adjustment_weights(int m, int period, const KernelWeights& kernel);

/// w_r = w_c + lambda w_a, lambda in [0, 1].
FilterWeights regularized_weights(int m, int period, double lambda, const KernelSpec& kernel = {});
FilterWeights regularized_weights(int m, int period, double lambda, const KernelWeights& kernel);

/// Causal no-trend weights w_c, adjustment w_a and j*_{0c} for one (m, s, kernel).
struct CausalComponents {
    linalg::Vector wc;
    linalg::Vector wa;
    double j0c_star = 0.0;
};
CausalComponents causal_components(int m, int period, const KernelSpec& kernel);

/// Causal diagonal kernel over lags 0..sm (empty for uniform).
std::vector<double> causal_kernel_diag(int m, int period, const KernelSpec& kernel);

NormalsResult apply_filter(const SeasonalSeries& y, const FilterWeights& w);

}  // namespace climnorm
