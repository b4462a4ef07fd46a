#pragma once

#include "climnorm/filters.hpp"
#include "climnorm/series.hpp"

#include <vector>

namespace climnorm {

/// Nuisance quantities shared by every cell of an MSE grid search.
struct MseInputs {
    double beta1_hat = 0.0;
    std::vector<double> gamma_psi;  ///< anomaly autocovariances, lags 0..max
    int period = 12;
};

/// Validates gamma_psi[0] > 0 and that the largest Toeplitz matrix it
/// generates is positive semidefinite.
MseInputs make_mse_inputs(double beta1_hat, std::vector<double> gamma_psi, int period);

/// Least-squares slope per time step from the full-sample regression of y on
/// level, linear trend and all seasonal harmonics.
double estimate_slope(const SeasonalSeries& y);

struct AcovEstimate {
    std::vector<double> values;  ///< lags 0..max_lag
    bool degenerate = false;     ///< pilot anomalies identically zero
    std::size_t pilot_count = 0;
};

inline constexpr int kDefaultPilotM = 15;

/// Pilot anomalies from the centred uniform LTR filter with `pilot_m` years on
/// each side, demeaned; Bartlett-tapered sample autocovariances
/// gamma(k) (1 - k/(max_lag+1)), scaled by (2 pilot_m + 1)/(2 pilot_m) to undo
/// the variance the pilot normal absorbs under white noise.
AcovEstimate estimate_anomaly_acov(const SeasonalSeries& y, int pilot_m, std::size_t max_lag);

/// (lambda - 1)^2 beta1^2 j*_{0c}^2 + w_r' Gamma_psi w_r.
double mse(double lambda, int m, const MseInputs& inputs, const KernelSpec& kernel);

struct SelectionResult {
    double lambda_hat = 0.0;
    int m_hat = 0;
    std::vector<double> grid_lambda;
    std::vector<int> grid_m;             ///< feasible (possibly clipped) bandwidths
    std::vector<int> requested_m;
    std::vector<std::vector<double>> mse_surface;  ///< [lambda index][m index]
    MseInputs inputs;
    KernelSpec kernel;
    double mse_min = 0.0;

    bool clipped() const noexcept { return grid_m.size() != requested_m.size(); }
};

struct SelectionOptions {
    int pilot_m = kDefaultPilotM;
};

std::vector<double> default_lambda_grid();
std::vector<int> default_m_grid();

/// Grid search for the (lambda, m) pair minimising the MSE. Ties go to the
/// smallest m, then the smallest lambda. Bandwidths the series cannot
/// support are dropped from the grid; CoverageError if none remain.
SelectionResult select_params(const SeasonalSeries& y, const std::vector<double>& grid_lambda,
                              const std::vector<int>& grid_m, const KernelSpec& kernel,
                              const SelectionOptions& options = {});

/// Same search with caller-supplied nuisance inputs.
SelectionResult select_params(const MseInputs& inputs, const std::vector<double>& grid_lambda,
                              const std::vector<int>& grid_m, const KernelSpec& kernel);

}  // namespace climnorm
