#pragma once

#include "climnorm/filters.hpp"
#include "climnorm/selection.hpp"
#include "climnorm/series.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace climnorm {

struct GridCell {
    std::string id;
    double lat = 0.0;
    double lon = 0.0;
    SeasonalSeries series;
};

/// Cells sorted by id; every series shares the period and start.
struct GridDataset {
    std::vector<GridCell> cells;
    int period = 12;
    int start_year = 1;
    int start_season = 1;

    std::size_t length() const noexcept { return cells.empty() ? 0 : cells.front().series.size(); }
};

/// Long format, header `cell_id,lat,lon,year,month,value`; `NA` marks a
/// missing value. Rows may come in any order.
GridDataset parse_grid_csv(std::istream& in, int period = 12);
GridDataset load_grid_csv(const std::filesystem::path& path, int period = 12);

/// Canonical form: sorted by cell id, then time; 17-digit reals.
void write_grid_csv(std::ostream& out, const GridDataset& grid);

struct BatchConfig {
    /// Regularized runs the (lambda, m) search per cell; Concurrent and Wmo
    /// use the fixed bandwidth below.
    FilterKind kind = FilterKind::Regularized;
    std::vector<double> grid_lambda = default_lambda_grid();
    std::vector<int> grid_m = default_m_grid();
    KernelSpec kernel = KernelSpec::seasonal(1);
    SelectionOptions selection;
    int m = 29;
    int cadence = 10;
    bool latitude_weighted = false;
    unsigned jobs = 1;
};

struct CellOutcome {
    std::string id;
    double lat = 0.0;
    double lon = 0.0;
    std::optional<SelectionResult> selection;
    std::optional<NormalsResult> result;
    std::string skip_reason;  ///< empty when the cell was processed

    bool skipped() const noexcept { return !result.has_value(); }
};

struct SelectionSummary {
    static constexpr std::size_t kBins = 5;
    /// counts[m bin][lambda bin]; lambda bins [0,0.2], (0.2,0.4], ..., (0.8,1];
    /// m bins 6-10, 11-15, 16-20, 21-25, 26-30.
    std::array<std::array<std::size_t, kBins>, kBins> counts{};
    std::size_t outside = 0;  ///< selections whose m falls outside 6..30
    std::size_t n = 0;
    double lambda_mean = 0.0;
    double lambda_sd = 0.0;
    double m_mean = 0.0;
    double m_sd = 0.0;
};

struct BatchResult {
    std::vector<CellOutcome> cells;  ///< in cell-id order
    /// Cross-cell means over the common estimable span [area_from, area_to).
    SeasonalSeries area_normals;
    SeasonalSeries area_anomalies;
    std::size_t area_from = 0;
    std::size_t area_to = 0;
    std::optional<SelectionSummary> summary;  ///< regularized runs only

    std::size_t skipped_count() const noexcept;
};

/// Per-cell selection and filtering, then a deterministic reduction in
/// cell-id order. Cells that fail are skipped and, when `log` is non-null,
/// reported as `skip cell_id=<id> reason=<code>: <message>`. Throws
/// EmptyBatch when every cell is skipped.
BatchResult batch_process(const GridDataset& grid, const BatchConfig& config,
                          std::ostream* log = nullptr);

/// Bin index of a lambda value (0..4) or an m value (0..4, nullopt outside 6..30).
std::size_t lambda_bin(double lambda) noexcept;
std::optional<std::size_t> m_bin(int m) noexcept;

SelectionSummary summarize_selection(const BatchResult& result);

/// "lambda_hat mean 0.49 (sd 0.31), m_hat mean 23.86 (sd 6.95), n = 120"
std::string format_summary_line(const SelectionSummary& summary);

/// normals.csv, anomalies.csv (cell_id,year,month,value), selection.csv,
/// area.csv and, for regularized runs, summary.csv.
void write_batch_outputs(const std::filesystem::path& dir, const BatchResult& result);

}  // namespace climnorm
