#include "climnorm/grid_io.hpp"

#include "climnorm/csv_format.hpp"
#include "climnorm/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>
#include <utility>

namespace climnorm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CellRows {
    double lat = 0.0;
    double lon = 0.0;
    std::map<std::pair<int, int>, std::optional<double>> values;
};

std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

std::string value_or_na(const SeasonalSeries& y, std::size_t t) {
    return y.missing(t) ? std::string("NA") : csv::format_real(y[t]);
}

void open_for_write(std::ofstream& out, const std::filesystem::path& path) {
    out.open(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
}

NormalsResult run_fixed(const SeasonalSeries& y, const BatchConfig& c) {
    const int s = y.period();
    switch (c.kind) {
        case FilterKind::Wmo:
            return apply_wmo(y, c.m, c.cadence);
        case FilterKind::Concurrent:
            return apply_filter(y, concurrent_weights(c.m, s));
        case FilterKind::Daf:
            return apply_filter(y, daf_weights(c.m, s, c.kernel));
        case FilterKind::TwoSided:
            return apply_filter(y, two_sided_weights(c.m, s, c.kernel));
        default:
            throw_invalid("batch: filter kind '" + std::string(to_string(c.kind)) +
                          "' does not estimate normals");
    }
}

void process_cell(const GridCell& cell, const BatchConfig& config, CellOutcome& out) {
    out.id = cell.id;
    out.lat = cell.lat;
    out.lon = cell.lon;
    try {
        if (config.kind == FilterKind::Regularized) {
            auto sel = select_params(cell.series, config.grid_lambda, config.grid_m, config.kernel,
                                     config.selection);
            auto w = regularized_weights(sel.m_hat, cell.series.period(), sel.lambda_hat, config.kernel);
            out.result = apply_filter(cell.series, w);
            out.selection = std::move(sel);
        } else {
            out.result = run_fixed(cell.series, config);
        }
    } catch (const Error& e) {
        out.selection.reset();
        out.result.reset();
        out.skip_reason = std::string(to_string(e.code())) + ": " + e.what();
    }
}

void validate_config(const BatchConfig& c) {
    if (c.kind == FilterKind::TrendAdjustment) {
        throw_invalid("batch: filter kind 'trend_adjusted' does not estimate normals");
    }
    if (c.kind == FilterKind::Regularized) {
        if (c.grid_lambda.empty() || c.grid_m.empty()) {
            throw_invalid("batch: selection grids must be non-empty");
        }
    } else if (c.m < 1) {
        throw_invalid("batch: m must be >= 1, got " + std::to_string(c.m));
    }
    if (c.kind == FilterKind::Wmo && c.cadence < 1) {
        throw_invalid("batch: cadence must be >= 1, got " + std::to_string(c.cadence));
    }
}

double sample_sd(const std::vector<double>& v, double mean) {
    if (v.size() < 2) {
        return 0.0;
    }
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

GridDataset parse_grid_csv(std::istream& in, int period) {
    if (period < 1) {
        throw_invalid("grid: period must be >= 1");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw_invalid("grid CSV is empty");
    }
    if (csv::split_line(line) != std::vector<std::string>{"cell_id", "lat", "lon", "year", "month", "value"}) {
        throw_invalid("grid CSV header must be 'cell_id,lat,lon,year,month,value'");
    }
    std::map<std::string, CellRows> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto f = csv::split_line(line);
        const std::string where = "grid CSV line " + std::to_string(lineno);
        if (f.size() != 6) {
            throw_invalid(where + ": expected 6 fields, found " + std::to_string(f.size()));
        }
        if (f[0].empty()) {
            throw_invalid(where + ": empty cell_id");
        }
        const auto lat = csv::parse_value(f[1]);
        const auto lon = csv::parse_value(f[2]);
        if (!lat || !lon) {
            throw_invalid(where + ": coordinates may not be NA");
        }
        const int year = csv::parse_int(f[3]);
        const int month = csv::parse_int(f[4]);
        if (month < 1 || month > period) {
            throw_invalid(where + ": month " + std::to_string(month) + " outside [1, " +
                          std::to_string(period) + "]");
        }
        const auto value = csv::parse_value(f[5]);
        auto [it, fresh] = rows.try_emplace(f[0]);
        auto& cell = it->second;
        if (fresh) {
            cell.lat = *lat;
            cell.lon = *lon;
        } else if (cell.lat != *lat || cell.lon != *lon) {
            throw_invalid(where + ": cell " + f[0] + " changes coordinates");
        }
        if (!cell.values.emplace(std::make_pair(year, month), value).second) {
            throw Error(ErrorCode::Duplicate, "duplicate row for cell " + f[0] + " at " +
                                                  csv::time_label(year, month));
        }
    }
    if (rows.empty()) {
        throw_invalid("grid CSV has no rows");
    }

    GridDataset grid;
    grid.period = period;
    for (auto& [id, cell] : rows) {
        const auto [y0, s0] = cell.values.begin()->first;
        std::vector<double> values;
        std::vector<bool> mask;
        values.reserve(cell.values.size());
        long long expected = static_cast<long long>(y0) * period + (s0 - 1);
        for (const auto& [key, v] : cell.values) {
            const long long pos = static_cast<long long>(key.first) * period + (key.second - 1);
            if (pos != expected) {
                throw Error(ErrorCode::Alignment, "cell " + id + " has no row for " +
                                                      csv::time_label(static_cast<int>(expected / period),
                                                                      static_cast<int>(expected % period) + 1));
            }
            ++expected;
            values.push_back(v ? *v : kNaN);
            mask.push_back(!v.has_value());
        }
        if (grid.cells.empty()) {
            grid.start_year = y0;
            grid.start_season = s0;
        } else if (y0 != grid.start_year || s0 != grid.start_season || values.size() != grid.length()) {
            const auto& ref = grid.cells.front();
            throw Error(ErrorCode::Alignment,
                        "cell " + id + " spans " + csv::time_label(y0, s0) + " with " +
                            std::to_string(values.size()) + " points; cell " + ref.id + " spans " +
                            csv::time_label(grid.start_year, grid.start_season) + " with " +
                            std::to_string(grid.length()) + " points");
        }
        grid.cells.push_back(GridCell{id, cell.lat, cell.lon,
                                      SeasonalSeries(std::move(values), std::move(mask), period, y0, s0)});
    }
    return grid;
}

GridDataset load_grid_csv(const std::filesystem::path& path, int period) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    return parse_grid_csv(in, period);
}

void write_grid_csv(std::ostream& out, const GridDataset& grid) {
    out << "cell_id,lat,lon,year,month,value\n";
    for (const auto& cell : grid.cells) {
        const auto lat = csv::format_real(cell.lat);
        const auto lon = csv::format_real(cell.lon);
        for (std::size_t t = 0; t < cell.series.size(); ++t) {
            out << cell.id << ',' << lat << ',' << lon << ',' << cell.series.year_at(t) << ','
                << cell.series.season_at(t) << ',' << value_or_na(cell.series, t) << '\n';
        }
    }
}

std::size_t BatchResult::skipped_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const CellOutcome& c) { return c.skipped(); }));
}

BatchResult batch_process(const GridDataset& grid, const BatchConfig& config, std::ostream* log) {
    validate_config(config);
    if (grid.cells.empty()) {
        throw Error(ErrorCode::EmptyBatch, "batch: grid has no cells");
    }
    const std::size_t ncell = grid.cells.size();
    std::vector<CellOutcome> outcomes(ncell);

    const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(ncell)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < ncell; ++i) {
            process_cell(grid.cells[i], config, outcomes[i]);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (std::size_t i = next++; i < ncell; i = next++) {
                try {
                    process_cell(grid.cells[i], config, outcomes[i]);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    if (log != nullptr) {
        for (const auto& c : outcomes) {
            if (c.skipped()) {
                *log << "skip cell_id=" << c.id << " reason=" << c.skip_reason << '\n';
            }
        }
    }

    std::size_t from = 0;
    std::size_t to = grid.length();
    bool any = false;
    for (const auto& c : outcomes) {
        if (!c.skipped()) {
            any = true;
            from = std::max(from, c.result->valid_from);
            to = std::min(to, c.result->valid_to);
        }
    }
    if (!any) {
        throw Error(ErrorCode::EmptyBatch, "batch: all " + std::to_string(ncell) + " cells skipped");
    }
    if (from >= to) {
        throw CoverageError("batch: processed cells share no estimable span", from);
    }

    const std::size_t len = to - from;
    std::vector<double> normals(len, 0.0);
    std::vector<double> anomalies(len, 0.0);
    std::vector<double> weight(len, 0.0);
    for (const auto& c : outcomes) {
        if (c.skipped()) {
            continue;
        }
        const double wc = config.latitude_weighted ? std::cos(c.lat * std::numbers::pi / 180.0) : 1.0;
        const auto& r = *c.result;
        for (std::size_t k = 0; k < len; ++k) {
            const std::size_t t = from + k;
            if (r.normals.missing(t)) {
                continue;
            }
            normals[k] += wc * r.normals[t];
            anomalies[k] += wc * r.anomalies[t];
            weight[k] += wc;
        }
    }
    std::vector<bool> mask(len, false);
    for (std::size_t k = 0; k < len; ++k) {
        if (weight[k] > 0.0) {
            normals[k] /= weight[k];
            anomalies[k] /= weight[k];
        } else {
            normals[k] = anomalies[k] = kNaN;
            mask[k] = true;
        }
    }
    const auto& ref = grid.cells.front().series;
    BatchResult result{
        std::move(outcomes),
        SeasonalSeries(std::move(normals), mask, grid.period, ref.year_at(from), ref.season_at(from)),
        SeasonalSeries(std::move(anomalies), mask, grid.period, ref.year_at(from), ref.season_at(from)),
        from,
        to,
        std::nullopt};
    if (config.kind == FilterKind::Regularized) {
        result.summary = summarize_selection(result);
    }
    return result;
}

std::size_t lambda_bin(double lambda) noexcept {
    // Bins [0, 0.2], (0.2, 0.4], ..., (0.8, 1.0]; the small slack keeps grid
    // values such as 0.2 = 2 * 0.1 in the lower bin.
    constexpr double kSlack = 1e-9;
    for (std::size_t b = 0; b + 1 < SelectionSummary::kBins; ++b) {
        if (lambda <= 0.2 * static_cast<double>(b + 1) + kSlack) {
            return b;
        }
    }
    return SelectionSummary::kBins - 1;
}

std::optional<std::size_t> m_bin(int m) noexcept {
    if (m < 6 || m > 30) {
        return std::nullopt;
    }
    return static_cast<std::size_t>((m - 6) / 5);
}

SelectionSummary summarize_selection(const BatchResult& result) {
    SelectionSummary s;
    std::vector<double> lambdas;
    std::vector<double> ms;
    for (const auto& c : result.cells) {
        if (!c.selection) {
            continue;
        }
        const double l = c.selection->lambda_hat;
        const int m = c.selection->m_hat;
        lambdas.push_back(l);
        ms.push_back(m);
        if (const auto mb = m_bin(m)) {
            ++s.counts[*mb][lambda_bin(l)];
        } else {
            ++s.outside;
        }
    }
    s.n = lambdas.size();
    if (s.n > 0) {
        double sl = 0.0;
        double sm = 0.0;
        for (std::size_t i = 0; i < s.n; ++i) {
            sl += lambdas[i];
            sm += ms[i];
        }
        s.lambda_mean = sl / static_cast<double>(s.n);
        s.m_mean = sm / static_cast<double>(s.n);
        s.lambda_sd = sample_sd(lambdas, s.lambda_mean);
        s.m_sd = sample_sd(ms, s.m_mean);
    }
    return s;
}

std::string format_summary_line(const SelectionSummary& s) {
    return "lambda_hat mean " + csv::format_fixed(s.lambda_mean, 2) + " (sd " +
           csv::format_fixed(s.lambda_sd, 2) + "), m_hat mean " + csv::format_fixed(s.m_mean, 2) +
           " (sd " + csv::format_fixed(s.m_sd, 2) + "), n = " + std::to_string(s.n);
}

void write_batch_outputs(const std::filesystem::path& dir, const BatchResult& result) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    }

    std::ofstream normals;
    std::ofstream anomalies;
    open_for_write(normals, dir / "normals.csv");
    open_for_write(anomalies, dir / "anomalies.csv");
    normals << "cell_id,year,month,value\n";
    anomalies << "cell_id,year,month,value\n";
    for (const auto& c : result.cells) {
        if (c.skipped()) {
            continue;
        }
        const auto& r = *c.result;
        for (std::size_t t = 0; t < r.normals.size(); ++t) {
            const auto stamp = std::to_string(r.normals.year_at(t)) + ',' + std::to_string(r.normals.season_at(t));
            normals << c.id << ',' << stamp << ',' << value_or_na(r.normals, t) << '\n';
            anomalies << c.id << ',' << stamp << ',' << value_or_na(r.anomalies, t) << '\n';
        }
    }

    std::ofstream selection;
    open_for_write(selection, dir / "selection.csv");
    selection << "cell_id,lat,lon,status,kind,lambda,m,mse,valid_from,reason\n";
    for (const auto& c : result.cells) {
        selection << c.id << ',' << csv::format_real(c.lat) << ',' << csv::format_real(c.lon) << ',';
        if (c.skipped()) {
            selection << "skipped,NA,NA,NA,NA,NA," << quote(c.skip_reason) << '\n';
            continue;
        }
        const auto& f = c.result->filter;
        selection << "ok," << to_string(f.kind) << ','
                  << (c.selection ? csv::format_real(c.selection->lambda_hat) : std::string("NA")) << ','
                  << f.bandwidth << ','
                  << (c.selection ? csv::format_real(c.selection->mse_min) : std::string("NA")) << ','
                  << c.result->valid_from << ",\n";
    }

    std::ofstream area;
    open_for_write(area, dir / "area.csv");
    area << "year,month,normal,anomaly\n";
    for (std::size_t k = 0; k < result.area_normals.size(); ++k) {
        area << result.area_normals.year_at(k) << ',' << result.area_normals.season_at(k) << ','
             << value_or_na(result.area_normals, k) << ',' << value_or_na(result.area_anomalies, k) << '\n';
    }

    if (result.summary) {
        const auto& s = *result.summary;
        std::ofstream summary;
        open_for_write(summary, dir / "summary.csv");
        static const char* const kLambdaLabels[] = {"0-0.2", "0.2-0.4", "0.4-0.6", "0.6-0.8", "0.8-1.0"};
        static const char* const kMLabels[] = {"6-10", "11-15", "16-20", "21-25", "26-30"};
        summary << "m_hat";
        for (const char* l : kLambdaLabels) {
            summary << ',' << l;
        }
        summary << ",total\n";
        std::array<std::size_t, SelectionSummary::kBins> col{};
        for (std::size_t mb = 0; mb < SelectionSummary::kBins; ++mb) {
            summary << kMLabels[mb];
            std::size_t row = 0;
            for (std::size_t lb = 0; lb < SelectionSummary::kBins; ++lb) {
                summary << ',' << s.counts[mb][lb];
                row += s.counts[mb][lb];
                col[lb] += s.counts[mb][lb];
            }
            summary << ',' << row << '\n';
        }
        summary << "total";
        std::size_t all = 0;
        for (auto v : col) {
            summary << ',' << v;
            all += v;
        }
        summary << ',' << all << "\n\nstatistic,lambda_hat,m_hat\n"
                << "mean," << csv::format_real(s.lambda_mean) << ',' << csv::format_real(s.m_mean) << '\n'
                << "sd," << csv::format_real(s.lambda_sd) << ',' << csv::format_real(s.m_sd) << '\n'
                << "n," << s.n << ',' << s.n << '\n';
    }
}

}  // namespace climnorm
