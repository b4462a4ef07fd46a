#include "climnorm/cli.hpp"

#include "climnorm/csv_format.hpp"
#include "climnorm/error.hpp"
#include "climnorm/filters.hpp"
#include "climnorm/grid_io.hpp"
#include "climnorm/kernels.hpp"
#include "climnorm/selection.hpp"
#include "climnorm/series.hpp"
#include "climnorm/stability.hpp"
#include "climnorm/svg.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

namespace climnorm::cli {

namespace {

enum class Format { Csv, Svg };

// Shared option values; each subcommand binds the subset it uses.
struct Options {
    std::string input = "-";
    std::string output = "-";
    std::string format = "csv";
    std::string kind = "daf";
    std::string kernel = "uniform";
    std::string window = "two_sided";
    std::string lambda_grid;
    std::string m_grid;
    std::string out_dir = "batch_out";
    std::string id_prefix = "c";
    std::vector<double> gammas;
    std::vector<double> gamma_stars;
    std::vector<double> phi;
    std::vector<int> persistence;
    int period = 12;
    int m = 29;
    int d = 1;
    int cadence = 10;
    int lead = 1;
    int pilot_m = kDefaultPilotM;
    int lags = kDefaultBartlettLags;
    int start_year = 1;
    int start_month = 1;
    int cells = 0;
    unsigned jobs = 1;
    std::size_t n = 600;
    std::uint64_t seed = 1;
    double lambda = 0.0;
    double beta0 = 0.0;
    double beta1 = 0.0;
    double sigma2 = 1.0;
    bool trend = false;
    bool grid_default = false;
    bool lat_weighted = false;
};

Format parse_format(const std::string& text) {
    if (text == "csv") return Format::Csv;
    if (text == "svg") return Format::Svg;
    throw_invalid("--format must be csv or svg, got '" + text + "'");
}

KernelSpec parse_kernel(const std::string& text) {
    if (text == "uniform") return KernelSpec::uniform();
    if (text == "epanechnikov") return KernelSpec::seasonal(1);
    if (text == "biweight") return KernelSpec::seasonal(2);
    if (text == "triweight") return KernelSpec::seasonal(3);
    int d = 0;
    try {
        d = csv::parse_int(text);
    } catch (const Error&) {
        throw_invalid("--kernel must be uniform, epanechnikov, biweight, triweight or an order d >= 0, got '" +
                      text + "'");
    }
    if (d < 0) {
        throw_invalid("--kernel order must be >= 0");
    }
    return KernelSpec::seasonal(d);
}

FilterKind parse_kind(const std::string& text) {
    const auto kind = parse_filter_kind(text);
    if (!kind) {
        throw_invalid("unknown filter kind '" + text +
                      "' (wmo, concurrent, two_sided, daf, trend_adjusted, regularized)");
    }
    return *kind;
}

/// "a:b" or "a:b:step" ranges, or comma-separated lists.
std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() < 2 || parts.size() > 3) {
            throw_invalid("range '" + text + "' must be lo:hi or lo:hi:step");
        }
        const double lo = *csv::parse_value(parts[0]);
        const double hi = *csv::parse_value(parts[1]);
        const double step = parts.size() == 3 ? *csv::parse_value(parts[2]) : 1.0;
        if (!(step > 0.0) || hi < lo) {
            throw_invalid("range '" + text + "' is empty");
        }
        const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
        for (long long i = 0; i <= count; ++i) {
            out.push_back(lo + step * static_cast<double>(i));
        }
        return out;
    }
    for (const auto& f : csv::split_line(text)) {
        const auto v = csv::parse_value(f);
        if (!v) throw_invalid("list '" + text + "' contains NA");
        out.push_back(*v);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_real_list(text)) {
        if (v != std::floor(v)) {
            throw_invalid("list '" + text + "' must contain integers");
        }
        out.push_back(static_cast<int>(v));
    }
    return out;
}

void check_period(int s) {
    if (s < 1) throw_invalid("--s must be >= 1, got " + std::to_string(s));
}

void check_m(int m) {
    if (m < 1) throw_invalid("--m must be >= 1, got " + std::to_string(m));
}

void check_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw_invalid("--lambda must lie in [0, 1]");
    }
}

std::string read_all(const std::string& path, std::istream& in) {
    std::ostringstream buf;
    if (path == "-") {
        buf << in.rdbuf();
    } else {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw Error(ErrorCode::Io, "cannot open " + path);
        buf << f.rdbuf();
    }
    return buf.str();
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
    f << text;
}

bool is_grid_text(const std::string& text) {
    return text.rfind("cell_id,", 0) == 0;
}

SeasonalSeries read_single_series(const std::string& text, int period) {
    if (is_grid_text(text)) {
        std::istringstream in(text);
        auto grid = parse_grid_csv(in, period);
        if (grid.cells.size() != 1) {
            throw_invalid("expected a single series, found a grid of " + std::to_string(grid.cells.size()) +
                          " cells");
        }
        return grid.cells.front().series;
    }
    std::istringstream in(text);
    return csv::read_series(in, period);
}

std::vector<double> time_axis(const SeasonalSeries& y) {
    std::vector<double> x(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) {
        x[t] = y.year_at(t) + (y.season_at(t) - 1) / static_cast<double>(y.period());
    }
    return x;
}

std::vector<double> with_nan(const SeasonalSeries& y) {
    std::vector<double> v(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) {
        v[t] = y.missing(t) ? std::numeric_limits<double>::quiet_NaN() : y[t];
    }
    return v;
}

FilterWeights build_weights(FilterKind kind, const Options& o, const KernelSpec& kernel) {
    switch (kind) {
        case FilterKind::Wmo:
            if (o.lead < 1) throw_invalid("--lead must be >= 1");
            return wmo_weights(o.m, o.period, o.lead, 0);
        case FilterKind::Concurrent:
            return concurrent_weights(o.m, o.period);
        case FilterKind::TwoSided:
            return two_sided_weights(o.m, o.period, kernel);
        case FilterKind::Daf:
            return daf_weights(o.m, o.period, kernel);
        case FilterKind::TrendAdjustment:
            return trend_adjustment_weights(o.m, o.period, kernel);
        case FilterKind::Regularized:
            return regularized_weights(o.m, o.period, o.lambda, kernel);
    }
    throw_invalid("unknown filter kind");
}

// --- subcommands ------------------------------------------------------------

int cmd_weights(const Options& o, std::ostream& out) {
    check_period(o.period);
    check_m(o.m);
    check_lambda(o.lambda);
    const auto format = parse_format(o.format);
    const auto kind = parse_kind(o.kind);
    const auto w = build_weights(kind, o, parse_kernel(o.kernel));
    std::ostringstream text;
    if (format == Format::Csv) {
        csv::write_weights(text, w);
    } else {
        std::vector<double> x;
        for (std::size_t i = 0; i < w.weights.size(); ++i) {
            x.push_back(static_cast<double>(w.first_offset + static_cast<long long>(i)));
        }
        text << svg::stem_plot(std::string(to_string(kind)) + " weights, s = " + std::to_string(o.period) +
                                   ", m = " + std::to_string(o.m),
                               x, w.weights, "lag", "weight");
    }
    emit(o.output, text.str(), out);
    return kExitOk;
}

int cmd_kernel(const Options& o, std::ostream& out) {
    check_period(o.period);
    check_m(o.m);
    if (o.d < 0) throw_invalid("--d must be >= 0");
    const auto format = parse_format(o.format);
    Window window;
    if (o.window == "two_sided") {
        window = Window::TwoSided;
    } else if (o.window == "causal") {
        window = Window::Causal;
    } else {
        throw_invalid("--window must be two_sided or causal");
    }
    const auto k = seasonal_kernel(o.d, o.m, o.period, window);
    std::ostringstream text;
    if (format == Format::Csv) {
        csv::write_kernel(text, k);
    } else {
        std::vector<double> x;
        for (std::size_t i = 0; i < k.weights.size(); ++i) {
            x.push_back(static_cast<double>(k.first_offset() + static_cast<long long>(i)));
        }
        text << svg::stem_plot("kernel d = " + std::to_string(o.d) + ", m = " + std::to_string(o.m), x,
                               k.weights);
    }
    emit(o.output, text.str(), out);
    return kExitOk;
}

int cmd_apply(const Options& o, std::istream& in, std::ostream& out) {
    check_period(o.period);
    check_m(o.m);
    check_lambda(o.lambda);
    const auto format = parse_format(o.format);
    const auto kind = parse_kind(o.kind);
    const auto kernel = parse_kernel(o.kernel);
    if (kind == FilterKind::TrendAdjustment) {
        throw_invalid("kind trend_adjusted does not estimate normals");
    }
    if (kind == FilterKind::Wmo && o.cadence < 1) {
        throw_invalid("--cadence must be >= 1");
    }
    const auto y = read_single_series(read_all(o.input, in), o.period);
    const auto r = kind == FilterKind::Wmo ? apply_wmo(y, o.m, o.cadence)
                                           : apply_filter(y, build_weights(kind, o, kernel));
    std::ostringstream text;
    if (format == Format::Csv) {
        csv::write_normals(text, y, r);
    } else {
        text << svg::line_chart(std::string(to_string(kind)) + " normals and anomalies", time_axis(y),
                                {{"y", with_nan(y), "#999999"},
                                 {"normal", with_nan(r.normals), "#1f77b4"},
                                 {"anomaly", with_nan(r.anomalies), "#d62728"}},
                                "time", "value");
    }
    emit(o.output, text.str(), out);
    return kExitOk;
}

int cmd_select(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
    check_period(o.period);
    const auto format = parse_format(o.format);
    const auto kernel = parse_kernel(o.kernel);
    if ((!o.lambda_grid.empty() || !o.m_grid.empty()) && o.grid_default) {
        throw_invalid("--grid-default excludes --lambda-grid and --m-grid");
    }
    const auto grid_lambda = o.lambda_grid.empty() ? default_lambda_grid() : parse_real_list(o.lambda_grid);
    const auto grid_m = o.m_grid.empty() ? default_m_grid() : parse_int_list(o.m_grid);
    for (double l : grid_lambda) check_lambda(l);
    for (int m : grid_m) check_m(m);
    if (o.pilot_m < 1) throw_invalid("--pilot-m must be >= 1");

    const auto y = read_single_series(read_all(o.input, in), o.period);
    const auto sel = select_params(y, grid_lambda, grid_m, kernel, SelectionOptions{o.pilot_m});

    std::ostringstream text;
    if (format == Format::Csv) {
        text << "lambda,m,mse\n";
        for (std::size_t il = 0; il < sel.grid_lambda.size(); ++il) {
            for (std::size_t im = 0; im < sel.grid_m.size(); ++im) {
                text << csv::format_real(sel.grid_lambda[il]) << ',' << sel.grid_m[im] << ','
                     << csv::format_real(sel.mse_surface[il][im]) << '\n';
            }
        }
    } else {
        std::vector<double> x(sel.grid_m.begin(), sel.grid_m.end());
        std::vector<svg::Line> lines;
        for (std::size_t il = 0; il < sel.grid_lambda.size(); ++il) {
            lines.push_back({"lambda " + csv::format_fixed(sel.grid_lambda[il], 2), sel.mse_surface[il], ""});
        }
        text << svg::line_chart("MSE over the selection grid", x, lines, "m", "mse");
    }
    emit(o.output, text.str(), out);
    std::ostream& summary = o.output == "-" ? err : out;
    summary << "lambda_hat=" << csv::format_real(sel.lambda_hat) << " m_hat=" << sel.m_hat
            << " mse=" << csv::format_real(sel.mse_min);
    if (sel.clipped()) {
        summary << " clipped_m_max=" << sel.grid_m.back();
    }
    summary << '\n';
    return kExitOk;
}

int cmd_stability(const Options& o, std::istream& in, std::ostream& out) {
    check_period(o.period);
    if (o.lags < 0) throw_invalid("--lags must be >= 0");
    if (parse_format(o.format) != Format::Csv) {
        throw_invalid("stability supports --format csv only");
    }
    const auto text = read_all(o.input, in);
    std::vector<std::pair<std::string, SeasonalSeries>> series;
    if (is_grid_text(text)) {
        std::istringstream is(text);
        auto grid = parse_grid_csv(is, o.period);
        for (auto& c : grid.cells) series.emplace_back(c.id, std::move(c.series));
    } else {
        series.emplace_back("series", read_single_series(text, o.period));
    }

    std::ostringstream csv_out;
    if (!o.persistence.empty()) {
        for (int m : o.persistence) {
            if (m < 0) throw_invalid("--persistence lags must be >= 0");
        }
        csv_out << "series_id,M,omega0,reject\n";
        for (const auto& [id, y] : series) {
            for (const auto& p : anomaly_persistence_check(y, o.persistence)) {
                csv_out << id << ',' << p.lags << ',' << csv::format_real(p.omega0) << ','
                        << (p.reject ? 1 : 0) << '\n';
            }
        }
        emit(o.output, csv_out.str(), out);
        return kExitOk;
    }

    std::vector<StabilityReport> reports;
    for (const auto& [id, y] : series) {
        reports.push_back(stability_stats(y, o.trend, o.lags));
    }
    const std::size_t k = reports.front().omega.size();
    csv_out << "series_id";
    for (std::size_t j = 0; j < k; ++j) csv_out << ",omega" << j;
    for (std::size_t j = 0; j < k; ++j) csv_out << ",reject" << j;
    csv_out << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        csv_out << series[i].first;
        for (double w : reports[i].omega) csv_out << ',' << csv::format_real(w);
        for (bool r : reports[i].reject) csv_out << ',' << (r ? 1 : 0);
        csv_out << '\n';
    }
    if (reports.size() > 1) {
        const auto table = stability_deciles(reports);
        csv_out << "\ndecile";
        for (std::size_t j = 0; j < k; ++j) csv_out << ",omega" << j;
        csv_out << '\n';
        for (std::size_t dec = 0; dec < table.size(); ++dec) {
            csv_out << (dec + 1);
            for (double v : table[dec]) csv_out << ',' << csv::format_fixed(v, 3);
            csv_out << '\n';
        }
        csv_out << "rejections";
        for (std::size_t j = 0; j < k; ++j) {
            std::size_t count = 0;
            for (const auto& r : reports) count += r.reject[j] ? 1 : 0;
            csv_out << ',' << count;
        }
        csv_out << '\n';
    }
    emit(o.output, csv_out.str(), out);
    return kExitOk;
}

int cmd_batch(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
    check_period(o.period);
    BatchConfig config;
    config.kind = parse_kind(o.kind);
    config.kernel = parse_kernel(o.kernel);
    if ((!o.lambda_grid.empty() || !o.m_grid.empty()) && o.grid_default) {
        throw_invalid("--grid-default excludes --lambda-grid and --m-grid");
    }
    if (!o.lambda_grid.empty()) config.grid_lambda = parse_real_list(o.lambda_grid);
    if (!o.m_grid.empty()) config.grid_m = parse_int_list(o.m_grid);
    for (double l : config.grid_lambda) check_lambda(l);
    for (int m : config.grid_m) check_m(m);
    if (o.pilot_m < 1) throw_invalid("--pilot-m must be >= 1");
    if (o.jobs < 1) throw_invalid("--jobs must be >= 1");
    config.selection.pilot_m = o.pilot_m;
    config.m = o.m;
    config.cadence = o.cadence;
    config.latitude_weighted = o.lat_weighted;
    config.jobs = o.jobs;

    const auto text = read_all(o.input, in);
    std::istringstream is(text);
    const auto grid = parse_grid_csv(is, o.period);
    const auto result = batch_process(grid, config, &err);
    write_batch_outputs(o.out_dir, result);
    const auto skipped = result.skipped_count();
    out << "cells=" << result.cells.size() << " processed=" << result.cells.size() - skipped
        << " skipped=" << skipped << '\n';
    if (result.summary) {
        out << format_summary_line(*result.summary) << '\n';
    }
    return skipped > 0 ? kExitPartial : kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    check_period(o.period);
    if (o.n == 0) throw_invalid("--n must be positive");
    if (!(o.sigma2 > 0.0)) throw_invalid("--sigma2 must be positive");
    if (o.start_month < 1 || o.start_month > o.period) throw_invalid("--start-month outside [1, s]");
    if (o.cells < 0) throw_invalid("--cells must be >= 0");
    if (o.id_prefix.find_first_of(",\"\n\r") != std::string::npos) {
        throw_invalid("--id-prefix may not contain commas, quotes or newlines");
    }
    TrigParams params = TrigParams::zero(o.period);
    params.beta0 = o.beta0;
    params.beta1 = o.beta1;
    if (o.gammas.size() > params.gammas.size() || o.gamma_stars.size() > params.gamma_stars.size()) {
        throw_invalid("s = " + std::to_string(o.period) + " takes at most " +
                      std::to_string(params.gammas.size()) + " cosine and " +
                      std::to_string(params.gamma_stars.size()) + " sine coefficients");
    }
    std::copy(o.gammas.begin(), o.gammas.end(), params.gammas.begin());
    std::copy(o.gamma_stars.begin(), o.gamma_stars.end(), params.gamma_stars.begin());
    const ArProcess ar{o.phi, o.sigma2};

    std::ostringstream text;
    if (o.cells == 0) {
        csv::write_series(text, generate_synthetic(params, o.n, o.period, ar, o.seed, o.start_year,
                                                   o.start_month));
    } else {
        GridDataset grid;
        grid.period = o.period;
        grid.start_year = o.start_year;
        grid.start_season = o.start_month;
        for (int c = 0; c < o.cells; ++c) {
            char num[16];
            std::snprintf(num, sizeof num, "%03d", c + 1);
            const std::string id = o.id_prefix + num;
            const double lat = -10.0 + 2.5 * (c / 10);
            const double lon = 160.0 + 2.5 * (c % 10);
            grid.cells.push_back({id, lat, lon,
                                  generate_synthetic(params, o.n, o.period, ar,
                                                     o.seed + static_cast<std::uint64_t>(c), o.start_year,
                                                     o.start_month)});
        }
        write_grid_csv(text, grid);
    }
    emit(o.output, text.str(), out);
    return kExitOk;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("-s,--s,--period", o.period, "Seasonal period")->envname("CLIMNORM_PERIOD");
    sub->add_option("-o,--output", o.output, "Output file ('-' for stdout)");
}

void add_input(CLI::App* sub, Options& o) {
    sub->add_option("-i,--input", o.input, "Input CSV ('-' for stdin)");
}

void add_format(CLI::App* sub, Options& o) {
    sub->add_option("--format", o.format, "Output format: csv or svg")->envname("CLIMNORM_FORMAT");
}

void add_kernel(CLI::App* sub, Options& o) {
    sub->add_option("--kernel", o.kernel, "uniform, epanechnikov, biweight, triweight or an order d")
        ->envname("CLIMNORM_KERNEL");
}

void add_grids(CLI::App* sub, Options& o) {
    sub->add_flag("--grid-default", o.grid_default, "lambda 0:1:0.1 and m 6:30");
    sub->add_option("--lambda-grid", o.lambda_grid, "lambda values: list or lo:hi:step");
    sub->add_option("--m-grid", o.m_grid, "bandwidths: list or lo:hi");
    sub->add_option("--pilot-m", o.pilot_m, "Pilot bandwidth for the anomaly autocovariances")
        ->envname("CLIMNORM_PILOT_M");
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"climnorm: climate normals and anomalies with causal seasonal filters"};
    app.name("climnorm");
    app.require_subcommand(1);

    auto* weights = app.add_subcommand("weights", "Emit filter weights (offset, weight)");
    add_common(weights, o);
    add_format(weights, o);
    add_kernel(weights, o);
    weights->add_option("--kind", o.kind, "wmo, concurrent, two_sided, daf, trend_adjusted, regularized");
    weights->add_option("-m,--m", o.m, "Bandwidth in years");
    weights->add_option("--lambda", o.lambda, "Shrinkage intensity for regularized weights");
    weights->add_option("--lead", o.lead, "WMO: seasons since the end of the reference period");

    auto* kernel = app.add_subcommand("kernel", "Emit seasonal kernel weights (offset, weight)");
    add_common(kernel, o);
    add_format(kernel, o);
    kernel->add_option("-d,--d", o.d, "Kernel order (1 = Epanechnikov)");
    kernel->add_option("-m,--m", o.m, "Bandwidth in years");
    kernel->add_option("--window", o.window, "two_sided or causal");

    auto* apply = app.add_subcommand("apply", "Filter a series (time, y, normal, anomaly)");
    add_common(apply, o);
    add_input(apply, o);
    add_format(apply, o);
    add_kernel(apply, o);
    apply->add_option("--kind", o.kind, "wmo, concurrent, two_sided, daf, regularized");
    apply->add_option("-m,--m", o.m, "Bandwidth in years");
    apply->add_option("--lambda", o.lambda, "Shrinkage intensity for the regularized filter");
    apply->add_option("--cadence", o.cadence, "WMO: reference-period update cadence in years");

    auto* select = app.add_subcommand("select", "MSE grid search for (lambda, m)");
    add_common(select, o);
    add_input(select, o);
    add_format(select, o);
    add_kernel(select, o);
    add_grids(select, o);

    auto* stability = app.add_subcommand("stability", "Level and seasonal stability statistics");
    add_common(stability, o);
    add_input(stability, o);
    add_format(stability, o);
    stability->add_option("--lags", o.lags, "Bartlett truncation lags M")->envname("CLIMNORM_LAGS");
    stability->add_flag("--trend", o.trend, "Include a linear trend in the regression");
    stability->add_option("--persistence", o.persistence,
                          "Report omega0 of the demeaned input for each listed M instead")
        ->delimiter(',');

    auto* batch = app.add_subcommand("batch", "Process a gridded dataset");
    batch->add_option("-s,--s,--period", o.period, "Seasonal period")->envname("CLIMNORM_PERIOD");
    add_input(batch, o);
    add_kernel(batch, o);
    add_grids(batch, o);
    batch->add_option("--out-dir", o.out_dir, "Directory for the output CSV files");
    batch->add_option("--kind", o.kind, "regularized, concurrent, daf, two_sided or wmo");
    batch->add_option("-m,--m", o.m, "Bandwidth for fixed-bandwidth kinds");
    batch->add_option("--cadence", o.cadence, "WMO: reference-period update cadence in years");
    batch->add_flag("--lat-weighted", o.lat_weighted, "Cosine-latitude weighted area averages");
    batch->add_option("-j,--jobs", o.jobs, "Concurrent per-cell workers")->envname("CLIMNORM_JOBS");

    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic series or grid");
    add_common(simulate, o);
    simulate->add_option("--seed", o.seed, "Random seed");
    simulate->add_option("-n,--n", o.n, "Number of observations");
    simulate->add_option("--beta0", o.beta0, "Level");
    simulate->add_option("--beta1", o.beta1, "Slope per time step");
    simulate->add_option("--gamma", o.gammas, "Cosine coefficients")->delimiter(',');
    simulate->add_option("--gamma-star", o.gamma_stars, "Sine coefficients")->delimiter(',');
    simulate->add_option("--phi", o.phi, "AR coefficients of the anomalies")->delimiter(',');
    simulate->add_option("--sigma2", o.sigma2, "Innovation variance");
    simulate->add_option("--start-year", o.start_year, "Year of the first observation");
    simulate->add_option("--start-month", o.start_month, "Season of the first observation");
    simulate->add_option("--cells", o.cells, "Emit a grid with this many cells (0 = single series)");
    simulate->add_option("--id-prefix", o.id_prefix, "Cell id prefix for grids");

    o.kind = "daf";
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: usage: " << msg << '\n';
        return kExitError;
    }

    try {
        if (weights->parsed()) return cmd_weights(o, out);
        if (kernel->parsed()) return cmd_kernel(o, out);
        if (apply->parsed()) return cmd_apply(o, in, out);
        if (select->parsed()) return cmd_select(o, in, out, err);
        if (stability->parsed()) return cmd_stability(o, in, out);
        if (batch->parsed()) {
            if (batch->count("--kind") == 0) o.kind = "regularized";
            if (batch->count("--kernel") == 0 && std::getenv("CLIMNORM_KERNEL") == nullptr) {
                o.kernel = "epanechnikov";
            }
            return cmd_batch(o, in, out, err);
        }
        if (simulate->parsed()) return cmd_simulate(o, out);
    } catch (const Error& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: " << to_string(e.code()) << ": " << msg << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cin, std::cout, std::cerr);
}

}  // namespace climnorm::cli
