#include "climnorm/csv_format.hpp"

#include "climnorm/error.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>

namespace climnorm::csv {

std::string format_real(double v) {
    if (v == 0.0) {
        return "0";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') {
        s.erase(0, 1);
    }
    return s;
}

std::vector<std::string> split_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
        while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
        fields.emplace_back(field);
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

std::optional<double> parse_value(std::string_view text) {
    if (text == "NA") {
        return std::nullopt;
    }
    const std::string s(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        throw_invalid("cannot parse '" + s + "' as a real value");
    }
    return v;
}

int parse_int(std::string_view text) {
    const std::string s(text);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE ||
        v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw_invalid("cannot parse '" + s + "' as an integer");
    }
    return static_cast<int>(v);
}

SeasonalSeries read_series(std::istream& in, int period) {
    std::string line;
    if (!std::getline(in, line)) {
        throw_invalid("series CSV is empty");
    }
    const auto header = split_line(line);
    if (header != std::vector<std::string>{"year", "month", "value"}) {
        throw_invalid("series CSV header must be 'year,month,value'");
    }
    std::vector<double> values;
    std::vector<bool> mask;
    int start_year = 0;
    int start_season = 0;
    int expect_year = 0;
    int expect_season = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto f = split_line(line);
        if (f.size() != 3) {
            throw_invalid("series CSV line " + std::to_string(lineno) + ": expected 3 fields");
        }
        const int year = parse_int(f[0]);
        const int season = parse_int(f[1]);
        if (season < 1 || season > period) {
            throw_invalid("series CSV line " + std::to_string(lineno) + ": season " +
                          std::to_string(season) + " outside [1, " + std::to_string(period) + "]");
        }
        if (values.empty()) {
            start_year = year;
            start_season = season;
        } else if (year != expect_year || season != expect_season) {
            throw Error(ErrorCode::Alignment, "series CSV line " + std::to_string(lineno) +
                                                  ": expected " + time_label(expect_year, expect_season) +
                                                  ", found " + time_label(year, season));
        }
        const auto v = parse_value(f[2]);
        values.push_back(v ? *v : std::numeric_limits<double>::quiet_NaN());
        mask.push_back(!v.has_value());
        expect_season = season % period + 1;
        expect_year = season == period ? year + 1 : year;
    }
    if (values.empty()) {
        throw_invalid("series CSV has no observations");
    }
    return SeasonalSeries(std::move(values), std::move(mask), period, start_year, start_season);
}

void write_series(std::ostream& out, const SeasonalSeries& y) {
    out << "year,month,value\n";
    for (std::size_t t = 0; t < y.size(); ++t) {
        out << y.year_at(t) << ',' << y.season_at(t) << ','
            << (y.missing(t) ? std::string("NA") : format_real(y[t])) << '\n';
    }
}

void write_weights(std::ostream& out, const FilterWeights& w) {
    out << "offset,weight\n";
    for (std::size_t i = 0; i < w.weights.size(); ++i) {
        out << (w.first_offset + static_cast<long long>(i)) << ',' << format_real(w.weights[i]) << '\n';
    }
}

void write_kernel(std::ostream& out, const KernelWeights& k) {
    out << "offset,weight\n";
    for (std::size_t i = 0; i < k.weights.size(); ++i) {
        out << (k.first_offset() + static_cast<long long>(i)) << ',' << format_real(k.weights[i]) << '\n';
    }
}

std::string time_label(int year, int season) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, season);
    return buf;
}

void write_normals(std::ostream& out, const SeasonalSeries& y, const NormalsResult& r) {
    out << "time,y,normal,anomaly\n";
    for (std::size_t t = 0; t < y.size(); ++t) {
        out << time_label(y.year_at(t), y.season_at(t)) << ','
            << (y.missing(t) ? std::string("NA") : format_real(y[t])) << ','
            << (r.normals.missing(t) ? std::string("NA") : format_real(r.normals[t])) << ','
            << (r.anomalies.missing(t) ? std::string("NA") : format_real(r.anomalies[t])) << '\n';
    }
}

}  // namespace climnorm::csv
