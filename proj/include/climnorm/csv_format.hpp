#pragma once

#include "climnorm/filters.hpp"
#include "climnorm/kernels.hpp"
#include "climnorm/series.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace climnorm::csv {

/// 17 significant digits (round-trips doubles); negative zero prints as 0.
std::string format_real(double v);

/// Fixed number of decimals, for human-facing summaries.
std::string format_fixed(double v, int decimals);

std::vector<std::string> split_line(std::string_view line);

/// Parses a real; the literal NA yields nullopt. Throws InvalidInput otherwise.
std::optional<double> parse_value(std::string_view text);
int parse_int(std::string_view text);

/// Single series: header `year,month,value`.
SeasonalSeries read_series(std::istream& in, int period);
void write_series(std::ostream& out, const SeasonalSeries& y);

/// Header `offset,weight`.
void write_weights(std::ostream& out, const FilterWeights& w);
void write_kernel(std::ostream& out, const KernelWeights& k);

/// Header `time,y,normal,anomaly`; time is YEAR-SEASON.
void write_normals(std::ostream& out, const SeasonalSeries& y, const NormalsResult& r);

std::string time_label(int year, int season);

}  // namespace climnorm::csv
