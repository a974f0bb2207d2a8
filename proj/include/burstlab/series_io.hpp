#pragma once

// CSV ingestion and export. All files are UTF-8 with a mandatory header row:
//
//   series  `t,value`          uniform t spacing
//   prices  `timestamp,price`  uniform spacing, epoch seconds
//   events  `timestamp`        strictly increasing epoch seconds
//   durations `kind,start,end,duration`  kind is burst or interburst
//
// Numbers are written with 15 significant digits.

#include <filesystem>
#include <iosfwd>

#include <vector>

#include "burstlab/passage.hpp"
#include "burstlab/series.hpp"

namespace burstlab {

struct CsvReadOptions {
    /// Accept gaps longer than the base spacing (overnight, weekends) and
    /// concatenate the sessions into one continuous uniform timeline.
    bool splice_gaps = false;
};

UniformSeries read_series_csv(std::istream& in, const CsvReadOptions& options = {});
UniformSeries read_series_csv(const std::filesystem::path& path, const CsvReadOptions& options = {});
void write_series_csv(std::ostream& out, const UniformSeries& series);
void write_series_csv(const std::filesystem::path& path, const UniformSeries& series);

PriceSeries read_prices_csv(std::istream& in, const CsvReadOptions& options = {});
PriceSeries read_prices_csv(const std::filesystem::path& path, const CsvReadOptions& options = {});
void write_prices_csv(std::ostream& out, const PriceSeries& prices);
void write_prices_csv(const std::filesystem::path& path, const PriceSeries& prices);

EventStream read_events_csv(std::istream& in);
EventStream read_events_csv(const std::filesystem::path& path);
void write_events_csv(std::ostream& out, const EventStream& events);
void write_events_csv(const std::filesystem::path& path, const EventStream& events);

std::vector<Episode> read_durations_csv(std::istream& in);
std::vector<Episode> read_durations_csv(const std::filesystem::path& path);
void write_durations_csv(std::ostream& out, std::span<const Episode> episodes);
void write_durations_csv(const std::filesystem::path& path, std::span<const Episode> episodes);

/// Formats with 15 significant digits ("%.15g").
std::string format_number(double value);

}  // namespace burstlab
