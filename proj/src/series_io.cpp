#include "burstlab/series_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "burstlab/error.hpp"

namespace burstlab {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_double(std::string_view field, std::size_t line_no) {
    double v = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || field.empty() || !std::isfinite(v)) {
        throw ValidationError("malformed number '" + std::string(field) + "' on line " +
                              std::to_string(line_no));
    }
    return v;
}

// Reads a headed CSV with `columns` numeric fields per row.
std::vector<std::vector<double>> read_table(std::istream& in, std::span<const std::string_view> header) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<std::vector<double>> columns(header.size());
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = trim(line);
        if (view.empty()) continue;
        const auto fields = split(view);
        if (!have_header) {
            bool ok = fields.size() == header.size();
            for (std::size_t c = 0; ok && c < header.size(); ++c) ok = fields[c] == header[c];
            if (!ok) {
                std::string expected;
                for (std::size_t c = 0; c < header.size(); ++c) {
                    expected += (c ? "," : "") + std::string(header[c]);
                }
                throw ValidationError("expected header '" + expected + "' on line " + std::to_string(line_no));
            }
            have_header = true;
            continue;
        }
        if (fields.size() != header.size()) {
            throw ValidationError("malformed row on line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields");
        }
        for (std::size_t c = 0; c < header.size(); ++c) columns[c].push_back(parse_double(fields[c], line_no));
    }
    if (!have_header) throw ValidationError("missing header row");
    return columns;
}

struct Grid {
    double t0;
    double dt;
};

// Validates uniform spacing, or splices gaps when requested. Times are
// compared against the ideal grid with a tolerance relative to the magnitude
// of the timeline, since 15-digit epoch stamps carry ~1e-5 s of rounding.
Grid resolve_grid(std::span<const double> t, const CsvReadOptions& options) {
    if (t.size() < 2) throw ValidationError("uniform series needs at least two rows to define dt");
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) {
            throw ValidationError("timestamps not strictly increasing at row " + std::to_string(i + 1));
        }
    }
    const double extent = t.back() - t.front();
    const double scale = std::max({std::abs(t.front()), std::abs(t.back()), extent});
    const double tol = 1e-9 * scale;

    if (!options.splice_gaps) {
        const double dt = extent / static_cast<double>(t.size() - 1);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double ideal = t.front() + static_cast<double>(i) * dt;
            if (std::abs(t[i] - ideal) > tol) {
                throw ValidationError("non-uniform dt at row " + std::to_string(i + 1) +
                                      " (use gap splicing for session data)");
            }
        }
        return {t.front(), dt};
    }

    double dt = t[1] - t[0];
    for (std::size_t i = 2; i < t.size(); ++i) dt = std::min(dt, t[i] - t[i - 1]);
    double sum = 0.0;
    std::size_t regular = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double s = t[i] - t[i - 1];
        if (std::abs(s - dt) <= 2.0 * tol) {
            sum += s;
            ++regular;
        }
    }
    return {t.front(), sum / static_cast<double>(regular)};
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ostream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

std::string format_number(double value) {
    char buf[40];
    const int n = std::snprintf(buf, sizeof buf, "%.15g", value);
    return std::string(buf, static_cast<std::size_t>(n));
}

UniformSeries read_series_csv(std::istream& in, const CsvReadOptions& options) {
    constexpr std::string_view header[] = {"t", "value"};
    auto cols = read_table(in, header);
    const auto grid = resolve_grid(cols[0], options);
    return {grid.t0, grid.dt, std::move(cols[1])};
}

UniformSeries read_series_csv(const std::filesystem::path& path, const CsvReadOptions& options) {
    auto in = open_in(path);
    return read_series_csv(in, options);
}

void write_series_csv(std::ostream& out, const UniformSeries& series) {
    out << "t,value\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_number(series.time_at(i)) << ',' << format_number(series[i]) << '\n';
    }
}

void write_series_csv(const std::filesystem::path& path, const UniformSeries& series) {
    auto out = open_out(path);
    write_series_csv(out, series);
    finish(out, path);
}

PriceSeries read_prices_csv(std::istream& in, const CsvReadOptions& options) {
    constexpr std::string_view header[] = {"timestamp", "price"};
    auto cols = read_table(in, header);
    const auto grid = resolve_grid(cols[0], options);
    return {grid.t0, grid.dt, std::move(cols[1])};
}

PriceSeries read_prices_csv(const std::filesystem::path& path, const CsvReadOptions& options) {
    auto in = open_in(path);
    return read_prices_csv(in, options);
}

void write_prices_csv(std::ostream& out, const PriceSeries& prices) {
    out << "timestamp,price\n";
    const auto p = prices.prices();
    for (std::size_t i = 0; i < p.size(); ++i) {
        out << format_number(prices.t0() + static_cast<double>(i) * prices.dt()) << ','
            << format_number(p[i]) << '\n';
    }
}

void write_prices_csv(const std::filesystem::path& path, const PriceSeries& prices) {
    auto out = open_out(path);
    write_prices_csv(out, prices);
    finish(out, path);
}

EventStream read_events_csv(std::istream& in) {
    constexpr std::string_view header[] = {"timestamp"};
    auto cols = read_table(in, header);
    return EventStream(std::move(cols[0]));
}

EventStream read_events_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_events_csv(in);
}

void write_events_csv(std::ostream& out, const EventStream& events) {
    out << "timestamp\n";
    for (double t : events.timestamps()) out << format_number(t) << '\n';
}

void write_events_csv(const std::filesystem::path& path, const EventStream& events) {
    auto out = open_out(path);
    write_events_csv(out, events);
    finish(out, path);
}

std::vector<Episode> read_durations_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<Episode> out;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = trim(line);
        if (view.empty()) continue;
        const auto fields = split(view);
        if (!have_header) {
            if (fields.size() != 4 || fields[0] != "kind" || fields[1] != "start" || fields[2] != "end" ||
                fields[3] != "duration") {
                throw ValidationError("expected header 'kind,start,end,duration' on line " + std::to_string(line_no));
            }
            have_header = true;
            continue;
        }
        if (fields.size() != 4) {
            throw ValidationError("malformed row on line " + std::to_string(line_no) + ": expected 4 fields");
        }
        Episode e{};
        try {
            e.kind = episode_kind_from_string(std::string(fields[0]));
        } catch (const ValidationError&) {
            throw ValidationError("unknown kind '" + std::string(fields[0]) + "' on line " + std::to_string(line_no));
        }
        e.start = parse_double(fields[1], line_no);
        e.end = parse_double(fields[2], line_no);
        e.duration = parse_double(fields[3], line_no);
        if (!(e.duration > 0.0)) throw ValidationError("non-positive duration on line " + std::to_string(line_no));
        e.samples = 0;
        out.push_back(e);
    }
    if (!have_header) throw ValidationError("missing header row");
    return out;
}

std::vector<Episode> read_durations_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_durations_csv(in);
}

void write_durations_csv(std::ostream& out, std::span<const Episode> episodes) {
    out << "kind,start,end,duration\n";
    for (const auto& e : episodes) {
        out << to_string(e.kind) << ',' << format_number(e.start) << ',' << format_number(e.end) << ','
            << format_number(e.duration) << '\n';
    }
}

void write_durations_csv(const std::filesystem::path& path, std::span<const Episode> episodes) {
    auto out = open_out(path);
    write_durations_csv(out, episodes);
    finish(out, path);
}

}  // namespace burstlab
