#include "burstlab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "burstlab/error.hpp"
#include "burstlab/sde.hpp"
#include "burstlab/series_io.hpp"

namespace burstlab {

const char* to_string(SourceKind kind) noexcept {
    switch (kind) {
        case SourceKind::sde: return "sde";
        case SourceKind::fbm: return "fbm";
        case SourceKind::events: return "events";
        case SourceKind::csv: return "csv";
    }
    return "unknown";
}

const char* to_string(FilterKind kind) noexcept {
    switch (kind) {
        case FilterKind::none: return "none";
        case FilterKind::anscombe: return "anscombe";
        case FilterKind::rolling_std: return "rolling_std";
    }
    return "unknown";
}

const char* to_string(CsvKind kind) noexcept { return kind == CsvKind::series ? "series" : "prices"; }

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& value) {
    double v = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || value.empty() || !std::isfinite(v)) {
        throw ValidationError(key + ": expected a number, got '" + value + "'");
    }
    return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
        throw ValidationError(key + ": expected a non-negative integer, got '" + value + "'");
    }
    return v;
}

std::size_t to_size(const std::string& key, const std::string& value) {
    return static_cast<std::size_t>(to_u64(key, value));
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ValidationError(key + ": expected true or false, got '" + value + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(to_double(key, item));
    return out;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_number(values[i]);
    }
    return out;
}

std::string join(const std::vector<std::string>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += values[i];
    }
    return out;
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"source",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             if (v == "sde") c.source = SourceKind::sde;
             else if (v == "fbm") c.source = SourceKind::fbm;
             else if (v == "events") c.source = SourceKind::events;
             else if (v == "csv") c.source = SourceKind::csv;
             else throw ValidationError(k + ": expected sde, fbm, events or csv, got '" + v + "'");
         }},
        {"seed", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); }},
        {"pool.count", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.pool_count = to_size(k, v); }},
        {"sde.eta", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.sde_eta = to_double(k, v); }},
        {"sde.lambda", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.sde_lambda = to_double(k, v); }},
        {"sde.x_min", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.sde_x_min = to_double(k, v); }},
        {"sde.x_max", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.sde_x_max = to_double(k, v); }},
        {"sde.kappa", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.sde_kappa = to_double(k, v); }},
        {"sde.x0", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.sde_x0 = to_double(k, v); }},
        {"sde.duration", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.sde_duration = to_double(k, v); }},
        {"sde.dt", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.sde_dt = to_double(k, v); }},
        {"fbm.hurst", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.fbm_hurst = to_double(k, v); }},
        {"fbm.n", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.fbm_n = to_size(k, v); }},
        {"fbm.paths", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.fbm_paths = to_size(k, v); }},
        {"fbm.dt", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.fbm_dt = to_double(k, v); }},
        {"events.path", [](PipelineConfig& c, const std::string&, const std::string& v) { c.events_path = v; }},
        {"events.counts_per_unit",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.events_counts_per_unit = to_double(k, v); }},
        {"csv.path", [](PipelineConfig& c, const std::string&, const std::string& v) { c.csv_paths = split_list(v); }},
        {"csv.kind",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             if (v == "series") c.csv_kind = CsvKind::series;
             else if (v == "prices") c.csv_kind = CsvKind::prices;
             else throw ValidationError(k + ": expected series or prices, got '" + v + "'");
         }},
        {"csv.splice_gaps", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.csv_splice_gaps = to_bool(k, v); }},
        {"returns.delta_steps",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.returns_delta_steps = to_size(k, v); }},
        {"returns.a0", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.returns_a0 = to_double(k, v); }},
        {"filter",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             if (v == "none") c.filter = FilterKind::none;
             else if (v == "anscombe") c.filter = FilterKind::anscombe;
             else if (v == "rolling_std") c.filter = FilterKind::rolling_std;
             else throw ValidationError(k + ": expected none, anscombe or rolling_std, got '" + v + "'");
         }},
        {"filter.bin_seconds",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.filter_bin_seconds = to_double(k, v); }},
        {"filter.ma_window", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.filter_ma_window = to_size(k, v); }},
        {"filter.std_window",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.filter_std_window = to_size(k, v); }},
        {"normalize", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.normalize = to_bool(k, v); }},
        {"thresholds.burst",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.burst_thresholds = to_doubles(k, v); }},
        {"thresholds.interburst",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.interburst_thresholds = to_doubles(k, v); }},
        {"durations.convention",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             if (v == "sample_count") c.convention = DurationConvention::sample_count;
             else if (v == "interpolated") c.convention = DurationConvention::interpolated;
             else throw ValidationError(k + ": expected sample_count or interpolated, got '" + v + "'");
         }},
        {"durations.bins_per_decade",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             c.duration_bins_per_decade = static_cast<int>(to_size(k, v));
         }},
        {"durations.fit_lo", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.duration_fit_lo = to_double(k, v); }},
        {"durations.fit_hi", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.duration_fit_hi = to_double(k, v); }},
        {"psd.segment", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.psd_segment = to_size(k, v); }},
        {"psd.bins_per_decade",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.psd_bins_per_decade = static_cast<int>(to_size(k, v)); }},
        {"psd.fit_lo", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.psd_fit_lo = to_double(k, v); }},
        {"psd.fit_hi", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.psd_fit_hi = to_double(k, v); }},
        {"psd.two_regime", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.psd_two_regime = to_bool(k, v); }},
    };
    return table;
}

}  // namespace

std::vector<std::string> preset_names() { return {"activity", "returns", "daily", "custom"}; }

PipelineConfig apply_preset(const std::string& name) {
    PipelineConfig c;
    c.preset = name;
    if (name == "activity") {
        c.filter = FilterKind::anscombe;
        c.burst_thresholds = {0.3, 0.4, 0.67};
        c.interburst_thresholds = {1.0, 1.5, 2.5};
    } else if (name == "returns") {
        c.filter = FilterKind::rolling_std;
        c.filter_std_window = 10;
        c.burst_thresholds = {0.3, 0.4, 0.67};
        c.interburst_thresholds = {1.0, 1.5, 2.0};
    } else if (name == "daily") {
        c.filter = FilterKind::rolling_std;
        c.filter_std_window = 10;
        c.pool_count = 5;
        c.burst_thresholds = {0.3, 0.4, 0.67};
        c.interburst_thresholds = {1.5, 2.5, 3.0};
    } else if (name != "custom") {
        throw ValidationError("preset: expected activity, returns, daily or custom, got '" + name + "'");
    }
    return c;
}

void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw ValidationError("unknown key '" + key + "'");
    it->second(cfg, key, value);
}

PipelineConfig parse_config(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::string> errors;
    std::string preset = "custom";
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        auto key = trim(text.substr(0, eq));
        auto value = trim(text.substr(eq + 1));
        if (auto [it, inserted] = seen.emplace(key, line_no); !inserted) {
            errors.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key + "' (first on line " +
                             std::to_string(it->second) + ")");
            continue;
        }
        if (key == "preset") {
            preset = value;
        } else {
            entries.emplace_back("line " + std::to_string(line_no) + ": " + key, value);
        }
    }

    PipelineConfig cfg;
    try {
        cfg = apply_preset(preset);
    } catch (const ValidationError& e) {
        errors.push_back(e.what());
    }
    for (const auto& [where, value] : entries) {
        const auto key = where.substr(where.find(": ") + 2);
        try {
            set_config_value(cfg, key, value);
        } catch (const ValidationError& e) {
            errors.push_back(where.substr(0, where.find(": ")) + ": " + e.what());
        }
    }
    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ValidationError(msg);
    }
    return cfg;
}

PipelineConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    return parse_config(in);
}

void PipelineConfig::validate(bool check_files) const {
    std::vector<std::string> errors;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };

    check(pool_count >= 1, "pool.count must be >= 1");
    check(threads >= 1, "threads must be >= 1");
    const bool simulates_sde =
        source == SourceKind::sde || (source == SourceKind::events && events_path.empty());
    if (simulates_sde) {
        SdeParams p{sde_eta, sde_lambda, sde_x_min, sde_x_max, sde_kappa, sde_x0};
        try {
            p.validate();
        } catch (const ValidationError& e) {
            errors.push_back(e.what());
        }
        check(std::isfinite(sde_dt) && sde_dt > 0.0, "sde.dt must be > 0");
        check(sde_duration >= 100.0 * sde_dt, "sde.duration must be >= 100 sde.dt");
    }
    if (source == SourceKind::fbm) {
        check(fbm_hurst > 0.0 && fbm_hurst < 1.0, "fbm.hurst must lie in (0, 1)");
        check(fbm_n >= 2, "fbm.n must be >= 2");
        check(fbm_paths >= 1, "fbm.paths must be >= 1");
        check(std::isfinite(fbm_dt) && fbm_dt > 0.0, "fbm.dt must be > 0");
        check(filter == FilterKind::none, "fbm source supports filter = none only");
    }
    if (source == SourceKind::events) {
        check(filter == FilterKind::anscombe, "events source requires filter = anscombe");
        if (!events_path.empty() && check_files) {
            check(std::filesystem::exists(events_path), "events.path: no such file '" + events_path + "'");
        }
    }
    if (source == SourceKind::events || (source == SourceKind::sde && filter == FilterKind::anscombe)) {
        check(std::isfinite(events_counts_per_unit) && events_counts_per_unit > 0.0,
              "events.counts_per_unit must be > 0");
    }
    if (source == SourceKind::csv) {
        check(!csv_paths.empty(), "csv.path must list at least one file");
        check(filter != FilterKind::anscombe, "csv source cannot use filter = anscombe; use an events source");
        if (check_files) {
            for (const auto& p : csv_paths) check(std::filesystem::exists(p), "csv.path: no such file '" + p + "'");
        }
    }
    check(returns_delta_steps >= 1, "returns.delta_steps must be >= 1");
    check(std::isfinite(returns_a0) && returns_a0 >= 0.0, "returns.a0 must be >= 0");
    check(std::isfinite(filter_bin_seconds) && filter_bin_seconds > 0.0, "filter.bin_seconds must be > 0");
    check(filter_ma_window >= 1, "filter.ma_window must be >= 1");
    check(filter_std_window >= 2, "filter.std_window must be >= 2");
    check(!burst_thresholds.empty() || !interburst_thresholds.empty(), "at least one threshold is required");
    for (double h : burst_thresholds) check(std::isfinite(h) && h >= 0.0, "thresholds.burst must be finite and >= 0");
    for (double h : interburst_thresholds) {
        check(std::isfinite(h) && h >= 0.0, "thresholds.interburst must be finite and >= 0");
    }
    check(duration_bins_per_decade >= 1, "durations.bins_per_decade must be >= 1");
    check(std::isfinite(duration_fit_lo) && duration_fit_lo >= 1.0, "durations.fit_lo must be >= 1 sample");
    check(std::isfinite(duration_fit_hi) && duration_fit_hi > duration_fit_lo, "durations.fit_hi must exceed durations.fit_lo");
    check(psd_segment >= 16, "psd.segment must be >= 16");
    check(psd_bins_per_decade >= 1, "psd.bins_per_decade must be >= 1");
    check(psd_fit_lo >= 0.0 && psd_fit_hi >= 0.0, "psd.fit_lo and psd.fit_hi must be >= 0");
    check(psd_fit_hi == 0.0 || psd_fit_hi > psd_fit_lo, "psd.fit_hi must exceed psd.fit_lo");

    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ValidationError(msg);
    }
}

std::map<std::string, std::string> PipelineConfig::to_map() const {
    const auto num = [](double v) { return format_number(v); };
    const auto flag = [](bool v) { return std::string(v ? "true" : "false"); };
    return {
        {"preset", preset},
        {"source", to_string(source)},
        {"seed", seed ? std::to_string(*seed) : std::string()},
        {"pool.count", std::to_string(pool_count)},
        {"sde.eta", num(sde_eta)},
        {"sde.lambda", num(sde_lambda)},
        {"sde.x_min", num(sde_x_min)},
        {"sde.x_max", num(sde_x_max)},
        {"sde.kappa", num(sde_kappa)},
        {"sde.x0", num(sde_x0)},
        {"sde.duration", num(sde_duration)},
        {"sde.dt", num(sde_dt)},
        {"fbm.hurst", num(fbm_hurst)},
        {"fbm.n", std::to_string(fbm_n)},
        {"fbm.paths", std::to_string(fbm_paths)},
        {"fbm.dt", num(fbm_dt)},
        {"events.path", events_path},
        {"events.counts_per_unit", num(events_counts_per_unit)},
        {"csv.path", join(csv_paths)},
        {"csv.kind", to_string(csv_kind)},
        {"csv.splice_gaps", flag(csv_splice_gaps)},
        {"returns.delta_steps", std::to_string(returns_delta_steps)},
        {"returns.a0", num(returns_a0)},
        {"filter", to_string(filter)},
        {"filter.bin_seconds", num(filter_bin_seconds)},
        {"filter.ma_window", std::to_string(filter_ma_window)},
        {"filter.std_window", std::to_string(filter_std_window)},
        {"normalize", flag(normalize)},
        {"thresholds.burst", join(burst_thresholds)},
        {"thresholds.interburst", join(interburst_thresholds)},
        {"durations.convention", convention == DurationConvention::sample_count ? "sample_count" : "interpolated"},
        {"durations.bins_per_decade", std::to_string(duration_bins_per_decade)},
        {"durations.fit_lo", num(duration_fit_lo)},
        {"durations.fit_hi", num(duration_fit_hi)},
        {"psd.segment", std::to_string(psd_segment)},
        {"psd.bins_per_decade", std::to_string(psd_bins_per_decade)},
        {"psd.fit_lo", num(psd_fit_lo)},
        {"psd.fit_hi", num(psd_fit_hi)},
        {"psd.two_regime", flag(psd_two_regime)},
    };
}

std::string format_config(const PipelineConfig& cfg) {
    std::string out;
    for (const auto& [key, value] : cfg.to_map()) {
        if (value.empty()) continue;
        out += key + " = " + value + "\n";
    }
    return out;
}

}  // namespace burstlab
