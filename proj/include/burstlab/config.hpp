#pragma once

// Pipeline configuration: a flat "key = value" text file. Lines starting with
// '#' are comments. A `preset` key, wherever it appears, is applied first and
// the remaining keys override it. Unknown keys are errors.
//
// Keys (defaults in brackets):
//   preset                 activity | returns | daily | custom [custom]
//   source                 sde | fbm | events | csv [sde]
//   seed                   unsigned 64-bit; generated and recorded if absent
//   pool.count             independent simulated series pooled per threshold [1];
//                          CSV sources pool the files listed in csv.path
//   sde.eta sde.lambda sde.x_min sde.x_max sde.kappa sde.x0
//   sde.duration [20]  sde.dt [2e-5]
//   fbm.hurst [0.5]  fbm.n [262144]  fbm.paths [1]  fbm.dt [1]
//   events.path            events CSV; empty simulates events from the SDE
//   events.counts_per_unit expected events per bin per unit of x [5]
//   csv.path               comma separated list of CSV files
//   csv.kind               series | prices [series]
//   csv.splice_gaps        true | false [false]
//   returns.delta_steps [1]  returns.a0 [10]
//   filter                 none | anscombe | rolling_std [none]
//   filter.bin_seconds [60]  filter.ma_window [10]  filter.std_window [10]
//   normalize              true | false [true]
//   thresholds.burst       comma separated h values
//   thresholds.interburst  comma separated h values
//   durations.convention   sample_count | interpolated [sample_count]
//   durations.bins_per_decade [8]
//   durations.fit_lo durations.fit_hi   fit range in samples [10, 1000]
//   psd.segment [4096]  psd.bins_per_decade [10]
//   psd.fit_lo psd.fit_hi  Hz, 0 selects the full estimated range [0, 0]
//   psd.two_regime         true | false [true]

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "burstlab/passage.hpp"

namespace burstlab {

enum class SourceKind { sde, fbm, events, csv };
enum class FilterKind { none, anscombe, rolling_std };
enum class CsvKind { series, prices };

const char* to_string(SourceKind kind) noexcept;
const char* to_string(FilterKind kind) noexcept;
const char* to_string(CsvKind kind) noexcept;

struct PipelineConfig {
    std::string preset = "custom";
    SourceKind source = SourceKind::sde;
    std::optional<std::uint64_t> seed;
    std::size_t pool_count = 1;

    double sde_eta = 2.5;
    double sde_lambda = 3.0;
    double sde_x_min = 1.0;
    double sde_x_max = 1e3;
    double sde_kappa = 0.1;
    double sde_x0 = 1.0;
    double sde_duration = 20.0;
    double sde_dt = 2e-5;

    double fbm_hurst = 0.5;
    std::size_t fbm_n = std::size_t{1} << 18;
    std::size_t fbm_paths = 1;
    double fbm_dt = 1.0;

    std::string events_path;
    double events_counts_per_unit = 5.0;

    std::vector<std::string> csv_paths;
    CsvKind csv_kind = CsvKind::series;
    bool csv_splice_gaps = false;

    std::size_t returns_delta_steps = 1;
    double returns_a0 = 10.0;

    FilterKind filter = FilterKind::none;
    double filter_bin_seconds = 60.0;
    std::size_t filter_ma_window = 10;
    std::size_t filter_std_window = 10;

    bool normalize = true;
    std::vector<double> burst_thresholds;
    std::vector<double> interburst_thresholds;

    DurationConvention convention = DurationConvention::sample_count;
    int duration_bins_per_decade = 8;
    double duration_fit_lo = 10.0;
    double duration_fit_hi = 1000.0;

    std::size_t psd_segment = 4096;
    int psd_bins_per_decade = 10;
    double psd_fit_lo = 0.0;
    double psd_fit_hi = 0.0;
    bool psd_two_regime = true;

    /// Execution only; not part of the configuration snapshot.
    std::size_t threads = 1;

    /// Checks every invariant and throws one ValidationError listing all
    /// failures. With `check_files`, referenced input files must exist.
    void validate(bool check_files = true) const;

    /// Canonical key/value view of every setting, including defaults.
    std::map<std::string, std::string> to_map() const;
};

/// Built-in preset names.
std::vector<std::string> preset_names();

PipelineConfig apply_preset(const std::string& name);

/// Parses configuration text; syntax and value errors are collected and
/// reported together.
PipelineConfig parse_config(std::istream& in);
PipelineConfig parse_config_text(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Applies one key/value pair; throws ValidationError for unknown keys or bad values.
void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value);

std::string format_config(const PipelineConfig& cfg);

}  // namespace burstlab
