#pragma once

// Configuration-driven analysis:
//
//   source -> filter -> normalize -> threshold passages -> duration fits
//                                 -> Welch spectrum -> spectral fits -> verdict
//
// Sources: the nonlinear SDE, fractional Brownian motion, trade event streams
// (loaded, or simulated from an SDE-driven rate) and CSV series or prices.

#include <filesystem>
#include <string>
#include <vector>

#include "burstlab/config.hpp"
#include "burstlab/report.hpp"
#include "burstlab/spectral.hpp"

namespace burstlab {

/// Episodes behind one threshold entry of the report, kept for CSV output.
struct ThresholdEpisodes {
    std::vector<Episode> episodes;  // pooled over series, only the entry's kind
};

struct PipelineResult {
    Report report;
    std::vector<ThresholdEpisodes> episodes;  // parallel to report.thresholds
    std::optional<SpectrumEstimate> spectrum; // merged, before log binning
};

/// Runs the configured chain. Deterministic for a given configuration and
/// seed, independent of cfg.threads.
PipelineResult run_pipeline(PipelineConfig cfg);

/// Verdict rule, exposed for testing. `fits` are likelihood fits with their
/// standard errors; `psd` supplies H.
Verdict make_verdict(const std::vector<PowerLawFit>& fits, const PsdSummary& psd);

struct ManifestEntry {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

/// File names used inside an output directory.
std::string histogram_file_name(const ThresholdResult& t, std::size_t index);
std::string durations_file_name(const ThresholdResult& t, std::size_t index);
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kSpectrumFile = "spectrum.csv";
inline constexpr const char* kBinnedSpectrumFile = "spectrum_binned.csv";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kPlotScriptFile = "plot.gp";

/// Writes report.json, per-threshold histogram and duration CSVs, the
/// spectrum CSVs and manifest.json (SHA-256 of every other file). Returns the
/// manifest entries.
std::vector<ManifestEntry> emit_report(const PipelineResult& result, const std::filesystem::path& dir);

/// Gnuplot script drawing the duration densities with a slope -3/2 guide and
/// the binned spectrum with its fitted segments. References only files that
/// emit_report writes for the same report. Returns the script path.
std::filesystem::path emit_plot_script(const Report& report, const std::filesystem::path& dir);

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& dir);

/// Lower-case hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

}  // namespace burstlab
