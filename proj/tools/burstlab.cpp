// burstlab command line: simulation, filtering, passage analysis, spectral
// fits and the full configuration-driven pipeline.
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "burstlab/config.hpp"
#include "burstlab/error.hpp"
#include "burstlab/fbm.hpp"
#include "burstlab/passage.hpp"
#include "burstlab/pipeline.hpp"
#include "burstlab/point_process.hpp"
#include "burstlab/report.hpp"
#include "burstlab/sde.hpp"
#include "burstlab/series_io.hpp"
#include "burstlab/spectral.hpp"

namespace fs = std::filesystem;
using namespace burstlab;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::size_t threads = 1;
};

void add_common(CLI::App* cmd, Common& c, const std::string& out_help) {
    cmd->add_option("--config", c.config, "Pipeline configuration file (key = value)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Random seed (overrides the configuration)");
    cmd->add_option("--out", c.out, out_help);
    cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
}

PipelineConfig base_config(const Common& c) {
    PipelineConfig cfg = c.config.empty() ? PipelineConfig{} : load_config(c.config);
    if (c.seed) cfg.seed = c.seed;
    cfg.threads = c.threads;
    return cfg;
}

std::uint64_t seed_of(const PipelineConfig& cfg) {
    if (!cfg.seed) throw ValidationError("a seed is required (--seed or seed = ... in the configuration)");
    return *cfg.seed;
}

void require_out(const Common& c) {
    if (c.out.empty()) throw ValidationError("--out is required");
}

void print_fit(const char* name, const PowerLawFit& f) {
    std::cout << name << ": exponent " << format_number(f.exponent) << " +- " << format_number(f.std_error)
              << " over [" << format_number(f.lo) << ", " << format_number(f.hi) << "], n = " << f.n << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"burstlab: burst and inter-burst duration statistics of Markov and long-memory signals"};
    app.require_subcommand(1);

    // simulate-sde
    Common sde_c;
    std::optional<double> eta, lambda, x_min, x_max, kappa, x0, duration, dt;
    auto* sde_cmd = app.add_subcommand("simulate-sde", "Simulate the nonlinear SDE and write a series CSV");
    add_common(sde_cmd, sde_c, "Output series CSV");
    sde_cmd->add_option("--eta", eta, "Noise multiplicativity exponent");
    sde_cmd->add_option("--lambda", lambda, "Stationary density exponent");
    sde_cmd->add_option("--x-min", x_min, "Lower reflecting boundary");
    sde_cmd->add_option("--x-max", x_max, "Upper reflecting boundary");
    sde_cmd->add_option("--kappa", kappa, "Relative step size");
    sde_cmd->add_option("--x0", x0, "Initial state");
    sde_cmd->add_option("--duration", duration, "Simulated time (s)");
    sde_cmd->add_option("--dt", dt, "Output sampling interval (s)");

    // simulate-fbm
    Common fbm_c;
    std::optional<double> hurst, fbm_dt;
    std::optional<std::size_t> fbm_n;
    bool increments = false;
    auto* fbm_cmd = app.add_subcommand("simulate-fbm", "Simulate fractional Brownian motion and write a series CSV");
    add_common(fbm_cmd, fbm_c, "Output series CSV");
    fbm_cmd->add_option("--hurst", hurst, "Hurst exponent in (0, 1)");
    fbm_cmd->add_option("--n", fbm_n, "Number of samples");
    fbm_cmd->add_option("--dt", fbm_dt, "Sampling interval");
    fbm_cmd->add_flag("--increments", increments, "Write the fractional Gaussian noise instead of its sum");

    // simulate-events
    Common ev_c;
    std::optional<double> rate;
    std::string driver;
    std::optional<double> ev_duration, counts_per_unit, ev_bin;
    auto* ev_cmd = app.add_subcommand("simulate-events", "Generate Poisson trade times from a constant or driven rate");
    add_common(ev_cmd, ev_c, "Output events CSV");
    ev_cmd->add_option("--rate", rate, "Constant rate (events per second)");
    ev_cmd->add_option("--driver", driver, "Series CSV whose samples drive one bin each")->check(CLI::ExistingFile);
    ev_cmd->add_option("--duration", ev_duration, "Duration for a constant rate (s)");
    ev_cmd->add_option("--counts-per-unit", counts_per_unit, "Expected events per bin per unit of the driver");
    ev_cmd->add_option("--bin-seconds", ev_bin, "Seconds per driver sample");

    // denoise
    Common dn_c;
    std::string dn_events;
    std::optional<double> dn_bin;
    std::optional<std::size_t> dn_ma;
    auto* dn_cmd = app.add_subcommand("denoise", "Recover trading activity from event times (Anscombe pipeline)");
    add_common(dn_cmd, dn_c, "Output series CSV");
    dn_cmd->add_option("--events", dn_events, "Events CSV")->required()->check(CLI::ExistingFile);
    dn_cmd->add_option("--bin-seconds", dn_bin, "Counting bin (s)");
    dn_cmd->add_option("--ma-window", dn_ma, "Moving average window (bins)");

    // bursts
    Common bu_c;
    std::string bu_input;
    std::vector<double> bu_thresholds;
    bool bu_normalize = false, bu_interpolated = false, splice = false;
    auto* bu_cmd = app.add_subcommand("bursts", "Extract burst and inter-burst durations at thresholds");
    add_common(bu_cmd, bu_c, "Output durations CSV (one threshold) or directory (several)");
    bu_cmd->add_option("--input", bu_input, "Series CSV")->required()->check(CLI::ExistingFile);
    bu_cmd->add_option("--threshold,-t", bu_thresholds, "Threshold h (repeatable)")->required();
    bu_cmd->add_flag("--normalize", bu_normalize, "Divide by the sample standard deviation first");
    bu_cmd->add_flag("--interpolated", bu_interpolated, "Interpolated crossing-to-crossing durations");
    bu_cmd->add_flag("--splice-gaps", splice, "Concatenate sessions separated by gaps");

    // psd
    Common ps_c;
    std::string ps_input;
    std::size_t ps_segment = 4096;
    double ps_overlap = 0.5;
    int ps_bins = 10;
    bool ps_two = false, ps_splice = false;
    auto* ps_cmd = app.add_subcommand("psd", "Welch spectrum of a series with power-law fits");
    add_common(ps_cmd, ps_c, "Output spectrum CSV (f,power)");
    ps_cmd->add_option("--input", ps_input, "Series CSV")->required()->check(CLI::ExistingFile);
    ps_cmd->add_option("--segment", ps_segment, "Segment length in samples");
    ps_cmd->add_option("--overlap", ps_overlap, "Segment overlap fraction");
    ps_cmd->add_option("--bins-per-decade", ps_bins, "Log-binning density for the fits");
    ps_cmd->add_flag("--two-regime", ps_two, "Also fit two power laws with a break");
    ps_cmd->add_flag("--splice-gaps", ps_splice, "Concatenate sessions separated by gaps");

    // fit
    Common fi_c;
    std::string fi_input, fi_kind = "burst";
    double fi_lo = 0.0, fi_hi = 0.0;
    int fi_bins = 8;
    auto* fi_cmd = app.add_subcommand("fit", "Fit the power-law exponent of a durations CSV");
    add_common(fi_cmd, fi_c, "Output histogram CSV");
    fi_cmd->add_option("--input", fi_input, "Durations CSV (kind,start,end,duration)")->required()->check(CLI::ExistingFile);
    fi_cmd->add_option("--kind", fi_kind, "burst or interburst")->check(CLI::IsMember({"burst", "interburst"}));
    fi_cmd->add_option("--lo", fi_lo, "Lower end of the fit range (s)")->required();
    fi_cmd->add_option("--hi", fi_hi, "Upper end of the fit range (s)")->required();
    fi_cmd->add_option("--bins-per-decade", fi_bins, "Histogram density");

    // run
    Common run_c;
    auto* run_cmd = app.add_subcommand("run", "Run the full pipeline and write the report");
    add_common(run_cmd, run_c, "Output directory");
    run_cmd->add_flag("--splice-gaps", splice, "Concatenate sessions separated by gaps in CSV inputs");

    // report
    Common rep_c;
    std::string rep_in;
    auto* rep_cmd = app.add_subcommand("report", "Validate a report directory and write its plot script");
    add_common(rep_cmd, rep_c, "Directory for the plot script (defaults to the report directory)");
    rep_cmd->add_option("--in", rep_in, "Report directory")->required()->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sde_cmd) {
            auto cfg = base_config(sde_c);
            require_out(sde_c);
            SdeParams p{eta.value_or(cfg.sde_eta),   lambda.value_or(cfg.sde_lambda), x_min.value_or(cfg.sde_x_min),
                        x_max.value_or(cfg.sde_x_max), kappa.value_or(cfg.sde_kappa), x0.value_or(cfg.sde_x0)};
            auto x = simulate_sde(p, duration.value_or(cfg.sde_duration), dt.value_or(cfg.sde_dt), seed_of(cfg));
            write_series_csv(fs::path(sde_c.out), x);
            const auto th = psd_exponent_theory(p);
            std::cout << "wrote " << x.size() << " samples to " << sde_c.out << " (theory: beta "
                      << format_number(th.beta) << ", H " << format_number(th.hurst) << ")\n";
        } else if (*fbm_cmd) {
            auto cfg = base_config(fbm_c);
            require_out(fbm_c);
            FbmParams p{hurst.value_or(cfg.fbm_hurst), fbm_n.value_or(cfg.fbm_n), fbm_dt.value_or(cfg.fbm_dt), 1.0};
            auto s = increments ? simulate_fgn(p, seed_of(cfg)) : simulate_fbm(p, seed_of(cfg));
            write_series_csv(fs::path(fbm_c.out), s.series);
            std::cout << "wrote " << s.series.size() << " samples to " << fbm_c.out << " using " << to_string(s.method)
                      << "\n";
        } else if (*ev_cmd) {
            auto cfg = base_config(ev_c);
            require_out(ev_c);
            if (rate.has_value() == !driver.empty()) throw ValidationError("give exactly one of --rate and --driver");
            UniformSeries r = [&] {
                if (rate) {
                    if (!ev_duration) throw ValidationError("--rate needs --duration");
                    const double bin = ev_bin.value_or(cfg.filter_bin_seconds);
                    const auto n = static_cast<std::size_t>(std::ceil(*ev_duration / bin));
                    return UniformSeries(0.0, bin, std::vector<double>(std::max<std::size_t>(n, 1), *rate));
                }
                return rate_from_driver(read_series_csv(fs::path(driver)),
                                        counts_per_unit.value_or(cfg.events_counts_per_unit),
                                        ev_bin.value_or(cfg.filter_bin_seconds));
            }();
            auto events = generate_events(r, seed_of(cfg));
            write_events_csv(fs::path(ev_c.out), events);
            std::cout << "wrote " << events.size() << " events to " << ev_c.out << "\n";
        } else if (*dn_cmd) {
            auto cfg = base_config(dn_c);
            require_out(dn_c);
            PoissonPipelineConfig pc{dn_bin.value_or(cfg.filter_bin_seconds), dn_ma.value_or(cfg.filter_ma_window)};
            auto d = denoise_activity(read_events_csv(fs::path(dn_events)), pc);
            write_series_csv(fs::path(dn_c.out), d.activity);
            std::cout << "wrote " << d.activity.size() << " bins to " << dn_c.out << "; clamped " << d.clamped
                      << "; stages";
            for (const auto& s : d.stages) std::cout << " " << s;
            std::cout << "\n";
        } else if (*bu_cmd) {
            base_config(bu_c);
            auto series = read_series_csv(fs::path(bu_input), CsvReadOptions{splice});
            if (bu_normalize) series = normalize_unit_std(series).series;
            const auto conv = bu_interpolated ? DurationConvention::interpolated : DurationConvention::sample_count;
            if (bu_thresholds.size() > 1 && !bu_c.out.empty()) fs::create_directories(bu_c.out);
            for (double h : bu_thresholds) {
                const auto set = extract_bursts(series, h, conv);
                std::cout << "h " << format_number(h) << ": bursts " << set.count(EpisodeKind::burst) << ", interbursts "
                          << set.count(EpisodeKind::interburst) << ", censored runs " << set.edge_censored << "\n";
                if (bu_c.out.empty()) continue;
                const fs::path path = bu_thresholds.size() > 1
                                          ? fs::path(bu_c.out) / ("durations_h" + format_number(h) + ".csv")
                                          : fs::path(bu_c.out);
                write_durations_csv(path, set.episodes);
            }
        } else if (*ps_cmd) {
            base_config(ps_c);
            auto series = read_series_csv(fs::path(ps_input), CsvReadOptions{ps_splice});
            auto spec = welch_psd(series, ps_segment, ps_overlap);
            if (!ps_c.out.empty()) {
                std::ofstream out(ps_c.out);
                if (!out) throw IoError("cannot write " + ps_c.out);
                out << "f,power\n";
                for (std::size_t i = 0; i < spec.frequencies.size(); ++i) {
                    out << format_number(spec.frequencies[i]) << "," << format_number(spec.power[i]) << "\n";
                }
            }
            auto binned = log_bin_spectrum(spec, ps_bins);
            print_fit("beta", fit_power_law(binned, binned.frequencies.front(), binned.frequencies.back()));
            if (ps_two) {
                auto t = fit_two_regime_psd(binned);
                print_fit("beta_1", t.low);
                print_fit("beta_2", t.high);
                std::cout << "f_break " << format_number(t.f_break) << " p " << format_number(t.break_p_value)
                          << (t.break_reliable ? "" : " (unreliable)") << "\n";
            }
        } else if (*fi_cmd) {
            base_config(fi_c);
            const auto kind = episode_kind_from_string(fi_kind);
            std::vector<double> durations;
            for (const auto& e : read_durations_csv(fs::path(fi_input))) {
                if (e.kind == kind) durations.push_back(e.duration);
            }
            if (durations.empty()) throw ValidationError("no " + fi_kind + " durations in " + fi_input);
            auto hist = duration_histogram(durations, fi_bins);
            print_fit("likelihood", fit_duration_exponent_mle(durations, fi_lo, fi_hi));
            print_fit("histogram", fit_power_law(hist, fi_lo, fi_hi));
            if (!fi_c.out.empty()) {
                std::ofstream out(fi_c.out);
                if (!out) throw IoError("cannot write " + fi_c.out);
                out << "edge_lo,edge_hi,count,density\n";
                for (std::size_t k = 0; k < hist.bins(); ++k) {
                    out << format_number(hist.edges[k]) << "," << format_number(hist.edges[k + 1]) << ","
                        << hist.counts[k] << "," << format_number(hist.density[k]) << "\n";
                }
            }
        } else if (*run_cmd) {
            auto cfg = base_config(run_c);
            require_out(run_c);
            if (splice) cfg.csv_splice_gaps = true;
            auto result = run_pipeline(cfg);
            emit_report(result, run_c.out);
            emit_plot_script(result.report, run_c.out);
            const auto& v = result.report.verdict;
            std::cout << "report written to " << (fs::path(run_c.out) / kReportFile).string() << "\n";
            std::cout << "verdict: " << v.label;
            if (v.exponent) {
                std::cout << " (exponent " << format_number(*v.exponent) << " +- " << format_number(*v.exponent_std_error)
                          << ")";
            }
            std::cout << "\n";
        } else if (*rep_cmd) {
            base_config(rep_c);
            const fs::path dir(rep_in);
            std::ifstream in(dir / kReportFile);
            if (!in) throw IoError("cannot read " + (dir / kReportFile).string());
            const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            const auto report = report_from_json(text);
            for (const auto& e : read_manifest(dir)) {
                if (sha256_file(dir / e.path) != e.sha256) throw ValidationError("hash mismatch for " + e.path);
            }
            const auto script = emit_plot_script(report, rep_c.out.empty() ? dir : fs::path(rep_c.out));
            std::cout << "report valid (" << report.thresholds.size() << " thresholds, verdict " << report.verdict.label
                      << "); plot script " << script.string() << "\n";
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
