#include "burstlab/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <random>
#include <sstream>
#include <thread>

#include "burstlab/error.hpp"
#include "burstlab/fbm.hpp"
#include "burstlab/point_process.hpp"
#include "burstlab/rng.hpp"
#include "burstlab/sde.hpp"
#include "burstlab/series_io.hpp"

namespace burstlab {

namespace {

// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
// exception (lowest index) is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn fn) {
    const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

SdeParams sde_params(const PipelineConfig& c) {
    return {c.sde_eta, c.sde_lambda, c.sde_x_min, c.sde_x_max, c.sde_kappa, c.sde_x0};
}

struct SourceSeries {
    std::string label;
    UniformSeries series;
    std::vector<std::string> stages;
    std::size_t clamped = 0;
};

SourceSeries denoise(const EventStream& events, const PipelineConfig& c, ActivityWindow window, std::string label,
                     std::vector<std::string> stages) {
    const PoissonPipelineConfig pc{c.filter_bin_seconds, c.filter_ma_window};
    auto d = denoise_activity(events, pc, window);
    stages.insert(stages.end(), d.stages.begin(), d.stages.end());
    return {std::move(label), std::move(d.activity), std::move(stages), d.clamped};
}

// Filtered (not yet normalized) series for pool member k.
std::vector<SourceSeries> produce(const PipelineConfig& c, std::size_t k, std::uint64_t seed) {
    const std::string tag = "pool" + std::to_string(k);
    std::vector<SourceSeries> out;
    switch (c.source) {
        case SourceKind::sde:
        case SourceKind::events: {
            if (c.source == SourceKind::events && !c.events_path.empty()) {
                auto events = read_events_csv(c.events_path);
                out.push_back(denoise(events, c, {}, c.events_path, {"read_events_csv"}));
                break;
            }
            if (c.filter == FilterKind::rolling_std) {
                ReturnModelParams rm{c.returns_a0, 1.0, c.sde_dt, true};
                auto r = generate_model_returns(sde_params(c), rm, c.sde_duration, seed);
                out.push_back({tag, rolling_std(r.returns, c.filter_std_window),
                               {"simulate_sde", "generate_model_returns", "rolling_std"}, 0});
                break;
            }
            auto x = simulate_sde(sde_params(c), c.sde_duration, c.sde_dt, derive_seed(seed, 0));
            if (c.filter == FilterKind::anscombe) {
                // Each SDE sample drives one counting bin.
                auto rate = rate_from_driver(x, c.events_counts_per_unit, c.filter_bin_seconds);
                auto events = generate_events(rate, derive_seed(seed, 1));
                const ActivityWindow window{0.0, rate.span()};
                out.push_back(denoise(events, c, window, tag, {"simulate_sde", "rate_from_driver", "generate_events"}));
            } else {
                out.push_back({tag, std::move(x), {"simulate_sde"}, 0});
            }
            break;
        }
        case SourceKind::fbm: {
            const FbmParams fp{c.fbm_hurst, c.fbm_n, c.fbm_dt, 1.0};
            auto ensemble = simulate_fbm_ensemble(fp, c.fbm_paths, seed);
            for (std::size_t p = 0; p < ensemble.paths.size(); ++p) {
                out.push_back({tag + ".path" + std::to_string(p), std::move(ensemble.paths[p]),
                               {std::string("simulate_fbm:") + to_string(ensemble.method)}, 0});
            }
            break;
        }
        case SourceKind::csv: {
            const auto& path = c.csv_paths.at(k);
            const CsvReadOptions opts{c.csv_splice_gaps};
            std::vector<std::string> stages;
            UniformSeries s = [&] {
                if (c.csv_kind == CsvKind::prices) {
                    stages = {"read_prices_csv", "log_returns"};
                    return log_returns(read_prices_csv(path, opts), c.returns_delta_steps);
                }
                stages = {"read_series_csv"};
                return read_series_csv(path, opts);
            }();
            if (c.filter == FilterKind::rolling_std) {
                s = rolling_std(s, c.filter_std_window);
                stages.emplace_back("rolling_std");
            }
            out.push_back({path, std::move(s), std::move(stages), 0});
            break;
        }
    }
    return out;
}

std::optional<PsdSummary> fit_spectrum(const std::vector<UniformSeries>& series, const PipelineConfig& c,
                                       std::optional<SpectrumEstimate>& merged_out) {
    PsdSummary psd;
    psd.segment_len = c.psd_segment;
    std::vector<SpectrumEstimate> parts;
    std::size_t skipped = 0;
    for (const auto& s : series) {
        if (s.size() < c.psd_segment || s.dt() != series.front().dt()) {
            ++skipped;
            continue;
        }
        parts.push_back(welch_psd(s, c.psd_segment));
    }
    if (skipped) psd.notes.push_back(std::to_string(skipped) + " series shorter than psd.segment or with a different dt");
    if (parts.empty()) {
        psd.notes.push_back("no spectrum estimated");
        return psd;
    }
    auto merged = merge_spectra(parts);
    psd.segments = merged.segments_used;
    auto binned = log_bin_spectrum(merged, c.psd_bins_per_decade);
    merged_out = std::move(merged);

    const double lo = c.psd_fit_lo > 0.0 ? c.psd_fit_lo : binned.frequencies.front();
    const double hi = c.psd_fit_hi > 0.0 ? c.psd_fit_hi : binned.frequencies.back();
    SpectrumEstimate ranged;
    ranged.segments_used = binned.segments_used;
    ranged.log_binned = true;
    for (std::size_t i = 0; i < binned.frequencies.size(); ++i) {
        if (binned.frequencies[i] >= lo && binned.frequencies[i] <= hi && binned.power[i] > 0.0) {
            ranged.frequencies.push_back(binned.frequencies[i]);
            ranged.power.push_back(binned.power[i]);
        }
    }
    psd.binned = std::move(binned);

    try {
        psd.single = fit_power_law(ranged, lo, hi);
    } catch (const ValidationError& e) {
        psd.notes.push_back(std::string("single fit: ") + e.what());
    }
    if (c.psd_two_regime) {
        try {
            psd.two_regime = fit_two_regime_psd(ranged);
        } catch (const ValidationError& e) {
            psd.notes.push_back(std::string("two-regime fit: ") + e.what());
        }
    }
    if (psd.two_regime && psd.two_regime->break_reliable) {
        psd.beta_source = "two_regime_low";
        psd.beta = psd.two_regime->low.exponent;
        psd.beta_std_error = psd.two_regime->low.std_error;
    } else if (psd.single) {
        psd.beta_source = "single";
        psd.beta = psd.single->exponent;
        psd.beta_std_error = psd.single->std_error;
    }
    if (psd.beta) {
        const auto h = hurst_from_beta(*psd.beta);
        psd.hurst = h.hurst;
        psd.hurst_in_unit_interval = h.in_unit_interval;
        if (!h.in_unit_interval) psd.notes.push_back("spectral Hurst exponent outside (0, 1)");
    }
    return psd;
}

struct ThresholdJob {
    double h;
    EpisodeKind kind;
};

std::pair<ThresholdResult, ThresholdEpisodes> analyse_threshold(const std::vector<UniformSeries>& series,
                                                                const ThresholdJob& job, const PipelineConfig& c) {
    ThresholdResult r;
    r.h = job.h;
    r.kind = job.kind;
    ThresholdEpisodes eps;
    std::vector<double> durations;
    for (const auto& s : series) {
        const auto set = extract_bursts(s, job.h, c.convention);
        r.bursts += set.count(EpisodeKind::burst);
        r.interbursts += set.count(EpisodeKind::interburst);
        r.edge_censored += set.edge_censored;
        r.censored_time += set.censored_time();
        r.span += set.span;
        for (const auto& e : set.episodes) {
            if (e.kind != job.kind) continue;
            eps.episodes.push_back(e);
            durations.push_back(e.duration);
        }
    }
    r.count = durations.size();
    if (durations.empty()) {
        r.notes.emplace_back("no complete episodes");
        return {std::move(r), std::move(eps)};
    }
    r.histogram = duration_histogram(durations, c.duration_bins_per_decade);
    const double dt = series.front().dt();
    const double lo = c.duration_fit_lo * dt;
    const double hi = c.duration_fit_hi * dt;
    try {
        r.histogram_fit = fit_power_law(*r.histogram, lo, hi);
    } catch (const ValidationError& e) {
        r.notes.push_back(std::string("histogram fit: ") + e.what());
    }
    try {
        r.mle_fit = fit_duration_exponent_mle(durations, lo, hi);
    } catch (const std::exception& e) {
        r.notes.push_back(std::string("likelihood fit: ") + e.what());
    }
    return {std::move(r), std::move(eps)};
}

}  // namespace

Verdict make_verdict(const std::vector<PowerLawFit>& fits, const PsdSummary& psd) {
    Verdict v;
    v.label = "indeterminate";
    double w_sum = 0.0, wx = 0.0;
    for (const auto& f : fits) {
        if (!(f.std_error > 0.0) || !std::isfinite(f.exponent)) continue;
        const double w = 1.0 / (f.std_error * f.std_error);
        w_sum += w;
        wx += w * f.exponent;
        ++v.fits_used;
    }
    if (v.fits_used == 0) return v;
    const double a = wx / w_sum;
    const double se = 1.0 / std::sqrt(w_sum);
    v.exponent = a;
    v.exponent_std_error = se;
    v.markov_distance = std::fabs(a - 1.5) / se;
    v.markov_consistent = std::fabs(a - 1.5) <= std::max(2.0 * se, 0.1);
    if (!psd.hurst || !psd.beta_std_error) {
        v.label = v.markov_consistent ? "consistent-with-3/2" : "inconsistent-with-3/2";
        return v;
    }
    const double target = 2.0 - *psd.hurst;
    const double joint = std::hypot(se, 0.5 * *psd.beta_std_error);
    v.fbm_exponent = target;
    v.fbm_joint_std_error = joint;
    v.fbm_distance = std::fabs(a - target) / joint;
    v.fbm_consistent = std::fabs(a - target) <= std::max(2.0 * joint, 0.1);
    if (v.markov_consistent && !v.fbm_consistent) {
        v.label = "consistent-with-3/2";
    } else if (!v.markov_consistent && v.fbm_consistent) {
        v.label = "inconsistent-with-3/2";
    } else if (!v.markov_consistent && !v.fbm_consistent) {
        v.label = *v.markov_distance <= *v.fbm_distance ? "consistent-with-3/2" : "inconsistent-with-3/2";
    }
    return v;
}

PipelineResult run_pipeline(PipelineConfig cfg) {
    PipelineResult result;
    Report& report = result.report;
    if (!cfg.seed) {
        cfg.seed = std::random_device{}() | (static_cast<std::uint64_t>(std::random_device{}()) << 32);
        report.provenance.seed_generated = true;
    }
    cfg.validate();
    report.provenance.seed = *cfg.seed;
    report.provenance.config = cfg.to_map();
    report.source = to_string(cfg.source);

    const std::size_t members = cfg.source == SourceKind::csv ? cfg.csv_paths.size()
                                : (cfg.source == SourceKind::events && !cfg.events_path.empty()) ? 1
                                                                                                  : cfg.pool_count;
    std::vector<std::vector<SourceSeries>> produced(members);
    parallel_for(members, cfg.threads,
                 [&](std::size_t k) { produced[k] = produce(cfg, k, derive_seed(*cfg.seed, k)); });

    std::vector<UniformSeries> series;
    for (auto& group : produced) {
        for (auto& s : group) {
            report.anscombe_clamped += s.clamped;
            double scale = 1.0;
            if (cfg.normalize) {
                auto n = normalize_unit_std(s.series);
                scale = n.scale;
                s.series = std::move(n.series);
            }
            report.series.push_back({s.label, s.series.t0(), s.series.dt(), s.series.size(), scale});
            if (report.stages.empty()) {
                report.stages = s.stages;
                if (cfg.normalize) report.stages.emplace_back("normalize_unit_std");
                report.stages.emplace_back("extract_bursts");
            }
            series.push_back(std::move(s.series));
        }
    }

    std::vector<ThresholdJob> jobs;
    for (double h : cfg.burst_thresholds) jobs.push_back({h, EpisodeKind::burst});
    for (double h : cfg.interburst_thresholds) jobs.push_back({h, EpisodeKind::interburst});
    report.thresholds.resize(jobs.size());
    result.episodes.resize(jobs.size());
    parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
        auto [r, e] = analyse_threshold(series, jobs[i], cfg);
        report.thresholds[i] = std::move(r);
        result.episodes[i] = std::move(e);
    });

    report.psd = *fit_spectrum(series, cfg, result.spectrum);

    std::vector<PowerLawFit> fits;
    for (const auto& t : report.thresholds) {
        if (t.mle_fit) fits.push_back(*t.mle_fit);
    }
    report.verdict = make_verdict(fits, report.psd);
    return result;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return out.str();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return sha256_hex(buffer.str());
}

namespace {

std::string file_stem(const ThresholdResult& t, std::size_t index) {
    return std::to_string(index) + "_" + to_string(t.kind) + "_h" + format_number(t.h);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

std::string spectrum_csv(const SpectrumEstimate& s) {
    std::string out = "f,power\n";
    for (std::size_t i = 0; i < s.frequencies.size(); ++i) {
        out += format_number(s.frequencies[i]) + "," + format_number(s.power[i]) + "\n";
    }
    return out;
}

}  // namespace

std::string histogram_file_name(const ThresholdResult& t, std::size_t index) {
    return "histogram_" + file_stem(t, index) + ".csv";
}

std::string durations_file_name(const ThresholdResult& t, std::size_t index) {
    return "durations_" + file_stem(t, index) + ".csv";
}

std::vector<ManifestEntry> emit_report(const PipelineResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    const Report& report = result.report;
    std::vector<std::string> files;
    write_text(dir / kReportFile, report_to_json(report));
    files.emplace_back(kReportFile);

    for (std::size_t i = 0; i < report.thresholds.size(); ++i) {
        const auto& t = report.thresholds[i];
        if (t.histogram) {
            std::string csv = "edge_lo,edge_hi,count,density\n";
            const auto& h = *t.histogram;
            for (std::size_t k = 0; k < h.bins(); ++k) {
                csv += format_number(h.edges[k]) + "," + format_number(h.edges[k + 1]) + "," +
                       std::to_string(h.counts[k]) + "," + format_number(h.density[k]) + "\n";
            }
            write_text(dir / histogram_file_name(t, i), csv);
            files.push_back(histogram_file_name(t, i));
        }
        if (i < result.episodes.size()) {
            write_durations_csv(dir / durations_file_name(t, i), result.episodes[i].episodes);
            files.push_back(durations_file_name(t, i));
        }
    }
    if (result.spectrum) {
        write_text(dir / kSpectrumFile, spectrum_csv(*result.spectrum));
        files.emplace_back(kSpectrumFile);
    }
    if (report.psd.binned) {
        write_text(dir / kBinnedSpectrumFile, spectrum_csv(*report.psd.binned));
        files.emplace_back(kBinnedSpectrumFile);
    }

    std::vector<ManifestEntry> entries;
    nlohmann::json manifest;
    manifest["schema"] = "burstlab-manifest/1";
    manifest["files"] = nlohmann::json::array();
    for (const auto& f : files) {
        ManifestEntry e{f, sha256_file(dir / f), std::filesystem::file_size(dir / f)};
        manifest["files"].push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
        entries.push_back(std::move(e));
    }
    write_text(dir / kManifestFile, manifest.dump(2) + "\n");
    return entries;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& dir) {
    std::ifstream in(dir / kManifestFile);
    if (!in) throw IoError("cannot read " + (dir / kManifestFile).string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
    }
    std::vector<ManifestEntry> out;
    for (const auto& f : j.at("files")) {
        out.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(),
                       f.at("bytes").get<std::uintmax_t>()});
    }
    return out;
}

std::filesystem::path emit_plot_script(const Report& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    std::ostringstream gp;
    gp << "# gnuplot script; run inside this directory: gnuplot " << kPlotScriptFile << "\n";
    gp << "set datafile separator ','\n";
    gp << "set logscale xy\n";
    gp << "set format xy '10^{%L}'\n";
    gp << "set terminal svg size 900,650 enhanced\n\n";

    gp << "set output 'durations.svg'\n";
    gp << "set xlabel 'duration T (s)'\nset ylabel 'p(T)'\n";
    gp << "ref_slope = -1.5\n";
    // Guide line anchored at the first available histogram fit.
    double anchor = 0.0;
    for (const auto& t : report.thresholds) {
        if (t.histogram_fit) {
            anchor = t.histogram_fit->intercept;
            break;
        }
    }
    gp << "ref(x) = 10**(" << format_number(anchor) << ") * x**ref_slope\n";
    std::vector<std::string> plots;
    for (std::size_t i = 0; i < report.thresholds.size(); ++i) {
        const auto& t = report.thresholds[i];
        if (!t.histogram) continue;
        plots.push_back("'" + histogram_file_name(t, i) + "' skip 1 using (sqrt($1*$2)):($4 > 0 ? $4 : 1/0) with points title '" +
                        to_string(t.kind) + " h=" + format_number(t.h) + "'");
    }
    plots.emplace_back("ref(x) with lines dashtype 2 lc 'black' title 'slope -3/2'");
    gp << "plot ";
    for (std::size_t i = 0; i < plots.size(); ++i) gp << (i ? ", \\\n     " : "") << plots[i];
    gp << "\n\n";

    if (report.psd.binned) {
        gp << "set output 'spectrum.svg'\n";
        gp << "set xlabel 'f (Hz)'\nset ylabel 'S(f)'\n";
        std::vector<std::string> spec = {"'" + std::string(kBinnedSpectrumFile) +
                                         "' skip 1 using 1:2 with points title 'PSD'"};
        if (report.psd.two_regime) {
            const auto& t = *report.psd.two_regime;
            gp << "f_break = " << format_number(t.f_break) << "\n";
            gp << "low(x) = x < f_break ? 10**(" << format_number(t.low.intercept) << ") * x**(-"
               << format_number(t.low.exponent) << ") : 1/0\n";
            gp << "high(x) = x >= f_break ? 10**(" << format_number(t.high.intercept) << ") * x**(-"
               << format_number(t.high.exponent) << ") : 1/0\n";
            gp << "set arrow from f_break, graph 0 to f_break, graph 1 nohead dashtype 3\n";
            gp << "set label sprintf('f_{break} = %.3g Hz', f_break) at f_break, graph 0.92 offset 1,0\n";
            spec.push_back("low(x) with lines lw 2 title sprintf('beta_1 = %.2f', " + format_number(t.low.exponent) + ")");
            spec.push_back("high(x) with lines lw 2 title sprintf('beta_2 = %.2f', " + format_number(t.high.exponent) +
                           ")");
        } else if (report.psd.single) {
            const auto& s = *report.psd.single;
            gp << "single(x) = 10**(" << format_number(s.intercept) << ") * x**(-" << format_number(s.exponent) << ")\n";
            spec.push_back("single(x) with lines lw 2 title sprintf('beta = %.2f', " + format_number(s.exponent) + ")");
        }
        gp << "plot ";
        for (std::size_t i = 0; i < spec.size(); ++i) gp << (i ? ", \\\n     " : "") << spec[i];
        gp << "\n";
    }

    const auto path = dir / kPlotScriptFile;
    write_text(path, gp.str());
    return path;
}

}  // namespace burstlab
