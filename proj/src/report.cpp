#include "burstlab/report.hpp"

#include <json.hpp>

#include "burstlab/error.hpp"

namespace burstlab {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const PowerLawFit& f) {
    return {{"exponent", f.exponent},
            {"intercept", f.intercept},
            {"lo", f.lo},
            {"hi", f.hi},
            {"std_error", f.std_error},
            {"r2", f.r2},
            {"n", f.n},
            {"method", f.method == FitMethod::least_squares ? "least_squares" : "maximum_likelihood"}};
}

json to_json(const std::optional<PowerLawFit>& f) { return f ? to_json(*f) : json(nullptr); }

json to_json(const LogHistogram& h) { return {{"edges", h.edges}, {"counts", h.counts}, {"density", h.density}}; }

json to_json(const SpectrumEstimate& s) {
    return {{"frequencies", s.frequencies},
            {"power", s.power},
            {"segments_used", s.segments_used},
            {"log_binned", s.log_binned}};
}

json to_json(const TwoRegimeFit& t) {
    return {{"low", to_json(t.low)},
            {"high", to_json(t.high)},
            {"single", to_json(t.single)},
            {"f_break", t.f_break},
            {"rss_two", t.rss_two},
            {"rss_single", t.rss_single},
            {"break_p_value", t.break_p_value},
            {"break_reliable", t.break_reliable}};
}

std::optional<double> opt_double(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

PowerLawFit fit_from(const json& j) {
    PowerLawFit f;
    f.exponent = j.at("exponent").get<double>();
    f.intercept = j.at("intercept").get<double>();
    f.lo = j.at("lo").get<double>();
    f.hi = j.at("hi").get<double>();
    f.std_error = j.at("std_error").get<double>();
    f.r2 = j.at("r2").get<double>();
    f.n = j.at("n").get<std::size_t>();
    f.method = j.at("method").get<std::string>() == "least_squares" ? FitMethod::least_squares
                                                                     : FitMethod::maximum_likelihood;
    return f;
}

std::optional<PowerLawFit> opt_fit_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return fit_from(j);
}

LogHistogram histogram_from(const json& j) {
    LogHistogram h;
    h.edges = j.at("edges").get<std::vector<double>>();
    h.counts = j.at("counts").get<std::vector<std::size_t>>();
    h.density = j.at("density").get<std::vector<double>>();
    return h;
}

SpectrumEstimate spectrum_from(const json& j) {
    SpectrumEstimate s;
    s.frequencies = j.at("frequencies").get<std::vector<double>>();
    s.power = j.at("power").get<std::vector<double>>();
    s.segments_used = j.at("segments_used").get<std::size_t>();
    s.log_binned = j.at("log_binned").get<bool>();
    return s;
}

TwoRegimeFit two_regime_from(const json& j) {
    TwoRegimeFit t;
    t.low = fit_from(j.at("low"));
    t.high = fit_from(j.at("high"));
    t.single = fit_from(j.at("single"));
    t.f_break = j.at("f_break").get<double>();
    t.rss_two = j.at("rss_two").get<double>();
    t.rss_single = j.at("rss_single").get<double>();
    t.break_p_value = j.at("break_p_value").get<double>();
    t.break_reliable = j.at("break_reliable").get<bool>();
    return t;
}

// Minimal structural schema checker collecting every problem it finds.
class SchemaCheck {
public:
    enum class Kind { string, number, unsigned_integer, boolean, object, array };

    void field(const json& parent, const std::string& path, const std::string& key, Kind kind, bool nullable = false) {
        if (!parent.is_object()) return;
        const auto it = parent.find(key);
        if (it == parent.end()) {
            problems_.push_back(path + "." + key + ": missing");
            return;
        }
        if (nullable && it->is_null()) return;
        if (!matches(*it, kind)) problems_.push_back(path + "." + key + ": expected " + name(kind));
    }

    void object(const json& j, const std::string& path) {
        if (!j.is_object()) problems_.push_back(path + ": expected object");
    }

    void add(std::string problem) { problems_.push_back(std::move(problem)); }

    void fit(const json& parent, const std::string& path, const std::string& key, bool nullable) {
        field(parent, path, key, Kind::object, nullable);
        if (!parent.is_object() || !parent.contains(key) || !parent.at(key).is_object()) return;
        const auto& f = parent.at(key);
        const auto p = path + "." + key;
        for (const char* k : {"exponent", "intercept", "lo", "hi", "std_error", "r2"}) field(f, p, k, Kind::number);
        field(f, p, "n", Kind::unsigned_integer);
        field(f, p, "method", Kind::string);
    }

    void finish() const {
        if (problems_.empty()) return;
        std::string msg = "report does not match " + std::string(kReportSchema) + ":";
        for (const auto& p : problems_) msg += "\n  " + p;
        throw ValidationError(msg);
    }

private:
    static bool matches(const json& j, Kind kind) {
        switch (kind) {
            case Kind::string: return j.is_string();
            case Kind::number: return j.is_number();
            case Kind::unsigned_integer: return j.is_number_unsigned();
            case Kind::boolean: return j.is_boolean();
            case Kind::object: return j.is_object();
            case Kind::array: return j.is_array();
        }
        return false;
    }

    static const char* name(Kind kind) {
        switch (kind) {
            case Kind::string: return "string";
            case Kind::number: return "number";
            case Kind::unsigned_integer: return "unsigned integer";
            case Kind::boolean: return "boolean";
            case Kind::object: return "object";
            case Kind::array: return "array";
        }
        return "?";
    }

    std::vector<std::string> problems_;
};

void check_schema(const json& j) {
    using K = SchemaCheck::Kind;
    SchemaCheck c;
    c.object(j, "report");
    c.finish();

    c.field(j, "report", "schema", K::string);
    if (j.contains("schema") && j["schema"].is_string() && j["schema"] != kReportSchema) {
        c.add("report.schema: expected '" + std::string(kReportSchema) + "'");
    }
    c.field(j, "report", "provenance", K::object);
    if (j.contains("provenance")) {
        const auto& p = j["provenance"];
        c.field(p, "provenance", "config", K::object);
        c.field(p, "provenance", "seed", K::unsigned_integer);
        c.field(p, "provenance", "seed_generated", K::boolean);
        c.field(p, "provenance", "build_id", K::string);
    }
    c.field(j, "report", "source", K::string);
    c.field(j, "report", "stages", K::array);
    c.field(j, "report", "anscombe_clamped", K::unsigned_integer);
    c.field(j, "report", "series", K::array);
    if (j.contains("series") && j["series"].is_array()) {
        for (std::size_t i = 0; i < j["series"].size(); ++i) {
            const auto& s = j["series"][i];
            const auto p = "series[" + std::to_string(i) + "]";
            c.field(s, p, "label", K::string);
            c.field(s, p, "t0", K::number);
            c.field(s, p, "dt", K::number);
            c.field(s, p, "samples", K::unsigned_integer);
            c.field(s, p, "scale", K::number);
        }
    }
    c.field(j, "report", "thresholds", K::array);
    if (j.contains("thresholds") && j["thresholds"].is_array()) {
        for (std::size_t i = 0; i < j["thresholds"].size(); ++i) {
            const auto& t = j["thresholds"][i];
            const auto p = "thresholds[" + std::to_string(i) + "]";
            c.field(t, p, "h", K::number);
            c.field(t, p, "kind", K::string);
            for (const char* k : {"count", "bursts", "interbursts", "edge_censored"}) c.field(t, p, k, K::unsigned_integer);
            c.field(t, p, "censored_time", K::number);
            c.field(t, p, "span", K::number);
            c.field(t, p, "histogram", K::object, true);
            c.fit(t, p, "histogram_fit", true);
            c.fit(t, p, "mle_fit", true);
            c.field(t, p, "notes", K::array);
        }
    }
    c.field(j, "report", "psd", K::object);
    if (j.contains("psd") && j["psd"].is_object()) {
        const auto& p = j["psd"];
        c.field(p, "psd", "segment_len", K::unsigned_integer);
        c.field(p, "psd", "segments", K::unsigned_integer);
        c.field(p, "psd", "binned", K::object, true);
        c.fit(p, "psd", "single", true);
        c.field(p, "psd", "two_regime", K::object, true);
        if (p.contains("two_regime") && p["two_regime"].is_object()) {
            const auto& t = p["two_regime"];
            for (const char* k : {"low", "high", "single"}) c.fit(t, "psd.two_regime", k, false);
            for (const char* k : {"f_break", "rss_two", "rss_single", "break_p_value"}) {
                c.field(t, "psd.two_regime", k, K::number);
            }
            c.field(t, "psd.two_regime", "break_reliable", K::boolean);
        }
        c.field(p, "psd", "beta_source", K::string);
        for (const char* k : {"beta", "beta_std_error", "hurst"}) c.field(p, "psd", k, K::number, true);
        c.field(p, "psd", "hurst_in_unit_interval", K::boolean);
        c.field(p, "psd", "notes", K::array);
    }
    c.field(j, "report", "verdict", K::object);
    if (j.contains("verdict") && j["verdict"].is_object()) {
        const auto& v = j["verdict"];
        c.field(v, "verdict", "label", K::string);
        if (v.contains("label") && v["label"].is_string()) {
            const auto label = v["label"].get<std::string>();
            if (label != "consistent-with-3/2" && label != "inconsistent-with-3/2" && label != "indeterminate") {
                c.add("verdict.label: unknown label '" + label + "'");
            }
        }
        c.field(v, "verdict", "fits_used", K::unsigned_integer);
        for (const char* k : {"exponent", "exponent_std_error", "markov_distance", "fbm_exponent", "fbm_joint_std_error",
                              "fbm_distance"}) {
            c.field(v, "verdict", k, K::number, true);
        }
        c.field(v, "verdict", "markov_consistent", K::boolean);
        c.field(v, "verdict", "fbm_consistent", K::boolean);
    }
    c.finish();
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("report is not valid JSON: ") + e.what());
    }
}

}  // namespace

std::string report_to_json(const Report& r) {
    json j;
    j["schema"] = r.schema;
    j["provenance"] = {{"config", r.provenance.config},
                       {"seed", r.provenance.seed},
                       {"seed_generated", r.provenance.seed_generated},
                       {"build_id", r.provenance.build_id}};
    j["source"] = r.source;
    j["stages"] = r.stages;
    j["anscombe_clamped"] = r.anscombe_clamped;
    j["series"] = json::array();
    for (const auto& s : r.series) {
        j["series"].push_back({{"label", s.label}, {"t0", s.t0}, {"dt", s.dt}, {"samples", s.samples}, {"scale", s.scale}});
    }
    j["thresholds"] = json::array();
    for (const auto& t : r.thresholds) {
        j["thresholds"].push_back({{"h", t.h},
                                   {"kind", to_string(t.kind)},
                                   {"count", t.count},
                                   {"bursts", t.bursts},
                                   {"interbursts", t.interbursts},
                                   {"edge_censored", t.edge_censored},
                                   {"censored_time", t.censored_time},
                                   {"span", t.span},
                                   {"histogram", t.histogram ? to_json(*t.histogram) : json(nullptr)},
                                   {"histogram_fit", to_json(t.histogram_fit)},
                                   {"mle_fit", to_json(t.mle_fit)},
                                   {"notes", t.notes}});
    }
    const auto& p = r.psd;
    j["psd"] = {{"segment_len", p.segment_len},
                {"segments", p.segments},
                {"binned", p.binned ? to_json(*p.binned) : json(nullptr)},
                {"single", to_json(p.single)},
                {"two_regime", p.two_regime ? to_json(*p.two_regime) : json(nullptr)},
                {"beta_source", p.beta_source},
                {"beta", opt(p.beta)},
                {"beta_std_error", opt(p.beta_std_error)},
                {"hurst", opt(p.hurst)},
                {"hurst_in_unit_interval", p.hurst_in_unit_interval},
                {"notes", p.notes}};
    const auto& v = r.verdict;
    j["verdict"] = {{"label", v.label},
                    {"fits_used", v.fits_used},
                    {"exponent", opt(v.exponent)},
                    {"exponent_std_error", opt(v.exponent_std_error)},
                    {"markov_distance", opt(v.markov_distance)},
                    {"fbm_exponent", opt(v.fbm_exponent)},
                    {"fbm_joint_std_error", opt(v.fbm_joint_std_error)},
                    {"fbm_distance", opt(v.fbm_distance)},
                    {"markov_consistent", v.markov_consistent},
                    {"fbm_consistent", v.fbm_consistent}};
    return j.dump(2) + "\n";
}

void validate_report_json(const std::string& text) { check_schema(parse(text)); }

Report report_from_json(const std::string& text) {
    const auto j = parse(text);
    check_schema(j);
    Report r;
    r.schema = j["schema"].get<std::string>();
    const auto& p = j["provenance"];
    r.provenance.config = p["config"].get<std::map<std::string, std::string>>();
    r.provenance.seed = p["seed"].get<std::uint64_t>();
    r.provenance.seed_generated = p["seed_generated"].get<bool>();
    r.provenance.build_id = p["build_id"].get<std::string>();
    r.source = j["source"].get<std::string>();
    r.stages = j["stages"].get<std::vector<std::string>>();
    r.anscombe_clamped = j["anscombe_clamped"].get<std::size_t>();
    for (const auto& s : j["series"]) {
        r.series.push_back({s["label"].get<std::string>(), s["t0"].get<double>(), s["dt"].get<double>(),
                            s["samples"].get<std::size_t>(), s["scale"].get<double>()});
    }
    for (const auto& t : j["thresholds"]) {
        ThresholdResult tr;
        tr.h = t["h"].get<double>();
        tr.kind = episode_kind_from_string(t["kind"].get<std::string>());
        tr.count = t["count"].get<std::size_t>();
        tr.bursts = t["bursts"].get<std::size_t>();
        tr.interbursts = t["interbursts"].get<std::size_t>();
        tr.edge_censored = t["edge_censored"].get<std::size_t>();
        tr.censored_time = t["censored_time"].get<double>();
        tr.span = t["span"].get<double>();
        if (!t["histogram"].is_null()) tr.histogram = histogram_from(t["histogram"]);
        tr.histogram_fit = opt_fit_from(t["histogram_fit"]);
        tr.mle_fit = opt_fit_from(t["mle_fit"]);
        tr.notes = t["notes"].get<std::vector<std::string>>();
        r.thresholds.push_back(std::move(tr));
    }
    const auto& ps = j["psd"];
    r.psd.segment_len = ps["segment_len"].get<std::size_t>();
    r.psd.segments = ps["segments"].get<std::size_t>();
    if (!ps["binned"].is_null()) r.psd.binned = spectrum_from(ps["binned"]);
    r.psd.single = opt_fit_from(ps["single"]);
    if (!ps["two_regime"].is_null()) r.psd.two_regime = two_regime_from(ps["two_regime"]);
    r.psd.beta_source = ps["beta_source"].get<std::string>();
    r.psd.beta = opt_double(ps["beta"]);
    r.psd.beta_std_error = opt_double(ps["beta_std_error"]);
    r.psd.hurst = opt_double(ps["hurst"]);
    r.psd.hurst_in_unit_interval = ps["hurst_in_unit_interval"].get<bool>();
    r.psd.notes = ps["notes"].get<std::vector<std::string>>();
    const auto& v = j["verdict"];
    r.verdict.label = v["label"].get<std::string>();
    r.verdict.fits_used = v["fits_used"].get<std::size_t>();
    r.verdict.exponent = opt_double(v["exponent"]);
    r.verdict.exponent_std_error = opt_double(v["exponent_std_error"]);
    r.verdict.markov_distance = opt_double(v["markov_distance"]);
    r.verdict.fbm_exponent = opt_double(v["fbm_exponent"]);
    r.verdict.fbm_joint_std_error = opt_double(v["fbm_joint_std_error"]);
    r.verdict.fbm_distance = opt_double(v["fbm_distance"]);
    r.verdict.markov_consistent = v["markov_consistent"].get<bool>();
    r.verdict.fbm_consistent = v["fbm_consistent"].get<bool>();
    return r;
}

}  // namespace burstlab
