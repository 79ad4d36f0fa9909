#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "behavior.hpp"
#include "causal_graph.hpp"
#include "error.hpp"
#include "event_log.hpp"
#include "granger.hpp"
#include "lag_selector.hpp"
#include "stationarity.hpp"
#include "synth.hpp"
#include "timeseries.hpp"

namespace actorgc {

inline constexpr const char* kVersion = "0.1.0";

struct KpiSpec {
    enum class Kind { throughput, outcome };
    std::string name;
    Kind kind = Kind::throughput;
    std::optional<OutcomeRule> rule;
};

struct GranularitySpec {
    bool global = true;
    bool per_actor = false;
    bool per_activity = false;
    std::size_t top_k = 10;
};

struct PipelineConfig {
    enum class Source { csv, xes, synth };
    Source source = Source::csv;
    std::string input_path;
    CsvOptions csv;
    SynthLogConfig synth;
    std::vector<KpiSpec> kpis;
    CompletionRule completion;
    GranularitySpec granularity;
    LassoConfig lasso;
    int adf_max_lag = -1;
    double max_kpi_fill_fraction = 0.5;
    double alpha = 0.05;
    std::size_t top_edges = 10;
    std::filesystem::path output_dir = "actorgc_out";
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    // The parsed document, used for the manifest's config hash.
    nlohmann::json document;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

inline OutcomeRule parse_rule(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object() || j.size() != 1) {
        throw ConfigError(where + ": rule must have exactly one of keyword, last_event_prefix, attribute");
    }
    const auto& [kind, body] = *j.items().begin();
    if (kind == "keyword") {
        reject_unknown_keys(body, {"keywords"}, where + ".keyword");
        return KeywordRule{get_or<std::vector<std::string>>(body, "keywords", {}, where)};
    }
    if (kind == "last_event_prefix") {
        reject_unknown_keys(body, {"prefix", "positive"}, where + ".last_event_prefix");
        LastEventRule r{get_or<std::string>(body, "prefix", "", where), get_or<std::vector<std::string>>(body, "positive", {}, where)};
        if (r.prefix.empty() || r.positive_labels.empty()) throw ConfigError(where + ": last_event_prefix needs prefix and positive labels");
        return r;
    }
    if (kind == "attribute") {
        reject_unknown_keys(body, {"name", "true_values"}, where + ".attribute");
        AttributeRule r;
        r.attribute = get_or<std::string>(body, "name", "", where);
        r.true_values = get_or<std::vector<std::string>>(body, "true_values", r.true_values, where);
        if (r.attribute.empty()) throw ConfigError(where + ": attribute rule needs a name");
        return r;
    }
    throw ConfigError(where + ": unknown rule kind '" + kind + "'");
}

} // namespace detail

/// Validates and reads a pipeline config document. Paths are resolved
/// relative to `base_dir`.
inline PipelineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {}) {
    using detail::get_or;
    using detail::reject_unknown_keys;
    PipelineConfig cfg;
    cfg.document = doc;
    reject_unknown_keys(doc, {"input", "synth", "kpis", "completion", "granularity", "lasso", "adf_max_lag",
                              "max_kpi_fill_fraction", "alpha", "top_edges", "output_dir", "seed", "workers"},
                        "config");
    if (!doc.contains("input")) throw ConfigError("config: missing 'input'");
    const auto& in = doc.at("input");
    reject_unknown_keys(in, {"format", "path", "delimiter", "timestamp_format", "columns"}, "input");
    const auto format = get_or<std::string>(in, "format", "csv", "input");
    if (format == "csv") cfg.source = PipelineConfig::Source::csv;
    else if (format == "xes") cfg.source = PipelineConfig::Source::xes;
    else if (format == "synth") cfg.source = PipelineConfig::Source::synth;
    else throw ConfigError("input.format: expected csv, xes or synth");
    if (cfg.source != PipelineConfig::Source::synth) {
        const auto path = get_or<std::string>(in, "path", "", "input");
        if (path.empty()) throw ConfigError("input.path is required for csv/xes input");
        cfg.input_path = (base_dir / path).string();
    }
    const auto delim = get_or<std::string>(in, "delimiter", ",", "input");
    if (delim.size() != 1) throw ConfigError("input.delimiter must be a single character");
    cfg.csv.delimiter = delim[0];
    cfg.csv.timestamp_format = get_or<std::string>(in, "timestamp_format", "", "input");
    if (in.contains("columns")) {
        const auto& c = in.at("columns");
        reject_unknown_keys(c, {"case", "activity", "timestamp", "actor"}, "input.columns");
        cfg.csv.mapping.case_column = get_or<std::string>(c, "case", cfg.csv.mapping.case_column, "input.columns");
        cfg.csv.mapping.activity_column = get_or<std::string>(c, "activity", cfg.csv.mapping.activity_column, "input.columns");
        cfg.csv.mapping.timestamp_column = get_or<std::string>(c, "timestamp", cfg.csv.mapping.timestamp_column, "input.columns");
        cfg.csv.mapping.actor_column = get_or<std::string>(c, "actor", cfg.csv.mapping.actor_column, "input.columns");
    }

    cfg.seed = get_or<std::uint64_t>(doc, "seed", 0, "config");
    if (doc.contains("synth")) {
        const auto& s = doc.at("synth");
        reject_unknown_keys(s, {"n_cases", "n_actors", "n_activities", "days", "handover_rate", "interruption_rate", "planted",
                                "mean_case_length", "mean_gap_days"},
                            "synth");
        auto& sc = cfg.synth;
        sc.n_cases = get_or<std::size_t>(s, "n_cases", sc.n_cases, "synth");
        sc.n_actors = get_or<std::size_t>(s, "n_actors", sc.n_actors, "synth");
        sc.n_activities = get_or<std::size_t>(s, "n_activities", sc.n_activities, "synth");
        sc.days = get_or<int>(s, "days", sc.days, "synth");
        sc.handover_rate = get_or<double>(s, "handover_rate", sc.handover_rate, "synth");
        sc.interruption_rate = get_or<double>(s, "interruption_rate", sc.interruption_rate, "synth");
        sc.mean_case_length = get_or<double>(s, "mean_case_length", sc.mean_case_length, "synth");
        sc.mean_gap_days = get_or<double>(s, "mean_gap_days", sc.mean_gap_days, "synth");
        if (s.contains("planted") && !s.at("planted").is_null()) {
            const auto& p = s.at("planted");
            reject_unknown_keys(p, {"behavior", "lag", "effect_days"}, "synth.planted");
            PlantedEffect pe;
            const auto code = get_or<std::string>(p, "behavior", "HB", "synth.planted");
            const auto b = behavior_from_code(code);
            if (!b) throw ConfigError("synth.planted.behavior: expected C, I, HI or HB");
            pe.behavior = *b;
            pe.lag = get_or<int>(p, "lag", pe.lag, "synth.planted");
            pe.effect_days = get_or<double>(p, "effect_days", pe.effect_days, "synth.planted");
            sc.planted = pe;
        }
    }
    cfg.synth.seed = cfg.seed;
    if (cfg.source == PipelineConfig::Source::synth) cfg.synth.validate();

    if (!doc.contains("kpis") || !doc.at("kpis").is_array() || doc.at("kpis").empty()) {
        throw ConfigError("config: 'kpis' must list at least one KPI");
    }
    std::set<std::string> kpi_names;
    for (const auto& k : doc.at("kpis")) {
        reject_unknown_keys(k, {"name", "type", "rule"}, "kpis[]");
        KpiSpec spec;
        spec.name = get_or<std::string>(k, "name", "", "kpis[]");
        if (spec.name.empty()) throw ConfigError("kpis[]: name is required");
        if (!kpi_names.insert(spec.name).second) throw ConfigError("kpis: duplicate name '" + spec.name + "'");
        const auto type = get_or<std::string>(k, "type", "", "kpis[" + spec.name + "]");
        if (type == "throughput") {
            spec.kind = KpiSpec::Kind::throughput;
            if (k.contains("rule")) throw ConfigError("kpis[" + spec.name + "]: throughput KPIs take no rule");
        } else if (type == "outcome") {
            spec.kind = KpiSpec::Kind::outcome;
            if (!k.contains("rule")) throw ConfigError("kpis[" + spec.name + "]: outcome KPI is missing its rule");
            spec.rule = detail::parse_rule(k.at("rule"), "kpis[" + spec.name + "].rule");
        } else {
            throw ConfigError("kpis[" + spec.name + "]: type must be throughput or outcome");
        }
        cfg.kpis.push_back(std::move(spec));
    }

    if (doc.contains("completion")) {
        const auto& c = doc.at("completion");
        reject_unknown_keys(c, {"all", "min_trailing_days", "end_activities"}, "completion");
        if (c.size() != 1) throw ConfigError("completion: give exactly one of all, min_trailing_days, end_activities");
        if (c.contains("all")) cfg.completion = CompletionRule::all();
        else if (c.contains("min_trailing_days")) cfg.completion = CompletionRule::trailing_gap(get_or<double>(c, "min_trailing_days", 1.0, "completion"));
        else cfg.completion = CompletionRule::ending_with(get_or<std::vector<std::string>>(c, "end_activities", {}, "completion"));
    }
    if (doc.contains("granularity")) {
        const auto& g = doc.at("granularity");
        reject_unknown_keys(g, {"global", "per_actor", "per_activity", "top_k"}, "granularity");
        cfg.granularity.global = get_or<bool>(g, "global", true, "granularity");
        cfg.granularity.per_actor = get_or<bool>(g, "per_actor", false, "granularity");
        cfg.granularity.per_activity = get_or<bool>(g, "per_activity", false, "granularity");
        cfg.granularity.top_k = get_or<std::size_t>(g, "top_k", 10, "granularity");
        if (!cfg.granularity.global && !cfg.granularity.per_actor && !cfg.granularity.per_activity) {
            throw ConfigError("granularity: enable at least one of global, per_actor, per_activity");
        }
    }
    if (doc.contains("lasso")) {
        const auto& l = doc.at("lasso");
        reject_unknown_keys(l, {"max_lag", "lambda_group", "lambda_l1", "tolerance", "max_iterations", "active_threshold", "top_lags"}, "lasso");
        auto& lc = cfg.lasso;
        lc.max_lag = get_or<int>(l, "max_lag", lc.max_lag, "lasso");
        lc.lambda_group_grid = get_or<std::vector<double>>(l, "lambda_group", lc.lambda_group_grid, "lasso");
        lc.lambda_l1_grid = get_or<std::vector<double>>(l, "lambda_l1", lc.lambda_l1_grid, "lasso");
        lc.tolerance = get_or<double>(l, "tolerance", lc.tolerance, "lasso");
        lc.max_iterations = get_or<int>(l, "max_iterations", lc.max_iterations, "lasso");
        lc.active_threshold = get_or<double>(l, "active_threshold", lc.active_threshold, "lasso");
        lc.top_lags = get_or<std::size_t>(l, "top_lags", lc.top_lags, "lasso");
    }
    cfg.lasso.validate();
    cfg.adf_max_lag = get_or<int>(doc, "adf_max_lag", -1, "config");
    cfg.max_kpi_fill_fraction = get_or<double>(doc, "max_kpi_fill_fraction", 0.5, "config");
    cfg.alpha = get_or<double>(doc, "alpha", 0.05, "config");
    if (cfg.alpha != 0.01 && cfg.alpha != 0.05 && cfg.alpha != 0.10) throw ConfigError("alpha must be 0.01, 0.05 or 0.10");
    cfg.top_edges = get_or<std::size_t>(doc, "top_edges", 10, "config");
    if (cfg.top_edges < 1) throw ConfigError("top_edges must be >= 1");
    cfg.output_dir = base_dir / get_or<std::string>(doc, "output_dir", "actorgc_out", "config");
    cfg.workers = get_or<std::size_t>(doc, "workers", 0, "config");
    return cfg;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc, path.parent_path());
}

/// 64-bit FNV-1a, used for stable content hashes in the run manifest.
inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Artifact file names inside the output directory.
namespace artifact {
inline constexpr const char* events = "events.csv";
inline constexpr const char* log_summary = "log_summary.json";
inline constexpr const char* transitions = "transitions.csv";
inline constexpr const char* panel = "panel.csv";
inline constexpr const char* masks = "masks.json";
inline constexpr const char* stationarity = "stationarity.json";
inline constexpr const char* stationary_panel = "stationary_panel.csv";
inline constexpr const char* stationary_masks = "stationary_masks.json";
inline constexpr const char* lag_frequency = "lag_frequency.csv";
inline constexpr const char* lag_selection = "lag_selection.json";
inline constexpr const char* granger_csv = "granger_results.csv";
inline constexpr const char* granger_json = "granger_results.json";
inline constexpr const char* graph_dot = "graph.dot";
inline constexpr const char* graph_json = "graph.json";
inline constexpr const char* manifest = "manifest.json";
} // namespace artifact

/// Rethrows any library error with the stage name prefixed, keeping its kind.
template <class Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string("stage ") + stage + ": " + e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        throw Error(ErrorKind::config, std::string("stage ") + stage + ": " + e.what());
    }
}

namespace detail {

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("missing artifact '" + p.string() + "'; run the preceding stage first");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    out << content;
}

inline nlohmann::json read_json(const std::filesystem::path& p) {
    try {
        return nlohmann::json::parse(read_file(p));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("artifact '" + p.string() + "' is not valid JSON: " + e.what());
    }
}

template <class Writer>
std::string render(Writer&& w) {
    std::ostringstream out;
    w(out);
    return out.str();
}

} // namespace detail

/// Stage functions. Each `*_stage` writes its artifacts into cfg.output_dir
/// and returns the in-memory result; the `load_*` helpers read the artifacts
/// a downstream stage needs, so stages can be re-run independently.
namespace stages {

inline EventLog ingest(const PipelineConfig& cfg) {
    return run_stage("ingest", [&] {
        EventLog log;
        switch (cfg.source) {
            case PipelineConfig::Source::csv: log = load_log(cfg.input_path, LogFormat::csv, cfg.csv); break;
            case PipelineConfig::Source::xes: log = load_log(cfg.input_path, LogFormat::xes); break;
            case PipelineConfig::Source::synth: log = generate_log(cfg.synth); break;
        }
        log = validate_and_sort(std::move(log));
        for (std::size_t i = 0; i < log.events.size(); ++i) log.events[i].sequence_index = i;
        const auto s = summarize(log);
        if (s.missing_actor > 0) warn("ingest: " + std::to_string(s.missing_actor) + " event(s) without an actor");
        detail::write_file(cfg.output_dir / artifact::events, detail::render([&](std::ostream& o) { write_csv(o, log); }));
        const nlohmann::json summary{{"events", s.events},       {"cases", s.cases},
                                     {"actors", s.actors},       {"activities", s.activities},
                                     {"missing_actor", s.missing_actor},
                                     {"synthesized_case_ids", log.synthesized_case_ids},
                                     {"first", s.first ? format_timestamp(*s.first) : ""},
                                     {"last", s.last ? format_timestamp(*s.last) : ""}};
        detail::write_file(cfg.output_dir / artifact::log_summary, summary.dump(2) + "\n");
        return log;
    });
}

inline EventLog load_events(const PipelineConfig& cfg) {
    std::istringstream in(detail::read_file(cfg.output_dir / artifact::events));
    return parse_csv(in, {});
}

inline Classification classify(const PipelineConfig& cfg, const EventLog& log) {
    return run_stage("classify", [&] {
        auto result = classify_log(log, cfg.workers);
        if (result.skipped_pairs > 0) warn("classify: " + std::to_string(result.skipped_pairs) + " pair(s) skipped (missing actor)");
        detail::write_file(cfg.output_dir / artifact::transitions,
                           detail::render([&](std::ostream& o) { write_transitions_csv(o, result.transitions); }));
        return result;
    });
}

inline std::vector<Transition> load_transitions(const PipelineConfig& cfg) {
    std::istringstream in(detail::read_file(cfg.output_dir / artifact::transitions));
    return read_transitions_csv(in);
}

inline std::vector<std::string> kpi_names(const PipelineConfig& cfg) {
    std::vector<std::string> out;
    for (const auto& k : cfg.kpis) out.push_back(k.name);
    return out;
}

inline Panel series(const PipelineConfig& cfg, const EventLog& log, const std::vector<Transition>& transitions) {
    return run_stage("series", [&] {
        std::vector<DailySeries> all;
        auto add = [&](std::vector<DailySeries> s) { all.insert(all.end(), s.begin(), s.end()); };
        if (transitions.empty()) throw InsufficientDataError("no classified transitions");
        if (cfg.granularity.global) add(behavior_series(transitions, Granularity::global));
        if (cfg.granularity.per_actor) add(behavior_series(transitions, Granularity::per_actor, cfg.granularity.top_k));
        if (cfg.granularity.per_activity) add(behavior_series(transitions, Granularity::per_activity, cfg.granularity.top_k));
        for (const auto& k : cfg.kpis) {
            if (k.kind == KpiSpec::Kind::throughput) {
                auto tt = throughput_series(log, cfg.completion);
                tt.name = k.name;
                all.push_back(std::move(tt));
            } else {
                all.push_back(outcome_series(log, *k.rule, k.name, cfg.completion));
            }
        }
        auto panel = align(all, cfg.max_kpi_fill_fraction);
        detail::write_file(cfg.output_dir / artifact::panel, detail::render([&](std::ostream& o) { write_panel_csv(o, panel); }));
        detail::write_file(cfg.output_dir / artifact::masks, panel_sidecar(panel).dump(2) + "\n");
        return panel;
    });
}

inline Panel load_panel(const PipelineConfig& cfg, const char* values, const char* masks) {
    std::istringstream in(detail::read_file(cfg.output_dir / values));
    return read_panel(in, detail::read_json(cfg.output_dir / masks));
}

inline std::pair<Panel, StationarityReport> adf(const PipelineConfig& cfg, const Panel& panel) {
    return run_stage("adf", [&] {
        auto result = ensure_stationary(panel, cfg.alpha, cfg.adf_max_lag, cfg.workers);
        detail::write_file(cfg.output_dir / artifact::stationarity, stationarity_json(result.second).dump(2) + "\n");
        detail::write_file(cfg.output_dir / artifact::stationary_panel,
                           detail::render([&](std::ostream& o) { write_panel_csv(o, result.first); }));
        detail::write_file(cfg.output_dir / artifact::stationary_masks, panel_sidecar(result.first).dump(2) + "\n");
        return result;
    });
}

inline LagSelection select_lags(const PipelineConfig& cfg, const Panel& stationary) {
    return run_stage("select-lags", [&] {
        auto sel = lag_frequency(stationary, kpi_names(cfg), cfg.lasso, cfg.workers);
        detail::write_file(cfg.output_dir / artifact::lag_frequency,
                           detail::render([&](std::ostream& o) { write_lag_frequency_csv(o, sel); }));
        detail::write_file(cfg.output_dir / artifact::lag_selection, lag_selection_json(sel).dump(2) + "\n");
        return sel;
    });
}

inline LagSelection load_lag_selection(const PipelineConfig& cfg) {
    return lag_selection_from_json(detail::read_json(cfg.output_dir / artifact::lag_selection));
}

inline std::vector<GrangerResult> granger(const PipelineConfig& cfg, const Panel& stationary, const LagSelection& lags) {
    return run_stage("granger", [&] {
        auto results = test_all_pairs(stationary, lags.selected, cfg.alpha, cfg.workers);
        detail::write_file(cfg.output_dir / artifact::granger_csv,
                           detail::render([&](std::ostream& o) { write_granger_csv(o, results); }));
        detail::write_file(cfg.output_dir / artifact::granger_json, granger_json(results, cfg.alpha).dump(2) + "\n");
        return results;
    });
}

inline std::vector<GrangerResult> load_granger(const PipelineConfig& cfg) {
    return granger_from_json(detail::read_json(cfg.output_dir / artifact::granger_json));
}

inline CausalGraph graph(const PipelineConfig& cfg, const std::vector<GrangerResult>& results) {
    return run_stage("graph", [&] {
        auto g = build_graph(results, cfg.alpha);
        detail::write_file(cfg.output_dir / artifact::graph_dot, export_dot(g));
        auto j = graph_json(g);
        nlohmann::json top = nlohmann::json::array();
        for (const auto& e : top_edges(g, cfg.top_edges)) top.push_back({{"source", e.source}, {"target", e.target}, {"min_p", e.min_p}});
        j["top_edges"] = top;
        detail::write_file(cfg.output_dir / artifact::graph_json, j.dump(2) + "\n");
        return g;
    });
}

} // namespace stages

struct PipelineRun {
    EventLog log;
    Classification classification;
    Panel panel;
    Panel stationary;
    StationarityReport stationarity;
    LagSelection lags;
    std::vector<GrangerResult> results;
    CausalGraph graph;
};

/// Every stage in order, passing results in memory, then the manifest.
inline PipelineRun run_pipeline(const PipelineConfig& cfg) {
    PipelineRun run;
    run.log = stages::ingest(cfg);
    run.classification = stages::classify(cfg, run.log);
    run.panel = stages::series(cfg, run.log, run.classification.transitions);
    std::tie(run.stationary, run.stationarity) = stages::adf(cfg, run.panel);
    run.lags = stages::select_lags(cfg, run.stationary);
    run.results = stages::granger(cfg, run.stationary, run.lags);
    run.graph = stages::graph(cfg, run.results);

    nlohmann::json hashes = nlohmann::json::object();
    for (const char* name : {artifact::events, artifact::log_summary, artifact::transitions, artifact::panel, artifact::masks,
                             artifact::stationarity, artifact::stationary_panel, artifact::stationary_masks,
                             artifact::lag_frequency, artifact::lag_selection, artifact::granger_csv, artifact::granger_json,
                             artifact::graph_dot, artifact::graph_json}) {
        hashes[name] = hex64(fnv1a(detail::read_file(cfg.output_dir / name)));
    }
    const nlohmann::json manifest{{"tool", "actorgc"},
                                  {"version", kVersion},
                                  {"seed", cfg.seed},
                                  {"config_hash", hex64(fnv1a(cfg.document.dump()))},
                                  {"artifacts", hashes}};
    detail::write_file(cfg.output_dir / artifact::manifest, manifest.dump(2) + "\n");
    return run;
}

} // namespace actorgc
