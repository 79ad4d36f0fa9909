#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <actorgc/actorgc.hpp>

namespace {

using actorgc::ErrorKind;
using actorgc::PipelineConfig;

const char* hint(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config: return "check the config file and command-line options";
        case ErrorKind::parse: return "check the input format, column mapping and timestamp_format";
        case ErrorKind::insufficient_data: return "use a longer log, a smaller lasso.max_lag or fewer KPIs with sparse days";
        case ErrorKind::numeric: return "inspect the series for constant or collinear columns, or widen the lambda grids";
    }
    return "";
}

struct Common {
    std::string config;
    std::string output_dir;
    long workers = -1;
};

PipelineConfig load(const Common& c) {
    auto cfg = actorgc::load_config(c.config);
    if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
    if (c.workers >= 0) cfg.workers = static_cast<std::size_t>(c.workers);
    return cfg;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("-c,--config", c.config, "pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", c.output_dir, "override output_dir from the config");
    sub->add_option("-w,--workers", c.workers, "worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Actor-behavior Granger causality for process event logs"};
    app.set_version_flag("--version", std::string(actorgc::kVersion));
    app.require_subcommand(1);

    Common common;
    auto* ingest = app.add_subcommand("ingest", "parse and validate the event log, write events.csv");
    auto* classify = app.add_subcommand("classify", "label consecutive event pairs as C, I, HI or HB");
    auto* series = app.add_subcommand("series", "build the aligned daily behavior/KPI panel");
    auto* adf = app.add_subcommand("adf", "ADF tests and differencing of non-stationary columns");
    auto* select = app.add_subcommand("select-lags", "sparse group lasso lag-frequency analysis");
    auto* granger = app.add_subcommand("granger", "Granger tests for every behavior -> KPI pair at the selected lags");
    auto* graph = app.add_subcommand("graph", "build the causal graph and export DOT/JSON");
    auto* run = app.add_subcommand("run", "run every stage in order and write a manifest");
    for (auto* sub : {ingest, classify, series, adf, select, granger, graph, run}) add_common(sub, common);

    auto* synth = app.add_subcommand("synth", "write a synthetic event log");
    actorgc::SynthLogConfig sc;
    std::string out_path = "synthetic_log.csv";
    std::string out_format = "csv";
    std::string planted_behavior;
    int planted_lag = 3;
    double planted_effect = 0.5;
    synth->add_option("--cases", sc.n_cases, "number of cases");
    synth->add_option("--actors", sc.n_actors, "number of actors");
    synth->add_option("--activities", sc.n_activities, "number of activity labels");
    synth->add_option("--days", sc.days, "length of the arrival window in days");
    synth->add_option("--handover-rate", sc.handover_rate, "probability that a transition changes actor");
    synth->add_option("--interruption-rate", sc.interruption_rate, "probability that a kept actor is released between steps");
    synth->add_option("--seed", sc.seed, "random seed");
    synth->add_option("--plant", planted_behavior, "plant a throughput effect driven by this behavior (C, I, HI, HB)");
    synth->add_option("--plant-lag", planted_lag, "lag of the planted effect in days");
    synth->add_option("--plant-effect", planted_effect, "days added to throughput per lagged transition");
    synth->add_option("--out", out_path, "output path");
    synth->add_option("--format", out_format, "csv or xes")->check(CLI::IsMember({"csv", "xes"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            if (!planted_behavior.empty()) {
                const auto b = actorgc::behavior_from_code(planted_behavior);
                if (!b) throw actorgc::ConfigError("--plant: expected C, I, HI or HB");
                sc.planted = actorgc::PlantedEffect{*b, planted_lag, planted_effect};
            }
            sc.validate();
            const auto log = actorgc::generate_log(sc);
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw actorgc::ConfigError("cannot write '" + out_path + "'");
            if (out_format == "xes") actorgc::write_xes(out, log);
            else actorgc::write_csv(out, log);
            std::cout << "wrote " << log.events.size() << " events to " << out_path << "\n";
            return 0;
        }

        const auto cfg = load(common);
        namespace st = actorgc::stages;
        using actorgc::artifact::masks;
        using actorgc::artifact::panel;
        using actorgc::artifact::stationary_masks;
        using actorgc::artifact::stationary_panel;
        if (ingest->parsed()) {
            const auto log = st::ingest(cfg);
            const auto s = actorgc::summarize(log);
            std::cout << s.events << " events, " << s.cases << " cases, " << s.actors << " actors\n";
        } else if (classify->parsed()) {
            const auto log = actorgc::run_stage("classify", [&] { return st::load_events(cfg); });
            const auto c = st::classify(cfg, log);
            std::size_t counts[4] = {};
            for (const auto& t : c.transitions) ++counts[static_cast<int>(t.behavior)];
            for (auto b : actorgc::kBehaviorTypes) std::cout << actorgc::behavior_code(b) << " " << counts[static_cast<int>(b)] << "\n";
        } else if (series->parsed()) {
            const auto log = actorgc::run_stage("series", [&] { return st::load_events(cfg); });
            const auto tr = actorgc::run_stage("series", [&] { return st::load_transitions(cfg); });
            const auto p = st::series(cfg, log, tr);
            std::cout << p.columns.size() << " columns x " << p.length << " days from " << actorgc::format_day(p.start_day) << "\n";
        } else if (adf->parsed()) {
            const auto p = actorgc::run_stage("adf", [&] { return st::load_panel(cfg, panel, masks); });
            const auto [stationary, report] = st::adf(cfg, p);
            for (const auto& c : report.columns) {
                std::cout << c.name << (c.differenced ? " differenced" : " level") << (c.still_nonstationary ? " (still non-stationary)" : "")
                          << "\n";
            }
        } else if (select->parsed()) {
            const auto p = actorgc::run_stage("select-lags", [&] { return st::load_panel(cfg, stationary_panel, stationary_masks); });
            const auto sel = st::select_lags(cfg, p);
            std::cout << "selected lags:";
            for (int l : sel.selected) std::cout << " " << l;
            std::cout << "\n";
        } else if (granger->parsed()) {
            const auto p = actorgc::run_stage("granger", [&] { return st::load_panel(cfg, stationary_panel, stationary_masks); });
            const auto sel = actorgc::run_stage("granger", [&] { return st::load_lag_selection(cfg); });
            const auto res = st::granger(cfg, p, sel);
            const auto ratio = actorgc::asymmetry_ratio(res, cfg.alpha);
            std::cout << res.size() << " tests, asymmetry ratio " << (ratio ? std::to_string(*ratio) : std::string("n/a")) << "\n";
        } else if (graph->parsed()) {
            const auto res = actorgc::run_stage("graph", [&] { return st::load_granger(cfg); });
            const auto g = st::graph(cfg, res);
            for (const auto& e : actorgc::top_edges(g, cfg.top_edges)) std::printf("%s -> %s  p=%.3g\n", e.source.c_str(), e.target.c_str(), e.min_p);
        } else if (run->parsed()) {
            const auto r = actorgc::run_pipeline(cfg);
            std::cout << r.graph.edges.size() << " significant edge(s); artifacts in " << cfg.output_dir.string() << "\n";
        }
        return 0;
    } catch (const actorgc::Error& e) {
        std::cerr << "error: " << e.what() << "\nhint: " << hint(e.kind()) << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
