// Library walk-through: simulate a log with a planted handover effect, then
// run each analysis step by hand and print what the pipeline would write.

#include <iostream>

#include <actorgc/actorgc.hpp>

using namespace actorgc;

int main() {
    SynthLogConfig sc;
    sc.n_cases = 4000;
    sc.days = 365;
    sc.planted = PlantedEffect{BehaviorType::handover_busy, 3, 0.5};
    sc.seed = 7;
    const auto log = validate_and_sort(generate_log(sc));

    const auto classification = classify_log(log);
    std::cout << log.events.size() << " events, " << classification.transitions.size() << " transitions\n";

    auto behaviors = behavior_series(classification.transitions, Granularity::global);
    behaviors.push_back(throughput_series(log));
    behaviors.back().name = "TT";
    const auto panel = align(behaviors);

    const auto [stationary, report] = ensure_stationary(panel);
    const auto lags = lag_frequency(stationary, {"TT"}, LassoConfig{});
    std::cout << "selected lags:";
    for (int l : lags.selected) std::cout << ' ' << l;
    std::cout << '\n';

    const auto results = test_all_pairs(stationary, lags.selected);
    std::cout << export_dot(build_graph(results));
    if (const auto ratio = asymmetry_ratio(results)) std::cout << "asymmetry ratio " << *ratio << '\n';
}
