#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "behavior.hpp"
#include "error.hpp"
#include "event_log.hpp"
#include "time.hpp"
#include "timeseries.hpp"

namespace actorgc {

// Inflates throughput of cases starting on day d by
// effect_days * (count of `behavior` transitions on day d - lag).
struct PlantedEffect {
    BehaviorType behavior = BehaviorType::handover_busy;
    int lag = 3;
    double effect_days = 0.5;
};

struct SynthLogConfig {
    std::size_t n_cases = 2000;
    std::size_t n_actors = 10;
    std::size_t n_activities = 8;
    int days = 365;
    double handover_rate = 0.5;
    // Probability that a same-actor transition leaves the actor free to take
    // other work during the gap. At 0 the actor is reserved for the case.
    double interruption_rate = 0.3;
    std::optional<PlantedEffect> planted;
    std::uint64_t seed = 1;
    double mean_case_length = 6.0;
    double mean_gap_days = 0.2;

    void validate() const {
        auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (!prob(handover_rate) || !prob(interruption_rate)) throw ConfigError("synth: rates must lie in [0, 1]");
        if (n_cases < 1 || n_actors < 1 || n_activities < 1 || days < 1) {
            throw ConfigError("synth: n_cases, n_actors, n_activities and days must be positive");
        }
        if (n_actors == 1 && handover_rate > 0.0) throw ConfigError("synth: handovers need at least two actors");
        if (!(mean_case_length >= 1.0) || !(mean_gap_days > 0.0)) throw ConfigError("synth: bad case length or gap");
        if (planted && (planted->lag < 1 || planted->lag >= days || !(planted->effect_days >= 0.0))) {
            throw ConfigError("synth: planted lag must be in [1, days) with a non-negative effect");
        }
    }
};

inline Timestamp synth_epoch() {
    using namespace std::chrono;
    return time_point_cast<milliseconds>(sys_days{year{2020} / January / 1});
}

/// Discrete-event simulation of cases worked by a pool of actors. Each
/// transition is planned as a handover (probability handover_rate) or a
/// same-actor step; same-actor steps reserve the actor for the gap unless the
/// interruption draw releases it. Output is sorted and deterministic per seed.
inline EventLog generate_log(const SynthLogConfig& config) {
    config.validate();
    using Millis = std::int64_t;
    constexpr Millis kDay = 86'400'000;
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> gap_days(1.0 / config.mean_gap_days);
    std::geometric_distribution<int> extra_steps(1.0 / config.mean_case_length);
    std::uniform_int_distribution<std::size_t> activity(1, config.n_activities);

    enum class Plan { none, reserved, released, handover };
    struct CaseState {
        std::size_t length = 1;
        Plan plan = Plan::none;
        std::size_t prev_actor = 0;
        Millis prev_time = 0;
        Millis planted_delay = 0;
    };
    struct Pending {
        Millis time;
        std::uint64_t order;
        std::size_t case_index;
        std::size_t step;
        bool operator>(const Pending& o) const { return time != o.time ? time > o.time : order > o.order; }
    };
    struct ActorState {
        std::optional<std::size_t> reserved_for;
        Millis reserved_until = 0;
        std::vector<std::pair<Millis, std::size_t>> history;
    };

    const Millis horizon = static_cast<Millis>(config.days) * kDay;
    std::vector<Millis> arrivals(config.n_cases);
    for (auto& a : arrivals) a = static_cast<Millis>(unit(rng) * static_cast<double>(horizon));
    std::sort(arrivals.begin(), arrivals.end());

    std::vector<CaseState> cases(config.n_cases);
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue;
    std::uint64_t order = 0;
    for (std::size_t c = 0; c < config.n_cases; ++c) {
        cases[c].length = 1 + static_cast<std::size_t>(extra_steps(rng));
        queue.push({arrivals[c], order++, c, 0});
    }
    std::vector<ActorState> actors(config.n_actors);
    std::vector<std::array<int, 4>> daily_counts;
    auto count_on = [&](long day, BehaviorType b) -> int {
        if (day < 0 || day >= static_cast<long>(daily_counts.size())) return 0;
        return daily_counts[static_cast<std::size_t>(day)][static_cast<std::size_t>(b)];
    };

    EventLog log;
    const auto epoch = synth_epoch();
    auto case_name = [](std::size_t c) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "case_%06zu", c + 1);
        return std::string(buf);
    };

    while (!queue.empty()) {
        const Pending step = queue.top();
        queue.pop();
        auto& cs = cases[step.case_index];
        const Millis now = step.time;

        std::optional<std::size_t> actor;
        Millis wait_until = 0;
        auto free_actors = [&](std::optional<std::size_t> exclude) {
            std::vector<std::size_t> out;
            Millis earliest = INT64_MAX;
            for (std::size_t r = 0; r < actors.size(); ++r) {
                if (exclude && r == *exclude) continue;
                if (actors[r].reserved_for) earliest = std::min(earliest, actors[r].reserved_until);
                else out.push_back(r);
            }
            return std::make_pair(out, earliest);
        };
        if (step.step == 0 || cs.plan == Plan::handover) {
            const auto exclude = step.step == 0 ? std::nullopt : std::optional{cs.prev_actor};
            auto [free, earliest] = free_actors(exclude);
            if (free.empty()) {
                wait_until = earliest;
            } else {
                actor = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
            }
        } else {
            auto& a = actors[cs.prev_actor];
            if (a.reserved_for && *a.reserved_for != step.case_index) wait_until = a.reserved_until;
            else actor = cs.prev_actor;
        }
        if (!actor) {
            queue.push({std::max(wait_until, now) + 1, order++, step.case_index, step.step});
            continue;
        }

        auto& a = actors[*actor];
        if (a.reserved_for == step.case_index) a.reserved_for.reset();
        const long day = static_cast<long>(now / kDay);
        if (daily_counts.size() <= static_cast<std::size_t>(day)) daily_counts.resize(static_cast<std::size_t>(day) + 1, {0, 0, 0, 0});
        if (step.step > 0) {
            bool busy = false;
            for (auto it = a.history.rbegin(); it != a.history.rend() && it->first > cs.prev_time; ++it) {
                if (it->first < now && it->second != step.case_index) {
                    busy = true;
                    break;
                }
            }
            const bool same = *actor == cs.prev_actor;
            const BehaviorType b = same ? (busy ? BehaviorType::interruption : BehaviorType::continuation)
                                        : (busy ? BehaviorType::handover_busy : BehaviorType::handover_idle);
            ++daily_counts[static_cast<std::size_t>(day)][static_cast<std::size_t>(b)];
        } else if (config.planted) {
            const double extra = config.planted->effect_days * count_on(day - config.planted->lag, config.planted->behavior);
            cs.planted_delay = static_cast<Millis>(std::llround(extra * static_cast<double>(kDay)));
        }
        a.history.emplace_back(now, step.case_index);

        Event e;
        e.case_id = case_name(step.case_index);
        e.activity = "Activity_" + std::to_string(activity(rng));
        e.timestamp = epoch + std::chrono::milliseconds{now};
        e.actor = "User_" + std::to_string(*actor + 1);
        e.sequence_index = log.events.size();
        log.events.push_back(std::move(e));

        cs.prev_actor = *actor;
        cs.prev_time = now;
        if (step.step + 1 >= cs.length) continue;

        if (config.n_actors > 1 && unit(rng) < config.handover_rate) cs.plan = Plan::handover;
        else cs.plan = unit(rng) < config.interruption_rate ? Plan::released : Plan::reserved;
        Millis gap = std::max<Millis>(1, static_cast<Millis>(std::llround(gap_days(rng) * static_cast<double>(kDay))));
        if (step.step + 2 == cs.length && cs.planted_delay > 0) {
            gap += cs.planted_delay;
            if (cs.plan == Plan::reserved) cs.plan = Plan::released;
        }
        if (cs.plan == Plan::reserved) {
            a.reserved_for = step.case_index;
            a.reserved_until = now + gap;
        }
        queue.push({now + gap, order++, step.case_index, step.step + 1});
    }
    return log;
}

struct VarTerm {
    std::size_t target = 0;
    std::size_t source = 0;
    int lag = 1;
    double coefficient = 0.0;
};

struct VarSpec {
    std::size_t dimensions = 2;
    std::size_t length = 300;
    std::vector<VarTerm> terms;
    double noise_scale = 1.0;
    std::uint64_t seed = 1;
    // Defaults: x1..x{k-1} as behavior columns, "y" (last) as KPI.
    std::vector<std::string> names;
    std::vector<SeriesRole> roles;
    std::size_t burn_in = 200;
};

/// Largest eigenvalue modulus of the VAR companion matrix.
inline double var_spectral_radius(const VarSpec& spec) {
    int order = 0;
    for (const auto& t : spec.terms) order = std::max(order, t.lag);
    if (order == 0) return 0.0;
    const auto k = static_cast<Eigen::Index>(spec.dimensions);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k * order, k * order);
    for (const auto& t : spec.terms) {
        companion(static_cast<Eigen::Index>(t.target), (t.lag - 1) * k + static_cast<Eigen::Index>(t.source)) += t.coefficient;
    }
    if (order > 1) companion.bottomLeftCorner(k * (order - 1), k * (order - 1)).setIdentity();
    return Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues().cwiseAbs().maxCoeff();
}

/// Simulates x_t = sum_l A_l x_{t-l} + noise_scale * N(0, I) after a burn-in.
inline Panel generate_var(const VarSpec& spec) {
    if (spec.dimensions < 1 || spec.length < 1) throw ConfigError("var: dimensions and length must be positive");
    for (const auto& t : spec.terms) {
        if (t.target >= spec.dimensions || t.source >= spec.dimensions || t.lag < 1) {
            throw ConfigError("var: coefficient term out of range");
        }
    }
    if (!spec.names.empty() && spec.names.size() != spec.dimensions) throw ConfigError("var: names size mismatch");
    if (!spec.roles.empty() && spec.roles.size() != spec.dimensions) throw ConfigError("var: roles size mismatch");
    const double radius = var_spectral_radius(spec);
    if (!(radius < 1.0)) {
        throw NumericError("var: explosive coefficients (companion spectral radius " + std::to_string(radius) + ")");
    }
    int order = 1;
    for (const auto& t : spec.terms) order = std::max(order, t.lag);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const std::size_t total = spec.burn_in + spec.length;
    const std::size_t k = spec.dimensions;
    std::vector<double> x((total + static_cast<std::size_t>(order)) * k, 0.0);
    for (std::size_t t = static_cast<std::size_t>(order); t < total + static_cast<std::size_t>(order); ++t) {
        for (std::size_t i = 0; i < k; ++i) x[t * k + i] = spec.noise_scale * noise(rng);
        for (const auto& term : spec.terms) {
            x[t * k + term.target] += term.coefficient * x[(t - static_cast<std::size_t>(term.lag)) * k + term.source];
        }
    }
    Panel p;
    p.start_day = day_of(synth_epoch());
    p.length = spec.length;
    for (std::size_t i = 0; i < k; ++i) {
        DailySeries s;
        if (!spec.names.empty()) s.name = spec.names[i];
        else s.name = (i + 1 == k) ? "y" : "x" + std::to_string(i + 1);
        if (!spec.roles.empty()) s.role = spec.roles[i];
        else s.role = (i + 1 == k) ? SeriesRole::kpi : SeriesRole::behavior;
        s.start_day = p.start_day;
        s.values.resize(spec.length);
        s.filled.assign(spec.length, false);
        const std::size_t offset = static_cast<std::size_t>(order) + spec.burn_in;
        for (std::size_t t = 0; t < spec.length; ++t) s.values[t] = x[(offset + t) * k + i];
        p.columns.push_back(std::move(s));
    }
    return p;
}

} // namespace actorgc
