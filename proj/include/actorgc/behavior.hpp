#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "csv.hpp"
#include "error.hpp"
#include "event_log.hpp"
#include "parallel.hpp"
#include "time.hpp"

namespace actorgc {

enum class BehaviorType : std::uint8_t { continuation, interruption, handover_idle, handover_busy };

inline constexpr std::array<BehaviorType, 4> kBehaviorTypes{
    BehaviorType::continuation, BehaviorType::interruption, BehaviorType::handover_idle, BehaviorType::handover_busy};

inline std::string_view behavior_code(BehaviorType b) {
    switch (b) {
        case BehaviorType::continuation: return "C";
        case BehaviorType::interruption: return "I";
        case BehaviorType::handover_idle: return "HI";
        case BehaviorType::handover_busy: return "HB";
    }
    return "?";
}

inline std::optional<BehaviorType> behavior_from_code(std::string_view code) {
    for (auto b : kBehaviorTypes) {
        if (behavior_code(b) == code) return b;
    }
    return std::nullopt;
}

/// Per-actor timelines over a sorted log. Answers "did actor r perform an
/// event of a case other than c strictly inside (t_lo, t_hi)?" in O(log n).
class ActorIndex {
public:
    explicit ActorIndex(const EventLog& log) {
        for (std::size_t pos = 0; pos < log.events.size(); ++pos) {
            const auto& e = log.events[pos];
            if (!e.actor) continue;
            auto [it, inserted] = actor_ids_.try_emplace(*e.actor, timelines_.size());
            if (inserted) timelines_.emplace_back();
            const auto [cit, cins] = case_ids_.try_emplace(e.case_id, case_ids_.size());
            timelines_[it->second].entries.push_back({e.timestamp, pos, static_cast<std::uint32_t>(cit->second)});
        }
        for (auto& tl : timelines_) {
            // Sorted log order already implies timestamp order; keep the
            // guarantee explicit for logs that were not pre-sorted.
            std::stable_sort(tl.entries.begin(), tl.entries.end(),
                             [](const Entry& a, const Entry& b) { return a.timestamp < b.timestamp; });
            const std::size_t n = tl.entries.size();
            tl.run_end.resize(n);
            for (std::size_t i = n; i-- > 0;) {
                tl.run_end[i] = (i + 1 < n && tl.entries[i + 1].case_id == tl.entries[i].case_id) ? tl.run_end[i + 1] : i;
            }
        }
    }

    struct Entry {
        Timestamp timestamp;
        std::size_t position;
        std::uint32_t case_id;
    };

    std::size_t actor_count() const { return timelines_.size(); }

    // Entries for one actor in log order; empty if the actor is unknown.
    std::vector<Entry> events_of(std::string_view actor) const {
        const auto it = actor_ids_.find(std::string{actor});
        if (it == actor_ids_.end()) return {};
        return timelines_[it->second].entries;
    }

    bool busy_elsewhere(std::string_view actor, Timestamp lo, Timestamp hi, std::string_view case_id) const {
        const auto a = actor_ids_.find(std::string{actor});
        if (a == actor_ids_.end() || !(lo < hi)) return false;
        const auto c = case_ids_.find(std::string{case_id});
        const std::uint32_t cid = c == case_ids_.end() ? UINT32_MAX : static_cast<std::uint32_t>(c->second);
        return busy_elsewhere(a->second, lo, hi, cid);
    }

private:
    struct Timeline {
        std::vector<Entry> entries;
        // Last index of the run of consecutive entries sharing entries[i].case_id.
        std::vector<std::size_t> run_end;
    };

    bool busy_elsewhere(std::size_t actor, Timestamp lo, Timestamp hi, std::uint32_t case_id) const {
        const auto& tl = timelines_[actor];
        const auto first = std::upper_bound(tl.entries.begin(), tl.entries.end(), lo,
                                            [](Timestamp t, const Entry& e) { return t < e.timestamp; });
        const auto last = std::lower_bound(first, tl.entries.end(), hi,
                                           [](const Entry& e, Timestamp t) { return e.timestamp < t; });
        if (first == last) return false;
        const auto i = static_cast<std::size_t>(first - tl.entries.begin());
        const auto j = static_cast<std::size_t>(last - tl.entries.begin()) - 1;
        return !(tl.entries[i].case_id == case_id && tl.run_end[i] >= j);
    }

    std::unordered_map<std::string, std::size_t> actor_ids_;
    std::unordered_map<std::string, std::size_t> case_ids_;
    std::vector<Timeline> timelines_;
};

inline ActorIndex build_actor_index(const EventLog& log) { return ActorIndex(log); }

/// Classifies the consecutive same-case pair (from, to). Returns nullopt when
/// either actor is undefined. Events sharing a timestamp with either endpoint
/// never count as interposed.
inline std::optional<BehaviorType> classify_transition(const Event& from, const Event& to, const ActorIndex& index) {
    if (!from.actor || !to.actor) return std::nullopt;
    const bool busy = index.busy_elsewhere(*to.actor, from.timestamp, to.timestamp, to.case_id);
    if (*from.actor == *to.actor) return busy ? BehaviorType::interruption : BehaviorType::continuation;
    return busy ? BehaviorType::handover_busy : BehaviorType::handover_idle;
}

struct Transition {
    std::string case_id;
    std::size_t from_event = 0;
    std::size_t to_event = 0;
    std::string from_actor;
    std::string to_actor;
    BehaviorType behavior = BehaviorType::continuation;
    Timestamp from_timestamp{};
    Timestamp to_timestamp{};
    // Activity of the receiving event.
    std::string to_activity;

    friend bool operator==(const Transition&, const Transition&) = default;
};

struct Classification {
    std::vector<Transition> transitions;
    // Consecutive pairs skipped because an actor was undefined.
    std::size_t skipped_pairs = 0;
};

/// Classifies every consecutive same-case pair of a sorted log, ordered by
/// the position of the receiving event.
inline Classification classify_log(const EventLog& log, const ActorIndex& index, std::size_t workers = 1) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::unordered_map<std::string_view, std::size_t> last_in_case;
    last_in_case.reserve(log.events.size() / 4 + 1);
    for (std::size_t pos = 0; pos < log.events.size(); ++pos) {
        auto [it, inserted] = last_in_case.try_emplace(log.events[pos].case_id, pos);
        if (!inserted) {
            pairs.emplace_back(it->second, pos);
            it->second = pos;
        }
    }
    std::vector<std::optional<BehaviorType>> kinds(pairs.size());
    parallel_for(pairs.size(), workers, [&](std::size_t k) {
        kinds[k] = classify_transition(log.events[pairs[k].first], log.events[pairs[k].second], index);
    });
    Classification out;
    out.transitions.reserve(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        if (!kinds[k]) {
            ++out.skipped_pairs;
            continue;
        }
        const auto& a = log.events[pairs[k].first];
        const auto& b = log.events[pairs[k].second];
        out.transitions.push_back(Transition{b.case_id, pairs[k].first, pairs[k].second, *a.actor, *b.actor, *kinds[k],
                                             a.timestamp, b.timestamp, b.activity});
    }
    return out;
}

inline Classification classify_log(const EventLog& log, std::size_t workers = 1) {
    return classify_log(log, ActorIndex(log), workers);
}

inline void write_transitions_csv(std::ostream& out, const std::vector<Transition>& transitions) {
    csv::write_row(out, {"case_id", "from_ts", "to_ts", "from_actor", "to_actor", "behavior", "to_activity"});
    for (const auto& t : transitions) {
        csv::write_row(out, {t.case_id, format_timestamp(t.from_timestamp), format_timestamp(t.to_timestamp), t.from_actor,
                             t.to_actor, std::string(behavior_code(t.behavior)), t.to_activity});
    }
}

/// Reads a transitions dump. Event positions are not part of the format and
/// are left at their row ordinal.
inline std::vector<Transition> read_transitions_csv(std::istream& in) {
    csv::Reader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row)) throw ParseError("transitions: missing header");
    const std::vector<std::string> expected{"case_id", "from_ts", "to_ts", "from_actor", "to_actor", "behavior"};
    if (row.size() < expected.size() || !std::equal(expected.begin(), expected.end(), row.begin())) {
        throw ParseError("transitions: unexpected header");
    }
    const bool has_activity = row.size() > expected.size() && row[expected.size()] == "to_activity";
    std::vector<Transition> out;
    std::size_t n = 0;
    while (reader.next(row)) {
        ++n;
        if (row.size() < expected.size()) throw ParseError("transitions: short row " + std::to_string(n));
        Transition t;
        t.case_id = row[0];
        const auto from = parse_rfc3339(row[1]);
        const auto to = parse_rfc3339(row[2]);
        const auto b = behavior_from_code(row[5]);
        if (!from || !to || !b) throw ParseError("transitions: malformed row " + std::to_string(n));
        t.from_timestamp = *from;
        t.to_timestamp = *to;
        t.from_actor = row[3];
        t.to_actor = row[4];
        t.behavior = *b;
        if (has_activity && row.size() > 6) t.to_activity = row[6];
        t.from_event = t.to_event = n - 1;
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace actorgc
