#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include <json.hpp>

#include "behavior.hpp"
#include "csv.hpp"
#include "diagnostics.hpp"
#include "error.hpp"
#include "event_log.hpp"
#include "time.hpp"

namespace actorgc {

enum class SeriesRole { behavior, kpi };

inline std::string_view role_name(SeriesRole r) { return r == SeriesRole::behavior ? "behavior" : "kpi"; }

struct DailySeries {
    std::string name;
    SeriesRole role = SeriesRole::behavior;
    Day start_day{};
    std::vector<double> values;
    // true where the value was synthesized by gap filling.
    std::vector<bool> filled;

    std::size_t size() const { return values.size(); }
    Day end_day() const { return start_day + std::chrono::days{static_cast<long>(values.size()) - 1}; }

    double fill_fraction() const {
        if (filled.empty()) return 0.0;
        return static_cast<double>(std::count(filled.begin(), filled.end(), true)) / static_cast<double>(filled.size());
    }

    std::optional<Day> first_observed() const {
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!filled[i]) return start_day + std::chrono::days{static_cast<long>(i)};
        return std::nullopt;
    }
    std::optional<Day> last_observed() const {
        for (std::size_t i = values.size(); i-- > 0;)
            if (!filled[i]) return start_day + std::chrono::days{static_cast<long>(i)};
        return std::nullopt;
    }

    friend bool operator==(const DailySeries&, const DailySeries&) = default;
};

/// Columns share start_day and length.
struct Panel {
    Day start_day{};
    std::size_t length = 0;
    std::vector<DailySeries> columns;

    const DailySeries* find(std::string_view name) const {
        for (const auto& c : columns)
            if (c.name == name) return &c;
        return nullptr;
    }
    const DailySeries& column(std::string_view name) const {
        if (const auto* c = find(name)) return *c;
        throw ConfigError("panel has no column '" + std::string(name) + "'");
    }
    std::vector<const DailySeries*> with_role(SeriesRole role) const {
        std::vector<const DailySeries*> out;
        for (const auto& c : columns)
            if (c.role == role) out.push_back(&c);
        return out;
    }

    friend bool operator==(const Panel&, const Panel&) = default;
};

enum class Granularity { global, per_actor, per_activity };

/// Daily counts per behavior type (and per group), bucketed on the day of the
/// receiving event. Grouped variants keep the top_k groups by total count
/// (0 keeps all). Every series spans the same day range.
inline std::vector<DailySeries> behavior_series(const std::vector<Transition>& transitions, Granularity granularity,
                                                std::size_t top_k = 10) {
    if (transitions.empty()) {
        warn("behavior_series: no transitions; no behavior series produced");
        return {};
    }
    Day lo = day_of(transitions.front().to_timestamp), hi = lo;
    for (const auto& t : transitions) {
        const Day d = day_of(t.to_timestamp);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    const auto n = static_cast<std::size_t>((hi - lo).count()) + 1;

    auto group_of = [&](const Transition& t) -> const std::string& {
        return granularity == Granularity::per_actor ? t.to_actor : t.to_activity;
    };
    std::vector<std::string> groups;
    if (granularity == Granularity::global) {
        groups.emplace_back();
    } else {
        std::unordered_map<std::string, std::size_t> totals;
        for (const auto& t : transitions) ++totals[group_of(t)];
        std::vector<std::pair<std::string, std::size_t>> ranked(totals.begin(), totals.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        if (top_k > 0 && ranked.size() > top_k) ranked.resize(top_k);
        for (auto& r : ranked) groups.push_back(r.first);
    }
    std::unordered_map<std::string_view, std::size_t> group_slot;
    for (std::size_t g = 0; g < groups.size(); ++g) group_slot.emplace(groups[g], g);

    const std::string_view label = granularity == Granularity::per_actor ? "@user=" : "@activity=";
    std::vector<DailySeries> out;
    for (const auto& g : groups) {
        for (auto b : kBehaviorTypes) {
            DailySeries s;
            s.name = std::string(behavior_code(b));
            if (granularity != Granularity::global) s.name += std::string(label) + g;
            s.role = SeriesRole::behavior;
            s.start_day = lo;
            s.values.assign(n, 0.0);
            s.filled.assign(n, false);
            out.push_back(std::move(s));
        }
    }
    for (const auto& t : transitions) {
        std::size_t g = 0;
        if (granularity != Granularity::global) {
            const auto it = group_slot.find(group_of(t));
            if (it == group_slot.end()) continue;
            g = it->second;
        }
        const auto d = static_cast<std::size_t>((day_of(t.to_timestamp) - lo).count());
        out[g * kBehaviorTypes.size() + static_cast<std::size_t>(t.behavior)].values[d] += 1.0;
    }
    return out;
}

/// Which cases count as completed for KPI construction.
struct CompletionRule {
    enum class Kind { all, trailing_gap, end_activities };
    Kind kind = Kind::trailing_gap;
    // trailing_gap: last event at least this many days before the log's final timestamp.
    double min_trailing_days = 1.0;
    // end_activities: last event's activity is one of these.
    std::vector<std::string> end_activities;

    static CompletionRule all() { return {Kind::all, 0.0, {}}; }
    static CompletionRule trailing_gap(double days = 1.0) { return {Kind::trailing_gap, days, {}}; }
    static CompletionRule ending_with(std::vector<std::string> activities) {
        return {Kind::end_activities, 0.0, std::move(activities)};
    }
};

struct CaseSpan {
    std::string case_id;
    Timestamp start{};
    Timestamp end{};
    std::vector<std::size_t> positions;
};

/// Cases passing the completion rule, in order of first event.
inline std::vector<CaseSpan> completed_cases(const EventLog& log, const CompletionRule& rule) {
    std::vector<CaseSpan> out;
    if (log.events.empty()) return out;
    Timestamp log_end = log.events.front().timestamp;
    for (const auto& e : log.events) log_end = std::max(log_end, e.timestamp);
    const std::unordered_set<std::string> ends(rule.end_activities.begin(), rule.end_activities.end());
    for (auto& tr : traces(log)) {
        CaseSpan c{tr.case_id, log.events[tr.positions.front()].timestamp, log.events[tr.positions.front()].timestamp, {}};
        std::size_t last_pos = tr.positions.front();
        for (auto p : tr.positions) {
            const auto ts = log.events[p].timestamp;
            c.start = std::min(c.start, ts);
            if (ts >= c.end) {
                c.end = ts;
                last_pos = p;
            }
        }
        bool keep = true;
        switch (rule.kind) {
            case CompletionRule::Kind::all: break;
            case CompletionRule::Kind::trailing_gap:
                keep = to_fractional_days(log_end - c.end) >= rule.min_trailing_days;
                break;
            case CompletionRule::Kind::end_activities:
                keep = ends.count(log.events[last_pos].activity) > 0;
                break;
        }
        if (!keep) continue;
        c.positions = std::move(tr.positions);
        out.push_back(std::move(c));
    }
    return out;
}

namespace detail {

// Last observation carried forward; leading gaps back-filled from the first
// observation. Observed entries are never modified.
inline void fill_gaps(std::vector<double>& values, const std::vector<bool>& filled) {
    std::optional<double> carry;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!filled[i]) carry = values[i];
        else if (carry) values[i] = *carry;
    }
    std::optional<double> first;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!filled[i]) {
            first = values[i];
            break;
        }
    }
    if (!first) return;
    for (std::size_t i = 0; i < values.size() && filled[i]; ++i) values[i] = *first;
}

// Daily mean of per-case values grouped by UTC start day.
template <class ValueFn>
DailySeries daily_case_mean(const std::vector<CaseSpan>& cases, std::string name, ValueFn&& value_of) {
    DailySeries s;
    s.name = std::move(name);
    s.role = SeriesRole::kpi;
    if (cases.empty()) return s;
    Day lo = day_of(cases.front().start), hi = lo;
    for (const auto& c : cases) {
        lo = std::min(lo, day_of(c.start));
        hi = std::max(hi, day_of(c.start));
    }
    const auto n = static_cast<std::size_t>((hi - lo).count()) + 1;
    std::vector<double> sum(n, 0.0);
    std::vector<std::size_t> count(n, 0);
    for (const auto& c : cases) {
        const auto d = static_cast<std::size_t>((day_of(c.start) - lo).count());
        sum[d] += value_of(c);
        ++count[d];
    }
    s.start_day = lo;
    s.values.resize(n);
    s.filled.resize(n);
    for (std::size_t d = 0; d < n; ++d) {
        s.filled[d] = count[d] == 0;
        s.values[d] = count[d] ? sum[d] / static_cast<double>(count[d]) : 0.0;
    }
    fill_gaps(s.values, s.filled);
    return s;
}

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace detail

/// Daily mean throughput time in fractional days over completed cases, keyed
/// by the start day of each case. Days without case starts are gap-filled.
inline DailySeries throughput_series(const EventLog& log, const CompletionRule& completion = {}) {
    const auto cases = completed_cases(log, completion);
    if (cases.empty()) throw InsufficientDataError("throughput: no completed cases");
    return detail::daily_case_mean(cases, "TT", [](const CaseSpan& c) { return to_fractional_days(c.end - c.start); });
}

// Case is positive if any activity label contains one of the keywords (case-insensitive).
struct KeywordRule {
    std::vector<std::string> keywords;
};

// Case outcome is the last event whose label starts with `prefix`; positive if
// that label is one of `positive_labels` (case-insensitive). Cases without
// such an event are negative.
struct LastEventRule {
    std::string prefix;
    std::vector<std::string> positive_labels;
};

// Case is positive if the named attribute reads as true on its first event carrying it.
struct AttributeRule {
    std::string attribute;
    std::vector<std::string> true_values{"true", "1", "yes", "y", "t"};
};

using OutcomeRule = std::variant<KeywordRule, LastEventRule, AttributeRule>;

/// Daily fraction of completed cases, by start day, satisfying the rule.
inline DailySeries outcome_series(const EventLog& log, const OutcomeRule& rule, std::string name,
                                  const CompletionRule& completion = {}) {
    std::optional<std::size_t> slot;
    if (const auto* a = std::get_if<AttributeRule>(&rule)) {
        slot = log.attribute_slot(a->attribute);
        if (!slot) throw ConfigError("outcome rule references missing attribute column '" + a->attribute + "'");
    }
    const auto cases = completed_cases(log, completion);
    if (cases.empty()) throw InsufficientDataError("outcome '" + name + "': no completed cases");

    auto positive = [&](const CaseSpan& c) -> double {
        return std::visit(
            [&](const auto& r) -> double {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, KeywordRule>) {
                    std::vector<std::string> keys;
                    for (const auto& k : r.keywords)
                        if (!k.empty()) keys.push_back(detail::ascii_lower(k));
                    for (auto p : c.positions) {
                        const auto label = detail::ascii_lower(log.events[p].activity);
                        for (const auto& k : keys)
                            if (label.find(k) != std::string::npos) return 1.0;
                    }
                    return 0.0;
                } else if constexpr (std::is_same_v<R, LastEventRule>) {
                    const std::string* last = nullptr;
                    for (auto p : c.positions) {
                        const auto& a = log.events[p].activity;
                        if (a.rfind(r.prefix, 0) == 0) last = &a;
                    }
                    if (!last) return 0.0;
                    const auto l = detail::ascii_lower(*last);
                    for (const auto& pl : r.positive_labels)
                        if (detail::ascii_lower(pl) == l) return 1.0;
                    return 0.0;
                } else {
                    for (auto p : c.positions) {
                        if (const auto* v = log.attribute(log.events[p], *slot)) {
                            const auto lv = detail::ascii_lower(*v);
                            for (const auto& t : r.true_values)
                                if (detail::ascii_lower(t) == lv) return 1.0;
                            return 0.0;
                        }
                    }
                    return 0.0;
                }
            },
            rule);
    };
    return detail::daily_case_mean(cases, std::move(name), positive);
}

/// Clips all series to the common observed range and re-fills KPI gaps.
/// Throws InsufficientDataError for disjoint ranges or a KPI column with more
/// than max_fill_fraction synthesized days.
inline Panel align(const std::vector<DailySeries>& series, double max_fill_fraction = 0.5) {
    if (series.size() < 2) throw InsufficientDataError("align: need at least two series");
    std::optional<Day> lo, hi;
    for (const auto& s : series) {
        const auto f = s.first_observed();
        const auto l = s.last_observed();
        if (!f || !l) throw InsufficientDataError("align: series '" + s.name + "' has no observed days");
        lo = lo ? std::max(*lo, *f) : *f;
        hi = hi ? std::min(*hi, *l) : *l;
    }
    if (*hi < *lo) throw InsufficientDataError("align: series date ranges do not overlap");
    Panel p;
    p.start_day = *lo;
    p.length = static_cast<std::size_t>((*hi - *lo).count()) + 1;
    for (const auto& s : series) {
        DailySeries c;
        c.name = s.name;
        c.role = s.role;
        c.start_day = *lo;
        c.values.assign(p.length, 0.0);
        c.filled.assign(p.length, true);
        for (std::size_t i = 0; i < p.length; ++i) {
            const long src = (*lo - s.start_day).count() + static_cast<long>(i);
            if (src >= 0 && src < static_cast<long>(s.size()) && !s.filled[static_cast<std::size_t>(src)]) {
                c.values[i] = s.values[static_cast<std::size_t>(src)];
                c.filled[i] = false;
            }
        }
        if (c.role == SeriesRole::behavior) {
            // Counts: a day without transitions is an observed zero.
            std::fill(c.filled.begin(), c.filled.end(), false);
        } else {
            detail::fill_gaps(c.values, c.filled);
            if (c.fill_fraction() > max_fill_fraction) {
                throw InsufficientDataError("align: KPI column '" + c.name + "' has " +
                                            std::to_string(static_cast<int>(c.fill_fraction() * 100)) +
                                            "% gap-filled days");
            }
        }
        p.columns.push_back(std::move(c));
    }
    return p;
}

namespace detail {
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace detail

/// Writes the values table (date column plus one column per series).
inline void write_panel_csv(std::ostream& out, const Panel& p) {
    std::vector<std::string> row{"date"};
    for (const auto& c : p.columns) row.push_back(c.name);
    csv::write_row(out, row);
    for (std::size_t i = 0; i < p.length; ++i) {
        row.assign({format_day(p.start_day + std::chrono::days{static_cast<long>(i)})});
        for (const auto& c : p.columns) row.push_back(detail::format_real(c.values[i]));
        csv::write_row(out, row);
    }
}

/// Sidecar with roles and gap-fill masks.
inline nlohmann::json panel_sidecar(const Panel& p) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : p.columns) {
        std::vector<std::size_t> filled;
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c.filled[i]) filled.push_back(i);
        cols.push_back({{"name", c.name}, {"role", role_name(c.role)}, {"filled_days", filled},
                        {"fill_fraction", c.fill_fraction()}});
    }
    return {{"start_day", format_day(p.start_day)}, {"length", p.length}, {"columns", cols}};
}

inline Panel read_panel(std::istream& values_csv, const nlohmann::json& sidecar) {
    Panel p;
    try {
        const auto start = parse_day(sidecar.at("start_day").get<std::string>());
        if (!start) throw ParseError("panel sidecar: bad start_day");
        p.start_day = *start;
        p.length = sidecar.at("length").get<std::size_t>();
        for (const auto& jc : sidecar.at("columns")) {
            DailySeries c;
            c.name = jc.at("name").get<std::string>();
            const auto role = jc.at("role").get<std::string>();
            if (role != "behavior" && role != "kpi") throw ParseError("panel sidecar: bad role '" + role + "'");
            c.role = role == "behavior" ? SeriesRole::behavior : SeriesRole::kpi;
            c.start_day = p.start_day;
            c.filled.assign(p.length, false);
            for (auto i : jc.at("filled_days").get<std::vector<std::size_t>>()) {
                if (i >= p.length) throw ParseError("panel sidecar: filled day out of range");
                c.filled[i] = true;
            }
            p.columns.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("panel sidecar: ") + e.what());
    }
    csv::Reader reader(values_csv);
    std::vector<std::string> row;
    if (!reader.next(row) || row.size() != p.columns.size() + 1 || row[0] != "date") {
        throw ParseError("panel csv: header does not match sidecar");
    }
    for (std::size_t k = 0; k < p.columns.size(); ++k) {
        if (row[k + 1] != p.columns[k].name) throw ParseError("panel csv: column order does not match sidecar");
    }
    std::size_t i = 0;
    while (reader.next(row)) {
        if (i >= p.length || row.size() != p.columns.size() + 1) throw ParseError("panel csv: malformed row");
        const auto d = parse_day(row[0]);
        if (!d || *d != p.start_day + std::chrono::days{static_cast<long>(i)}) {
            throw ParseError("panel csv: non-contiguous date at row " + std::to_string(i + 1));
        }
        for (std::size_t k = 0; k < p.columns.size(); ++k) {
            char* end = nullptr;
            const double v = std::strtod(row[k + 1].c_str(), &end);
            if (end == row[k + 1].c_str() || *end != '\0') throw ParseError("panel csv: bad number '" + row[k + 1] + "'");
            p.columns[k].values.push_back(v);
        }
        ++i;
    }
    if (i != p.length) throw ParseError("panel csv: row count does not match sidecar");
    return p;
}

} // namespace actorgc
