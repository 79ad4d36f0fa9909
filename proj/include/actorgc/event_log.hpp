#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "csv.hpp"
#include "diagnostics.hpp"
#include "error.hpp"
#include "time.hpp"
#include "xml.hpp"

namespace actorgc {

struct Event {
    std::string case_id;
    std::string activity;
    Timestamp timestamp{};
    std::optional<std::string> actor;
    // Ordinal of the event in its source file; breaks timestamp ties.
    std::size_t sequence_index = 0;
    // Values aligned with EventLog::attribute_names. Missing trailing entries
    // and empty strings both mean "absent".
    std::vector<std::string> attributes;

    friend bool operator==(const Event&, const Event&) = default;
};

struct EventLog {
    std::vector<Event> events;
    std::vector<std::string> attribute_names;
    // Number of XES traces that had no concept:name and got a synthesized id.
    std::size_t synthesized_case_ids = 0;

    std::optional<std::size_t> attribute_slot(std::string_view name) const {
        const auto it = std::find(attribute_names.begin(), attribute_names.end(), name);
        if (it == attribute_names.end()) return std::nullopt;
        return static_cast<std::size_t>(it - attribute_names.begin());
    }

    const std::string* attribute(const Event& e, std::size_t slot) const {
        if (slot >= e.attributes.size() || e.attributes[slot].empty()) return nullptr;
        return &e.attributes[slot];
    }
};

struct LogSummary {
    std::size_t events = 0;
    std::size_t cases = 0;
    std::size_t actors = 0;
    std::size_t activities = 0;
    std::size_t missing_actor = 0;
    std::optional<Timestamp> first;
    std::optional<Timestamp> last;
};

// A case's events as positions into EventLog::events, in log order.
struct Trace {
    std::string case_id;
    std::vector<std::size_t> positions;
};

struct ColumnMapping {
    std::string case_column = "case";
    std::string activity_column = "activity";
    std::string timestamp_column = "timestamp";
    // Empty means the source has no actor column.
    std::string actor_column = "actor";
};

struct CsvOptions {
    ColumnMapping mapping;
    // Empty selects RFC 3339.
    std::string timestamp_format;
    char delimiter = ',';
};

inline LogSummary summarize(const EventLog& log) {
    LogSummary s;
    s.events = log.events.size();
    std::unordered_set<std::string_view> cases, actors, activities;
    for (const auto& e : log.events) {
        cases.insert(e.case_id);
        activities.insert(e.activity);
        if (e.actor) actors.insert(*e.actor);
        else ++s.missing_actor;
        if (!s.first || e.timestamp < *s.first) s.first = e.timestamp;
        if (!s.last || e.timestamp > *s.last) s.last = e.timestamp;
    }
    s.cases = cases.size();
    s.actors = actors.size();
    s.activities = activities.size();
    return s;
}

/// Stable sort by (timestamp, sequence_index). Idempotent.
inline EventLog validate_and_sort(EventLog log) {
    std::stable_sort(log.events.begin(), log.events.end(), [](const Event& a, const Event& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.sequence_index < b.sequence_index;
    });
    return log;
}

inline bool is_sorted_log(const EventLog& log) {
    return std::is_sorted(log.events.begin(), log.events.end(), [](const Event& a, const Event& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.sequence_index < b.sequence_index;
    });
}

/// Groups events by case, traces ordered by the position of their first event.
inline std::vector<Trace> traces(const EventLog& log) {
    std::vector<Trace> out;
    std::unordered_map<std::string_view, std::size_t> slot;
    for (std::size_t i = 0; i < log.events.size(); ++i) {
        const auto& id = log.events[i].case_id;
        auto [it, inserted] = slot.try_emplace(id, out.size());
        if (inserted) out.push_back(Trace{id, {}});
        out[it->second].positions.push_back(i);
    }
    return out;
}

inline EventLog parse_csv(std::istream& source, const CsvOptions& options = {}) {
    csv::Reader reader(source, options.delimiter);
    std::vector<std::string> header;
    if (!reader.next(header)) throw InsufficientDataError("event log is empty (no header row)");

    auto find_column = [&](const std::string& name, const char* role) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw ParseError(std::string("schema: mapped ") + role + " column '" + name + "' not found in header");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto& m = options.mapping;
    const std::size_t case_col = find_column(m.case_column, "case");
    const std::size_t act_col = find_column(m.activity_column, "activity");
    const std::size_t ts_col = find_column(m.timestamp_column, "timestamp");
    const std::optional<std::size_t> actor_col =
        m.actor_column.empty() ? std::nullopt : std::optional{find_column(m.actor_column, "actor")};

    EventLog log;
    std::vector<std::size_t> attr_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == case_col || c == act_col || c == ts_col || (actor_col && c == *actor_col)) continue;
        attr_cols.push_back(c);
        log.attribute_names.push_back(header[c]);
    }

    std::vector<std::size_t> bad_timestamps;
    std::vector<std::string> row;
    std::size_t row_number = 0;
    while (reader.next(row)) {
        ++row_number;
        if (row.size() != header.size()) {
            throw ParseError("row " + std::to_string(row_number) + ": expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(row.size()));
        }
        Event e;
        e.case_id = row[case_col];
        e.activity = row[act_col];
        if (e.case_id.empty()) throw ParseError("row " + std::to_string(row_number) + ": empty case id");
        if (e.activity.empty()) throw ParseError("row " + std::to_string(row_number) + ": empty activity");
        const auto ts = parse_timestamp(row[ts_col], options.timestamp_format);
        if (!ts) {
            bad_timestamps.push_back(row_number);
            continue;
        }
        e.timestamp = *ts;
        if (actor_col && !row[*actor_col].empty()) e.actor = row[*actor_col];
        e.sequence_index = log.events.size();
        e.attributes.reserve(attr_cols.size());
        for (auto c : attr_cols) e.attributes.push_back(std::move(row[c]));
        while (!e.attributes.empty() && e.attributes.back().empty()) e.attributes.pop_back();
        log.events.push_back(std::move(e));
    }
    if (!bad_timestamps.empty()) {
        std::ostringstream msg;
        msg << bad_timestamps.size() << " row(s) with unparseable timestamps; first rows:";
        for (std::size_t i = 0; i < std::min<std::size_t>(10, bad_timestamps.size()); ++i) msg << ' ' << bad_timestamps[i];
        throw ParseError(msg.str());
    }
    if (log.events.empty()) throw InsufficientDataError("event log has a header but no events");
    return log;
}

/// Canonical CSV: case,activity,timestamp,actor followed by attribute columns.
inline void write_csv(std::ostream& out, const EventLog& log) {
    std::vector<std::string> row{"case", "activity", "timestamp", "actor"};
    row.insert(row.end(), log.attribute_names.begin(), log.attribute_names.end());
    csv::write_row(out, row);
    for (const auto& e : log.events) {
        row.assign({e.case_id, e.activity, format_timestamp(e.timestamp), e.actor.value_or("")});
        for (std::size_t a = 0; a < log.attribute_names.size(); ++a) {
            row.push_back(a < e.attributes.size() ? e.attributes[a] : std::string{});
        }
        csv::write_row(out, row);
    }
}

namespace detail {

class XesHandler {
public:
    EventLog log;
    std::size_t missing_timestamp = 0;
    std::vector<std::string> missing_timestamp_where;

    void start_element(std::string_view name, const std::vector<xml::Attribute>& attrs, std::size_t offset) {
        const std::string_view parent = stack_.empty() ? std::string_view{} : std::string_view{stack_.back()};
        stack_.emplace_back(name);
        if (name == "trace" && parent == "log") {
            in_trace_ = true;
            ++trace_ordinal_;
            trace_case_.reset();
            trace_attrs_.clear();
            pending_.clear();
            return;
        }
        if (name == "event" && parent == "trace") {
            in_event_ = true;
            ++event_ordinal_;
            current_ = Event{};
            has_time_ = false;
            has_name_ = false;
            return;
        }
        if (parent != "trace" && parent != "event") return;
        const std::string* key = nullptr;
        const std::string* value = nullptr;
        for (const auto& a : attrs) {
            if (a.name == "key") key = &a.value;
            else if (a.name == "value") value = &a.value;
        }
        if (!key || !value) return;
        if (parent == "trace" && in_trace_ && !in_event_) {
            if (*key == "concept:name") trace_case_ = *value;
            else trace_attrs_.emplace_back("case:" + *key, *value);
            return;
        }
        if (parent == "event" && in_event_) {
            if (*key == "concept:name") {
                current_.activity = *value;
                has_name_ = true;
            } else if (*key == "time:timestamp" && name == "date") {
                const auto ts = parse_rfc3339(*value);
                if (!ts) throw ParseError("xes: unparseable time:timestamp '" + *value + "' at byte offset " + std::to_string(offset));
                current_.timestamp = *ts;
                has_time_ = true;
            } else if (*key == "org:resource") {
                if (!value->empty()) current_.actor = *value;
            } else {
                set_attribute(current_, *key, *value);
            }
        }
    }

    void end_element(std::string_view name) {
        stack_.pop_back();
        const std::string_view parent = stack_.empty() ? std::string_view{} : std::string_view{stack_.back()};
        if (name == "event" && parent == "trace" && in_event_) {
            in_event_ = false;
            if (!has_time_) {
                ++missing_timestamp;
                if (missing_timestamp_where.size() < 10) {
                    missing_timestamp_where.push_back("trace " + std::to_string(trace_ordinal_) + " event " +
                                                      std::to_string(event_ordinal_));
                }
                return;
            }
            if (!has_name_ || current_.activity.empty()) {
                throw ParseError("xes: event " + std::to_string(event_ordinal_) + " in trace " +
                                 std::to_string(trace_ordinal_) + " has no concept:name");
            }
            pending_.push_back(std::move(current_));
        } else if (name == "trace" && parent == "log" && in_trace_) {
            in_trace_ = false;
            std::string case_id;
            if (trace_case_ && !trace_case_->empty()) {
                case_id = *trace_case_;
            } else {
                case_id = "trace_" + std::to_string(trace_ordinal_);
                ++log.synthesized_case_ids;
            }
            for (auto& e : pending_) {
                e.case_id = case_id;
                for (const auto& [k, v] : trace_attrs_) set_attribute(e, k, v);
                e.sequence_index = log.events.size();
                while (!e.attributes.empty() && e.attributes.back().empty()) e.attributes.pop_back();
                log.events.push_back(std::move(e));
            }
            pending_.clear();
        }
    }

private:
    void set_attribute(Event& e, const std::string& key, const std::string& value) {
        auto it = slots_.find(key);
        if (it == slots_.end()) {
            it = slots_.emplace(key, log.attribute_names.size()).first;
            log.attribute_names.push_back(key);
        }
        if (e.attributes.size() <= it->second) e.attributes.resize(it->second + 1);
        e.attributes[it->second] = value;
    }

    std::vector<std::string> stack_;
    bool in_trace_ = false;
    bool in_event_ = false;
    std::size_t trace_ordinal_ = 0;
    std::size_t event_ordinal_ = 0;
    std::optional<std::string> trace_case_;
    std::vector<std::pair<std::string, std::string>> trace_attrs_;
    std::vector<Event> pending_;
    Event current_;
    bool has_time_ = false;
    bool has_name_ = false;
    std::unordered_map<std::string, std::size_t> slots_;
};

inline std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

} // namespace detail

/// Parses the concept/time/org subset of XES. Trace attributes other than
/// concept:name are copied onto each event as "case:<key>".
inline EventLog parse_xes(std::string_view document) {
    detail::XesHandler handler;
    xml::parse(document, handler);
    if (handler.missing_timestamp > 0) {
        std::string msg = "xes: " + std::to_string(handler.missing_timestamp) + " event(s) without time:timestamp:";
        for (const auto& w : handler.missing_timestamp_where) msg += " [" + w + "]";
        throw ParseError(msg);
    }
    if (handler.log.synthesized_case_ids > 0) {
        warn("xes: " + std::to_string(handler.log.synthesized_case_ids) +
             " trace(s) without concept:name were given synthesized case ids");
    }
    if (handler.log.events.empty()) throw InsufficientDataError("xes: log contains no events");
    return std::move(handler.log);
}

inline EventLog parse_xes(std::istream& source) {
    const std::string doc{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
    return parse_xes(std::string_view{doc});
}

inline void write_xes(std::ostream& out, const EventLog& log) {
    using detail::xml_escape;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<log xes.version=\"1.0\" xes.features=\"\">\n"
        << "  <extension name=\"Concept\" prefix=\"concept\" uri=\"http://www.xes-standard.org/concept.xesext\"/>\n"
        << "  <extension name=\"Time\" prefix=\"time\" uri=\"http://www.xes-standard.org/time.xesext\"/>\n"
        << "  <extension name=\"Organizational\" prefix=\"org\" uri=\"http://www.xes-standard.org/org.xesext\"/>\n";
    for (const auto& trace : traces(log)) {
        out << "  <trace>\n    <string key=\"concept:name\" value=\"" << xml_escape(trace.case_id) << "\"/>\n";
        std::vector<bool> written(log.attribute_names.size(), false);
        for (auto pos : trace.positions) {
            const auto& e = log.events[pos];
            for (std::size_t a = 0; a < e.attributes.size(); ++a) {
                const auto& name = log.attribute_names[a];
                if (written[a] || e.attributes[a].empty() || name.rfind("case:", 0) != 0) continue;
                written[a] = true;
                out << "    <string key=\"" << xml_escape(name.substr(5)) << "\" value=\"" << xml_escape(e.attributes[a])
                    << "\"/>\n";
            }
        }
        for (auto pos : trace.positions) {
            const auto& e = log.events[pos];
            out << "    <event>\n      <string key=\"concept:name\" value=\"" << xml_escape(e.activity) << "\"/>\n";
            if (e.actor) out << "      <string key=\"org:resource\" value=\"" << xml_escape(*e.actor) << "\"/>\n";
            out << "      <date key=\"time:timestamp\" value=\"" << format_timestamp(e.timestamp) << "\"/>\n";
            for (std::size_t a = 0; a < e.attributes.size(); ++a) {
                const auto& name = log.attribute_names[a];
                if (e.attributes[a].empty() || name.rfind("case:", 0) == 0) continue;
                out << "      <string key=\"" << xml_escape(name) << "\" value=\"" << xml_escape(e.attributes[a]) << "\"/>\n";
            }
            out << "    </event>\n";
        }
        out << "  </trace>\n";
    }
    out << "</log>\n";
}

enum class LogFormat { csv, xes };

inline EventLog load_log(const std::string& path, LogFormat format, const CsvOptions& options = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open event log '" + path + "'");
    return format == LogFormat::csv ? parse_csv(in, options) : parse_xes(in);
}

} // namespace actorgc
