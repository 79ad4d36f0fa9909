#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "granger.hpp"
#include "timeseries.hpp"

namespace actorgc {

struct GraphNode {
    std::string name;
    SeriesRole role = SeriesRole::behavior;
};

struct LagPValue {
    int lag = 0;
    double p_value = 1.0;
    double reverse_p_value = 1.0;
};

struct GraphEdge {
    std::string source;
    std::string target;
    std::vector<LagPValue> lags;  // every tested lag, ascending
    std::vector<int> significant_lags;
    double min_p = 1.0;
    // Every significant lag has a non-significant reverse test.
    bool asymmetric = false;
};

struct CausalGraph {
    std::vector<GraphNode> nodes;  // sorted by name
    std::vector<GraphEdge> edges;  // sorted by (source, target)
    double alpha = 0.05;
};

/// Keeps each (source, target) pair with at least one lag below alpha.
/// Sources are behavior series and targets KPI series.
inline CausalGraph build_graph(const std::vector<GrangerResult>& results, double alpha = 0.05) {
    CausalGraph g;
    g.alpha = alpha;
    std::map<std::string, SeriesRole> nodes;
    std::map<std::pair<std::string, std::string>, GraphEdge> pairs;
    for (const auto& r : results) {
        nodes.try_emplace(r.source, SeriesRole::behavior);
        nodes.try_emplace(r.target, SeriesRole::kpi);
        if (!r.tested() || r.source == r.target) continue;
        auto& e = pairs[{r.source, r.target}];
        e.source = r.source;
        e.target = r.target;
        e.lags.push_back({r.lag_order, r.p_value, r.reverse_p_value});
    }
    for (const auto& [name, role] : nodes) g.nodes.push_back({name, role});
    for (auto& [key, e] : pairs) {
        std::sort(e.lags.begin(), e.lags.end(), [](const LagPValue& a, const LagPValue& b) { return a.lag < b.lag; });
        e.asymmetric = true;
        for (const auto& l : e.lags) {
            if (!(l.p_value < alpha)) continue;
            e.significant_lags.push_back(l.lag);
            e.min_p = std::min(e.min_p, l.p_value);
            if (!(l.reverse_p_value >= alpha)) e.asymmetric = false;
        }
        if (!e.significant_lags.empty()) g.edges.push_back(std::move(e));
    }
    return g;
}

/// Edges by ascending min_p, ties by (source, target); at most k.
inline std::vector<GraphEdge> top_edges(const CausalGraph& graph, std::size_t k) {
    auto edges = graph.edges;
    std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
        if (a.min_p != b.min_p) return a.min_p < b.min_p;
        if (a.source != b.source) return a.source < b.source;
        return a.target < b.target;
    });
    if (edges.size() > k) edges.resize(k);
    return edges;
}

namespace detail {
inline std::string dot_id(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c == '\n' ? ' ' : c);
    }
    return out + "\"";
}
inline std::string three_significant(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", p);
    return buf;
}
} // namespace detail

/// Behavior nodes are boxes, KPI nodes ellipses. Edge labels carry min_p;
/// bidirectional (non-asymmetric) edges are dashed.
inline std::string export_dot(const CausalGraph& graph) {
    std::string out = "digraph {\n  rankdir=LR;\n";
    for (const auto& n : graph.nodes) {
        out += "  " + detail::dot_id(n.name) + " [shape=" + (n.role == SeriesRole::behavior ? "box" : "ellipse") + "];\n";
    }
    for (const auto& e : graph.edges) {
        out += "  " + detail::dot_id(e.source) + " -> " + detail::dot_id(e.target) + " [label=" +
               detail::dot_id(detail::three_significant(e.min_p));
        if (!e.asymmetric) out += ", style=dashed";
        out += "];\n";
    }
    return out + "}\n";
}

inline nlohmann::json graph_json(const CausalGraph& graph) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : graph.nodes) nodes.push_back({{"name", n.name}, {"role", role_name(n.role)}});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : graph.edges) {
        nlohmann::json lags = nlohmann::json::array();
        for (const auto& l : e.lags) {
            lags.push_back({{"lag", l.lag}, {"p", detail::real_json(l.p_value)}, {"reverse_p", detail::real_json(l.reverse_p_value)}});
        }
        edges.push_back({{"source", e.source},
                         {"target", e.target},
                         {"min_p", e.min_p},
                         {"significant_lags", e.significant_lags},
                         {"asymmetric", e.asymmetric},
                         {"lags", lags}});
    }
    return {{"alpha", graph.alpha}, {"nodes", nodes}, {"edges", edges}};
}

} // namespace actorgc
