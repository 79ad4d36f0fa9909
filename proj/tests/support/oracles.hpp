#pragma once

// Reference implementations used only by tests. They deliberately avoid the
// library's numerical code paths: plain loops, long double, no Eigen.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <actorgc/event_log.hpp>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;  // row-major

struct LsSolution {
    std::vector<long double> beta;
    long double ssr = 0;
};

/// Least squares through X'X b = X'y, Gaussian elimination with partial pivoting.
inline LsSolution normal_equations(const Matrix& x, const std::vector<double>& y) {
    const std::size_t n = x.size(), p = x.front().size();
    std::vector<std::vector<long double>> a(p, std::vector<long double>(p + 1, 0.0L));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) a[i][j] += static_cast<long double>(x[r][i]) * x[r][j];
            a[i][p] += static_cast<long double>(x[r][i]) * y[r];
        }
    }
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            const long double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= p; ++k) a[r][k] -= f * a[c][k];
        }
    }
    LsSolution s;
    s.beta.resize(p);
    for (std::size_t i = 0; i < p; ++i) s.beta[i] = a[i][p] / a[i][i];
    for (std::size_t r = 0; r < n; ++r) {
        long double fit = 0;
        for (std::size_t i = 0; i < p; ++i) fit += s.beta[i] * x[r][i];
        const long double e = y[r] - fit;
        s.ssr += e * e;
    }
    return s;
}

/// Double-exponential (tanh-sinh) quadrature of f over [a, b]. Halves the step
/// until successive estimates agree.
template <class F>
long double tanh_sinh(F&& f, long double a, long double b) {
    const long double half_pi = std::acos(-1.0L) / 2.0L;
    const long double rad = (b - a) / 2.0L;
    auto term = [&](long double t) -> long double {
        const long double s = half_pi * std::sinh(t);
        const long double c = std::cosh(s);
        const long double w = half_pi * std::cosh(t) / (c * c);
        // Distance from the nearer endpoint, computed without cancellation.
        const long double d = rad / (std::exp(2.0L * std::fabs(s)) + 1.0L) * 2.0L;
        if (!(d > 0)) return 0.0L;
        const long double xv = s < 0 ? a + d : b - d;
        const long double v = f(xv);
        return std::isfinite(static_cast<double>(v)) ? w * v : 0.0L;
    };
    const long double t_max = 4.5L;
    long double h = 0.5L;
    long double sum = term(0);
    for (long double t = h; t <= t_max; t += h) sum += term(t) + term(-t);
    long double estimate = sum * h * rad;
    for (int level = 0; level < 14; ++level) {
        h /= 2.0L;
        for (long double t = h; t <= t_max; t += 2.0L * h) sum += term(t) + term(-t);
        const long double next = sum * h * rad;
        if (std::fabs(next - estimate) <= 1e-17L * std::fabs(next) && level >= 3) return next;
        estimate = next;
    }
    return estimate;
}

/// Upper tail of F(d1, d2) at f, integrating the beta density of
/// d2/(d2 + d1 F) ~ Beta(d2/2, d1/2) in log space.
inline double f_tail(double f, double d1, double d2) {
    if (f <= 0) return 1.0;
    const long double a = d2 / 2.0L, b = d1 / 2.0L;
    const long double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const long double x = d2 / (d2 + d1 * static_cast<long double>(f));
    auto density = [&](long double t) {
        return std::exp((a - 1) * std::log(t) + (b - 1) * std::log1p(-t) - log_beta);
    };
    // Split at the mode so the peak lies on an endpoint of each piece.
    const long double mode = (a > 1 && b > 1) ? (a - 1) / (a + b - 2) : 0.5L;
    if (mode > 0 && mode < x) return static_cast<double>(tanh_sinh(density, 0, mode) + tanh_sinh(density, mode, x));
    return static_cast<double>(tanh_sinh(density, 0, x));
}

struct GrangerReference {
    double f = 0, p = 0, ssr_restricted = 0, ssr_full = 0;
    std::size_t rows = 0;
};

/// Nested autoregressions with intercept on rows L..T-1.
inline GrangerReference granger(const std::vector<double>& x, const std::vector<double>& y, int lags) {
    const std::size_t L = static_cast<std::size_t>(lags), T = y.size();
    Matrix restricted, full;
    std::vector<double> response;
    for (std::size_t t = L; t < T; ++t) {
        std::vector<double> r{1.0}, u{1.0};
        for (std::size_t l = 1; l <= L; ++l) r.push_back(y[t - l]);
        u = r;
        for (std::size_t l = 1; l <= L; ++l) u.push_back(x[t - l]);
        restricted.push_back(r);
        full.push_back(u);
        response.push_back(y[t]);
    }
    GrangerReference g;
    g.rows = response.size();
    g.ssr_restricted = static_cast<double>(normal_equations(restricted, response).ssr);
    g.ssr_full = static_cast<double>(normal_equations(full, response).ssr);
    const double d1 = lags, d2 = static_cast<double>(g.rows) - 2.0 * lags - 1.0;
    g.f = ((g.ssr_restricted - g.ssr_full) / d1) / (g.ssr_full / d2);
    g.p = f_tail(g.f, d1, d2);
    return g;
}

/// Transition as (from position, to position, code), evaluated by scanning the
/// whole log for witnesses. Pairs with a missing actor are omitted.
using Labeled = std::tuple<std::size_t, std::size_t, std::string>;

inline std::vector<Labeled> brute_force_classify(const actorgc::EventLog& log) {
    std::vector<Labeled> out;
    const auto& ev = log.events;
    for (std::size_t j = 0; j < ev.size(); ++j) {
        // Previous event of the same case in log order.
        std::optional<std::size_t> i;
        for (std::size_t k = j; k-- > 0;) {
            if (ev[k].case_id == ev[j].case_id) {
                i = k;
                break;
            }
        }
        if (!i || !ev[*i].actor || !ev[j].actor) continue;
        const auto& ri = *ev[*i].actor;
        const auto& rj = *ev[j].actor;
        bool witness = false;
        for (const auto& e : ev) {
            if (e.actor && *e.actor == rj && e.case_id != ev[j].case_id && ev[*i].timestamp < e.timestamp &&
                e.timestamp < ev[j].timestamp) {
                witness = true;
                break;
            }
        }
        std::string code = ri == rj ? (witness ? "I" : "C") : (witness ? "HB" : "HI");
        out.emplace_back(*i, j, code);
    }
    return out;
}

/// Random log with integer-minute timestamps over a short window so that
/// ties and interleavings are common.
inline actorgc::EventLog random_log(std::mt19937_64& rng, std::size_t events, std::size_t cases, std::size_t actors,
                                    double missing_actor = 0.0, int minutes = 2000) {
    using namespace std::chrono;
    actorgc::EventLog log;
    std::uniform_int_distribution<std::size_t> pick_case(0, cases - 1), pick_actor(0, actors - 1);
    std::uniform_int_distribution<int> pick_minute(0, minutes);
    std::bernoulli_distribution no_actor(missing_actor);
    const auto epoch = sys_days{year{2021} / 3 / 1};
    for (std::size_t k = 0; k < events; ++k) {
        actorgc::Event e;
        e.case_id = "c" + std::to_string(pick_case(rng));
        e.activity = "a" + std::to_string(k % 7);
        e.timestamp = time_point_cast<milliseconds>(epoch + std::chrono::minutes{pick_minute(rng)});
        if (!no_actor(rng)) e.actor = "r" + std::to_string(pick_actor(rng));
        e.sequence_index = k;
        log.events.push_back(std::move(e));
    }
    return log;
}

/// Insertion-order-preserving group-by of case start day -> mean duration in days.
inline std::map<std::int64_t, double> daily_mean_tt(const actorgc::EventLog& log) {
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> span;  // case -> (min ms, max ms)
    for (const auto& e : log.events) {
        const auto ms = e.timestamp.time_since_epoch().count();
        auto it = span.find(e.case_id);
        if (it == span.end()) span[e.case_id] = {ms, ms};
        else {
            it->second.first = std::min(it->second.first, ms);
            it->second.second = std::max(it->second.second, ms);
        }
    }
    std::map<std::int64_t, std::pair<double, int>> acc;
    for (const auto& [c, s] : span) {
        const std::int64_t day = s.first >= 0 ? s.first / 86400000 : -((-s.first + 86399999) / 86400000);
        acc[day].first += static_cast<double>(s.second - s.first) / 86400000.0;
        acc[day].second += 1;
    }
    std::map<std::int64_t, double> out;
    for (const auto& [d, a] : acc) out[d] = a.first / a.second;
    return out;
}

/// Recursive-descent checker for the DOT language subset used by graph
/// exports: optional strict, graph/digraph, optional ID, statements of node,
/// edge, attribute and ID=ID kinds, attribute lists, subgraphs.
class DotChecker {
public:
    explicit DotChecker(std::string text) : s_(std::move(text)) {}

    bool check(std::string* error = nullptr) {
        try {
            tokenize();
            parse_graph();
            if (pos_ != tokens_.size()) fail("trailing tokens");
            return true;
        } catch (const std::string& e) {
            if (error) *error = e;
            return false;
        }
    }

private:
    enum class Kind { id, punct, edge_op };
    struct Token {
        Kind kind;
        std::string text;
    };

    [[noreturn]] void fail(const std::string& m) { throw m; }

    void tokenize() {
        std::size_t i = 0;
        while (i < s_.size()) {
            const char c = s_[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else if (c == '/' && i + 1 < s_.size() && s_[i + 1] == '/') {
                while (i < s_.size() && s_[i] != '\n') ++i;
            } else if (c == '/' && i + 1 < s_.size() && s_[i + 1] == '*') {
                const auto end = s_.find("*/", i + 2);
                if (end == std::string::npos) fail("unterminated comment");
                i = end + 2;
            } else if (c == '"') {
                std::string v;
                ++i;
                while (true) {
                    if (i >= s_.size()) fail("unterminated string");
                    if (s_[i] == '\\' && i + 1 < s_.size()) {
                        v += s_.substr(i, 2);
                        i += 2;
                    } else if (s_[i] == '"') {
                        ++i;
                        break;
                    } else {
                        v += s_[i++];
                    }
                }
                tokens_.push_back({Kind::id, v});
            } else if (c == '-' && i + 1 < s_.size() && (s_[i + 1] == '>' || s_[i + 1] == '-')) {
                tokens_.push_back({Kind::edge_op, s_.substr(i, 2)});
                i += 2;
            } else if (std::string("{}[];,=:").find(c) != std::string::npos) {
                tokens_.push_back({Kind::punct, std::string(1, c)});
                ++i;
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80) {
                std::size_t j = i;
                while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_' ||
                                         static_cast<unsigned char>(s_[j]) >= 0x80))
                    ++j;
                tokens_.push_back({Kind::id, s_.substr(i, j - i)});
                i = j;
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
                std::size_t j = i + (c == '-' ? 1 : 0);
                bool dot = false, digits = false;
                while (j < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[j])) || (s_[j] == '.' && !dot))) {
                    dot = dot || s_[j] == '.';
                    digits = digits || s_[j] != '.';
                    ++j;
                }
                if (!digits) fail("bad numeral");
                tokens_.push_back({Kind::id, s_.substr(i, j - i)});
                i = j;
            } else {
                fail(std::string("unexpected character '") + c + "'");
            }
        }
    }

    bool at(const char* p) const { return pos_ < tokens_.size() && tokens_[pos_].kind == Kind::punct && tokens_[pos_].text == p; }
    bool at_id() const { return pos_ < tokens_.size() && tokens_[pos_].kind == Kind::id; }
    bool at_keyword(const char* k) const {
        if (!at_id()) return false;
        std::string t = tokens_[pos_].text;
        std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        return t == k;
    }
    void expect(const char* p) {
        if (!at(p)) fail(std::string("expected '") + p + "'");
        ++pos_;
    }
    void expect_id() {
        if (!at_id()) fail("expected ID");
        ++pos_;
    }

    void parse_graph() {
        if (at_keyword("strict")) ++pos_;
        if (at_keyword("digraph")) directed_ = true;
        else if (!at_keyword("graph")) fail("expected graph or digraph");
        ++pos_;
        if (at_id()) ++pos_;
        expect("{");
        parse_stmt_list();
        expect("}");
    }

    void parse_stmt_list() {
        while (pos_ < tokens_.size() && !at("}")) {
            parse_stmt();
            if (at(";")) ++pos_;
        }
    }

    void parse_attr_list() {
        while (at("[")) {
            ++pos_;
            while (!at("]")) {
                expect_id();
                expect("=");
                expect_id();
                if (at(";") || at(",")) ++pos_;
            }
            expect("]");
        }
    }

    void parse_node_id() {
        expect_id();
        if (at(":")) {
            ++pos_;
            expect_id();
            if (at(":")) {
                ++pos_;
                expect_id();
            }
        }
    }

    void parse_subgraph() {
        if (at_keyword("subgraph")) {
            ++pos_;
            if (at_id()) ++pos_;
        }
        expect("{");
        parse_stmt_list();
        expect("}");
    }

    void parse_edge_rhs() {
        while (pos_ < tokens_.size() && tokens_[pos_].kind == Kind::edge_op) {
            if ((tokens_[pos_].text == "->") != directed_) fail("edge operator does not match graph kind");
            ++pos_;
            if (at("{") || at_keyword("subgraph")) parse_subgraph();
            else parse_node_id();
        }
    }

    void parse_stmt() {
        if (at_keyword("graph") || at_keyword("node") || at_keyword("edge")) {
            ++pos_;
            if (!at("[")) fail("attribute statement needs an attribute list");
            parse_attr_list();
            return;
        }
        if (at("{") || at_keyword("subgraph")) {
            parse_subgraph();
            parse_edge_rhs();
            parse_attr_list();
            return;
        }
        if (!at_id()) fail("expected statement");
        if (pos_ + 1 < tokens_.size() && tokens_[pos_ + 1].kind == Kind::punct && tokens_[pos_ + 1].text == "=") {
            pos_ += 2;
            expect_id();
            return;
        }
        parse_node_id();
        parse_edge_rhs();
        parse_attr_list();
    }

    std::string s_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    bool directed_ = false;
};

inline bool valid_dot(const std::string& text, std::string* error = nullptr) { return DotChecker(text).check(error); }

} // namespace oracle
