#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>
#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"
#include "ols.hpp"
#include "parallel.hpp"
#include "timeseries.hpp"

namespace actorgc {

/// P(F > f) for an F(d1, d2) variable.
inline double f_upper_tail(double f, double d1, double d2) {
    if (!(d1 > 0) || !(d2 > 0)) throw NumericError("f_upper_tail: degrees of freedom must be positive");
    if (std::isnan(f)) throw NumericError("f_upper_tail: NaN statistic");
    if (f <= 0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return boost::math::ibeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

struct ArFit {
    Eigen::VectorXd coefficients;  // intercept, own lags 1..L, then cross lags 1..L
    double ssr = 0.0;
    std::size_t observations_used = 0;
    int lag_order = 0;
};

/// The two nested autoregressions behind one directional test.
struct GrangerFit {
    ArFit univariate;
    ArFit bivariate;
    double f_statistic = 0.0;
    double p_value = 1.0;
    double df_num = 0.0;
    double df_den = 0.0;
    bool exact_fit = false;
};

namespace detail {

inline Eigen::MatrixXd lag_design(std::span<const double> y, const std::span<const double>* x, int lags) {
    const auto n = static_cast<Eigen::Index>(y.size()) - lags;
    const Eigen::Index cols = 1 + lags * (x ? 2 : 1);
    Eigen::MatrixXd design(n, cols);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto t = static_cast<std::size_t>(r + lags);
        design(r, 0) = 1.0;
        for (int l = 1; l <= lags; ++l) {
            design(r, l) = y[t - static_cast<std::size_t>(l)];
            if (x) design(r, lags + l) = (*x)[t - static_cast<std::size_t>(l)];
        }
    }
    return design;
}

} // namespace detail

/// Tests whether x Granger-causes y with model order `lags`. Both models carry
/// an intercept and use rows lags..T-1. F has (L, n - 2L - 1) degrees of
/// freedom with n the number of rows in the estimation sample.
inline GrangerFit granger_fit(std::span<const double> x, std::span<const double> y, int lags) {
    if (lags < 1) throw ConfigError("granger: lag order must be >= 1");
    if (x.size() != y.size()) throw ConfigError("granger: series lengths differ");
    const auto T = static_cast<long>(y.size());
    if (T <= 2L * lags + 10) {
        throw InsufficientDataError("granger: " + std::to_string(T) + " observations too few for lag order " +
                                    std::to_string(lags));
    }
    const Eigen::Index n = T - lags;
    Eigen::VectorXd response(n);
    for (Eigen::Index r = 0; r < n; ++r) response[r] = y[static_cast<std::size_t>(r + lags)];

    GrangerFit g;
    try {
        const auto restricted = ols(detail::lag_design(y, nullptr, lags), response);
        const auto unrestricted = ols(detail::lag_design(y, &x, lags), response);
        g.univariate = {restricted.coefficients, restricted.ssr, restricted.observations, lags};
        g.bivariate = {unrestricted.coefficients, unrestricted.ssr, unrestricted.observations, lags};
    } catch (const NumericError& e) {
        throw NumericError(std::string("granger: degenerate series (") + e.what() + ")");
    }
    g.df_num = lags;
    g.df_den = static_cast<double>(n - 2 * lags - 1);
    const double tss = (response.array() - response.mean()).square().sum();
    const double gain = std::max(0.0, g.univariate.ssr - g.bivariate.ssr);
    if (g.bivariate.ssr <= 1e-20 * tss) {
        g.exact_fit = true;
        g.f_statistic = std::numeric_limits<double>::infinity();
        g.p_value = 0.0;
        return g;
    }
    g.f_statistic = (gain / g.df_num) / (g.bivariate.ssr / g.df_den);
    g.p_value = f_upper_tail(g.f_statistic, g.df_num, g.df_den);
    return g;
}

struct GrangerResult {
    std::string source;
    std::string target;
    int lag_order = 0;
    double f_statistic = std::numeric_limits<double>::quiet_NaN();
    double p_value = std::numeric_limits<double>::quiet_NaN();
    bool significant = false;
    double reverse_f_statistic = std::numeric_limits<double>::quiet_NaN();
    double reverse_p_value = std::numeric_limits<double>::quiet_NaN();
    bool asymmetric = false;
    bool exact_fit = false;
    std::size_t observations = 0;
    // Non-empty when the pair could not be tested.
    std::string skipped;

    bool tested() const { return skipped.empty(); }
};

/// Forward test x -> y plus the reverse y -> x at the same order.
inline GrangerResult granger_test(std::span<const double> x, std::span<const double> y, int lags,
                                  std::string source = "x", std::string target = "y", double alpha = 0.05) {
    GrangerResult r;
    r.source = std::move(source);
    r.target = std::move(target);
    r.lag_order = lags;
    const auto forward = granger_fit(x, y, lags);
    const auto reverse = granger_fit(y, x, lags);
    r.f_statistic = forward.f_statistic;
    r.p_value = forward.p_value;
    r.exact_fit = forward.exact_fit;
    r.observations = forward.bivariate.observations_used;
    r.significant = r.p_value < alpha;
    r.reverse_f_statistic = reverse.f_statistic;
    r.reverse_p_value = reverse.p_value;
    r.asymmetric = r.significant && r.reverse_p_value >= alpha;
    return r;
}

/// Every behavior -> KPI pair at every lag order, sorted by (source, target,
/// lag). Pairs that cannot be tested are kept with a skip reason.
inline std::vector<GrangerResult> test_all_pairs(const Panel& panel, const std::vector<int>& lags, double alpha = 0.05,
                                                 std::size_t workers = 1) {
    if (lags.empty()) throw ConfigError("granger: no lag orders to test");
    struct Job {
        const DailySeries* source;
        const DailySeries* target;
        int lag;
    };
    std::vector<Job> jobs;
    for (const auto* s : panel.with_role(SeriesRole::behavior))
        for (const auto* t : panel.with_role(SeriesRole::kpi))
            for (int l : lags) jobs.push_back({s, t, l});
    std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
        if (a.source->name != b.source->name) return a.source->name < b.source->name;
        if (a.target->name != b.target->name) return a.target->name < b.target->name;
        return a.lag < b.lag;
    });
    std::vector<GrangerResult> out(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t k) {
        const auto& j = jobs[k];
        try {
            out[k] = granger_test(j.source->values, j.target->values, j.lag, j.source->name, j.target->name, alpha);
        } catch (const Error& e) {
            GrangerResult r;
            r.source = j.source->name;
            r.target = j.target->name;
            r.lag_order = j.lag;
            r.skipped = e.what();
            out[k] = std::move(r);
        }
    });
    return out;
}

/// Share of significant forward results whose reverse test is not
/// significant. nullopt when there are no significant results.
inline std::optional<double> asymmetry_ratio(const std::vector<GrangerResult>& results, double alpha = 0.05) {
    std::size_t significant = 0, one_way = 0;
    for (const auto& r : results) {
        if (!r.tested() || !(r.p_value < alpha)) continue;
        ++significant;
        if (r.reverse_p_value >= alpha) ++one_way;
    }
    if (significant == 0) return std::nullopt;
    return static_cast<double>(one_way) / static_cast<double>(significant);
}

namespace detail {
inline std::string real_text(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
inline nlohmann::json real_json(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}
inline double json_real(const nlohmann::json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw ParseError("expected a number, found '" + s + "'");
    }
    return j.get<double>();
}
} // namespace detail

inline void write_granger_csv(std::ostream& out, const std::vector<GrangerResult>& results) {
    csv::write_row(out, {"source", "target", "lag", "F", "p", "reverse_p", "significant", "asymmetric", "note"});
    for (const auto& r : results) {
        csv::write_row(out, {r.source, r.target, std::to_string(r.lag_order), detail::real_text(r.f_statistic),
                             detail::real_text(r.p_value), detail::real_text(r.reverse_p_value),
                             r.significant ? "true" : "false", r.asymmetric ? "true" : "false",
                             r.tested() ? (r.exact_fit ? "exact fit" : "") : "skipped: " + r.skipped});
    }
}

/// Flat result list plus a lag-keyed table: table[lag]["X -> Y"] = {p, reverse_p}.
inline nlohmann::json granger_json(const std::vector<GrangerResult>& results, double alpha = 0.05) {
    nlohmann::json list = nlohmann::json::array();
    nlohmann::json table = nlohmann::json::object();
    for (const auto& r : results) {
        list.push_back({{"source", r.source},
                        {"target", r.target},
                        {"lag", r.lag_order},
                        {"F", detail::real_json(r.f_statistic)},
                        {"p", detail::real_json(r.p_value)},
                        {"reverse_F", detail::real_json(r.reverse_f_statistic)},
                        {"reverse_p", detail::real_json(r.reverse_p_value)},
                        {"significant", r.significant},
                        {"asymmetric", r.asymmetric},
                        {"exact_fit", r.exact_fit},
                        {"observations", r.observations},
                        {"skipped", r.skipped}});
        if (r.tested()) {
            table[std::to_string(r.lag_order)][r.source + " -> " + r.target] = {
                {"p", detail::real_json(r.p_value)}, {"reverse_p", detail::real_json(r.reverse_p_value)}};
        }
    }
    const auto ratio = asymmetry_ratio(results, alpha);
    return {{"alpha", alpha},
            {"asymmetry_ratio", ratio ? nlohmann::json(*ratio) : nlohmann::json(nullptr)},
            {"results", list},
            {"table", table}};
}

inline std::vector<GrangerResult> granger_from_json(const nlohmann::json& j) {
    std::vector<GrangerResult> out;
    try {
        for (const auto& e : j.at("results")) {
            GrangerResult r;
            r.source = e.at("source").get<std::string>();
            r.target = e.at("target").get<std::string>();
            r.lag_order = e.at("lag").get<int>();
            r.f_statistic = detail::json_real(e.at("F"));
            r.p_value = detail::json_real(e.at("p"));
            r.reverse_f_statistic = detail::json_real(e.at("reverse_F"));
            r.reverse_p_value = detail::json_real(e.at("reverse_p"));
            r.significant = e.at("significant").get<bool>();
            r.asymmetric = e.at("asymmetric").get<bool>();
            r.exact_fit = e.value("exact_fit", false);
            r.observations = e.value("observations", std::size_t{0});
            r.skipped = e.value("skipped", std::string{});
            out.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("granger results: ") + e.what());
    }
    return out;
}

} // namespace actorgc
