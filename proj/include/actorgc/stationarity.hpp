#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "diagnostics.hpp"
#include "error.hpp"
#include "ols.hpp"
#include "parallel.hpp"
#include "timeseries.hpp"

namespace actorgc {

struct CriticalValues {
    double one_pct = 0.0;
    double five_pct = 0.0;
    double ten_pct = 0.0;
};

/// Constant-only Dickey-Fuller critical values from MacKinnon's (2010)
/// response surface: b0 + b1/n + b2/n^2 + b3/n^3.
inline CriticalValues adf_critical_values(std::size_t observations) {
    const double n = static_cast<double>(observations);
    auto surface = [n](double b0, double b1, double b2, double b3) {
        return b0 + b1 / n + b2 / (n * n) + b3 / (n * n * n);
    };
    return {surface(-3.43035, -6.5393, -16.786, -79.433), surface(-2.86154, -2.8903, -4.234, -40.040),
            surface(-2.56677, -1.5384, -2.809, 0.0)};
}

struct AdfResult {
    double statistic = 0.0;
    int chosen_lag = 0;
    int max_lag = 0;
    double criterion_value = 0.0;  // BIC of the chosen lag on the common sample
    std::size_t observations = 0;  // rows of the reported regression
    CriticalValues critical_values;
    bool stationary_at_5pct = false;

    bool rejects_unit_root(double alpha) const {
        if (alpha == 0.01) return statistic < critical_values.one_pct;
        if (alpha == 0.05) return statistic < critical_values.five_pct;
        if (alpha == 0.10) return statistic < critical_values.ten_pct;
        throw ConfigError("adf: alpha must be one of 0.01, 0.05, 0.10");
    }
};

/// Schwert's rule: floor(12 * (n / 100)^(1/4)).
inline int default_adf_max_lag(std::size_t n) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

namespace detail {

// Rows k in [first, n-1) of: dy[k] ~ 1 + y[k] + dy[k-1..k-lags], with dy[k] = y[k+1] - y[k].
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> adf_regression(std::span<const double> y, int lags,
                                                                   std::size_t first) {
    const std::size_t n_dy = y.size() - 1;
    const auto rows = static_cast<Eigen::Index>(n_dy - first);
    Eigen::MatrixXd design(rows, 2 + lags);
    Eigen::VectorXd response(rows);
    auto dy = [&](std::size_t k) { return y[k + 1] - y[k]; };
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t k = first + static_cast<std::size_t>(r);
        response[r] = dy(k);
        design(r, 0) = 1.0;
        design(r, 1) = y[k];
        for (int i = 1; i <= lags; ++i) design(r, 1 + i) = dy(k - static_cast<std::size_t>(i));
    }
    return {std::move(design), std::move(response)};
}

} // namespace detail

/// Augmented Dickey-Fuller test with constant, lag order chosen by BIC over
/// 0..max_lag on a common sample, then refit on the largest sample available
/// for that order. max_lag < 0 selects the Schwert default.
inline AdfResult adf_test(std::span<const double> series, int max_lag = -1) {
    const std::size_t n = series.size();
    if (max_lag < 0) max_lag = default_adf_max_lag(n);
    if (n < static_cast<std::size_t>(max_lag) + 10) {
        throw InsufficientDataError("adf: series of length " + std::to_string(n) + " too short for max lag " +
                                    std::to_string(max_lag));
    }
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    if (*lo == *hi) throw NumericError("adf: constant series");
    for (double v : series)
        if (!std::isfinite(v)) throw NumericError("adf: non-finite value in series");

    AdfResult out;
    out.max_lag = max_lag;
    double best = std::numeric_limits<double>::infinity();
    for (int p = 0; p <= max_lag; ++p) {
        const auto [design, response] = detail::adf_regression(series, p, static_cast<std::size_t>(max_lag));
        double bic;
        try {
            const auto fit = ols(design, response);
            const double nobs = static_cast<double>(fit.observations);
            if (fit.ssr <= 0.0) continue;
            bic = nobs * std::log(fit.ssr / nobs) + static_cast<double>(2 + p) * std::log(nobs);
        } catch (const Error&) {
            continue;
        }
        if (bic < best) {
            best = bic;
            out.chosen_lag = p;
        }
    }
    if (!std::isfinite(best)) throw NumericError("adf: no lag order gave a usable regression");
    out.criterion_value = best;

    const auto [design, response] = detail::adf_regression(series, out.chosen_lag, static_cast<std::size_t>(out.chosen_lag));
    OlsFit fit;
    try {
        fit = ols(design, response, true);
    } catch (const NumericError& e) {
        throw NumericError(std::string("adf: degenerate regression (") + e.what() + ")");
    }
    if (!(fit.standard_errors[1] > 0.0)) throw NumericError("adf: exact fit, statistic undefined");
    out.statistic = fit.coefficients[1] / fit.standard_errors[1];
    out.observations = fit.observations;
    out.critical_values = adf_critical_values(fit.observations);
    out.stationary_at_5pct = out.statistic < out.critical_values.five_pct;
    return out;
}

/// out[t] = in[t+1] - in[t].
inline std::vector<double> difference(std::span<const double> series) {
    if (series.size() < 2) throw InsufficientDataError("difference: need at least two values");
    std::vector<double> out(series.size() - 1);
    for (std::size_t t = 0; t + 1 < series.size(); ++t) out[t] = series[t + 1] - series[t];
    return out;
}

struct ColumnStationarity {
    std::string name;
    std::optional<AdfResult> original;
    bool differenced = false;
    std::optional<AdfResult> after_differencing;
    // Differenced but still not rejecting a unit root.
    bool still_nonstationary = false;
    // Why the column could not be tested (constant, too short, ...).
    std::string untested_reason;
};

struct StationarityReport {
    std::vector<ColumnStationarity> columns;
    std::size_t rows_trimmed = 0;
    double alpha = 0.05;
};

/// Differences every column that fails the ADF test once; if any column was
/// differenced, every column drops its first row so the grid stays aligned.
inline std::pair<Panel, StationarityReport> ensure_stationary(const Panel& panel, double alpha = 0.05,
                                                              int max_lag = -1, std::size_t workers = 1) {
    StationarityReport report;
    report.alpha = alpha;
    report.columns.resize(panel.columns.size());
    parallel_for(panel.columns.size(), workers, [&](std::size_t k) {
        const auto& c = panel.columns[k];
        auto& rep = report.columns[k];
        rep.name = c.name;
        try {
            rep.original = adf_test(c.values, max_lag);
            rep.differenced = !rep.original->rejects_unit_root(alpha);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            rep.untested_reason = e.what();
        }
        if (rep.differenced) {
            const auto d = difference(c.values);
            try {
                rep.after_differencing = adf_test(d, max_lag);
                rep.still_nonstationary = !rep.after_differencing->rejects_unit_root(alpha);
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                rep.still_nonstationary = true;
                rep.untested_reason = std::string("after differencing: ") + e.what();
            }
        }
    });
    for (const auto& rep : report.columns) {
        if (!rep.untested_reason.empty() && !rep.differenced) warn("stationarity: column '" + rep.name + "' not tested: " + rep.untested_reason);
        if (rep.still_nonstationary) warn("stationarity: column '" + rep.name + "' still non-stationary after differencing");
    }

    const bool any = std::any_of(report.columns.begin(), report.columns.end(),
                                 [](const ColumnStationarity& c) { return c.differenced; });
    if (!any) return {panel, report};

    report.rows_trimmed = 1;
    Panel out;
    out.start_day = panel.start_day + std::chrono::days{1};
    out.length = panel.length - 1;
    for (std::size_t k = 0; k < panel.columns.size(); ++k) {
        const auto& c = panel.columns[k];
        DailySeries s;
        s.name = c.name;
        s.role = c.role;
        s.start_day = out.start_day;
        if (report.columns[k].differenced) {
            s.values = difference(c.values);
            s.filled.resize(out.length);
            for (std::size_t t = 0; t < out.length; ++t) s.filled[t] = c.filled[t] || c.filled[t + 1];
        } else {
            s.values.assign(c.values.begin() + 1, c.values.end());
            s.filled.assign(c.filled.begin() + 1, c.filled.end());
        }
        out.columns.push_back(std::move(s));
    }
    return {std::move(out), report};
}

inline nlohmann::json adf_json(const AdfResult& r) {
    return {{"statistic", r.statistic},
            {"chosen_lag", r.chosen_lag},
            {"max_lag", r.max_lag},
            {"bic", r.criterion_value},
            {"observations", r.observations},
            {"critical_values", {{"1%", r.critical_values.one_pct}, {"5%", r.critical_values.five_pct}, {"10%", r.critical_values.ten_pct}}},
            {"stationary_at_5pct", r.stationary_at_5pct}};
}

inline nlohmann::json stationarity_json(const StationarityReport& report) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : report.columns) {
        nlohmann::json j{{"name", c.name}, {"differenced", c.differenced}, {"still_nonstationary", c.still_nonstationary}};
        j["adf"] = c.original ? adf_json(*c.original) : nlohmann::json(nullptr);
        j["adf_after_differencing"] = c.after_differencing ? adf_json(*c.after_differencing) : nlohmann::json(nullptr);
        if (!c.untested_reason.empty()) j["untested_reason"] = c.untested_reason;
        cols.push_back(std::move(j));
    }
    return {{"alpha", report.alpha}, {"rows_trimmed", report.rows_trimmed}, {"columns", cols}};
}

} // namespace actorgc
