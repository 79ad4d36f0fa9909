#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "csv.hpp"
#include "diagnostics.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "timeseries.hpp"

namespace actorgc {

struct LassoConfig {
    int max_lag = 22;
    std::vector<double> lambda_group_grid{0.01, 0.1, 0.5, 1.0, 5.0, 10.0};
    std::vector<double> lambda_l1_grid{0.0, 0.01, 0.1, 0.5, 1.0};
    double tolerance = 1e-6;
    int max_iterations = 10000;
    double active_threshold = 1e-6;
    std::size_t top_lags = 5;

    void validate() const {
        if (max_lag < 1) throw ConfigError("lasso: max_lag must be >= 1");
        if (lambda_group_grid.empty() || lambda_l1_grid.empty()) throw ConfigError("lasso: empty lambda grid");
        for (double l : lambda_group_grid)
            if (!(l >= 0)) throw ConfigError("lasso: lambda_group values must be >= 0");
        for (double l : lambda_l1_grid)
            if (!(l >= 0)) throw ConfigError("lasso: lambda_l1 values must be >= 0");
        if (!(tolerance > 0) || max_iterations < 1) throw ConfigError("lasso: bad convergence settings");
        if (top_lags < 1) throw ConfigError("lasso: top_lags must be >= 1");
    }
};

/// A contiguous block of predictor columns sharing one lag.
struct LagGroup {
    int lag = 0;
    Eigen::Index begin = 0;
    Eigen::Index size = 0;
};

struct DesignMatrix {
    Eigen::VectorXd response;
    Eigen::MatrixXd predictors;
    std::vector<LagGroup> groups;
    // Per predictor column.
    std::vector<std::string> variable;
    std::vector<int> lag;
    std::vector<double> center;
    std::vector<double> scale;
    double response_center = 0.0;
    double response_scale = 1.0;
    // "variable@lag" for constant columns that were removed.
    std::vector<std::string> dropped;
    std::string target;
    int max_lag = 0;
};

/// Regresses `target` at day t on every behavior column at days t-1..t-max_lag.
/// Predictor columns are grouped by lag and, when `standardize`, scaled to
/// zero mean and unit (population) variance; the response is standardized the
/// same way. Constant columns are dropped.
inline DesignMatrix build_design(const Panel& panel, const std::string& target, int max_lag, bool standardize = true) {
    if (max_lag < 1) throw ConfigError("design: max_lag must be >= 1");
    const auto& y = panel.column(target);
    if (y.role != SeriesRole::kpi) throw ConfigError("design: target '" + target + "' is not a KPI column");
    const auto behaviors = panel.with_role(SeriesRole::behavior);
    if (behaviors.empty()) throw ConfigError("design: panel has no behavior columns");
    if (panel.length <= static_cast<std::size_t>(max_lag) + 10) {
        throw InsufficientDataError("design: panel length " + std::to_string(panel.length) + " too short for max lag " +
                                    std::to_string(max_lag));
    }
    const auto rows = static_cast<Eigen::Index>(panel.length) - max_lag;

    DesignMatrix d;
    d.target = target;
    d.max_lag = max_lag;
    d.response.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) d.response[r] = y.values[static_cast<std::size_t>(r + max_lag)];

    std::vector<Eigen::VectorXd> cols;
    for (int l = 1; l <= max_lag; ++l) {
        LagGroup g{l, static_cast<Eigen::Index>(cols.size()), 0};
        for (const auto* v : behaviors) {
            Eigen::VectorXd col(rows);
            for (Eigen::Index r = 0; r < rows; ++r) col[r] = v->values[static_cast<std::size_t>(r + max_lag - l)];
            const double mean = col.mean();
            const double sd = std::sqrt((col.array() - mean).square().mean());
            if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
                d.dropped.push_back(v->name + "@" + std::to_string(l));
                continue;
            }
            if (standardize) col = (col.array() - mean) / sd;
            d.center.push_back(standardize ? mean : 0.0);
            d.scale.push_back(standardize ? sd : 1.0);
            d.variable.push_back(v->name);
            d.lag.push_back(l);
            cols.push_back(std::move(col));
            ++g.size;
        }
        if (g.size > 0) d.groups.push_back(g);
    }
    if (cols.empty()) throw NumericError("design: every predictor column is constant");
    if (!d.dropped.empty()) warn("design: dropped " + std::to_string(d.dropped.size()) + " constant predictor column(s)");
    d.predictors.resize(rows, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) d.predictors.col(static_cast<Eigen::Index>(c)) = cols[c];

    if (standardize) {
        const double mean = d.response.mean();
        const double sd = std::sqrt((d.response.array() - mean).square().mean());
        if (!(sd > 0)) throw NumericError("design: target '" + target + "' is constant over the sample");
        d.response_center = mean;
        d.response_scale = sd;
        d.response = (d.response.array() - mean) / sd;
    }
    return d;
}

struct SglOptions {
    double tolerance = 1e-6;
    int max_iterations = 10000;
    bool record_objective = false;
};

struct SglFit {
    Eigen::VectorXd coefficients;
    int iterations = 0;
    bool converged = false;
    // Objective after each sweep (only when requested).
    std::vector<double> objective_trace;
};

namespace detail {

inline double group_weight(const LagGroup& g) { return std::sqrt(static_cast<double>(g.size)); }

inline Eigen::VectorXd soft_threshold(const Eigen::VectorXd& z, double t) {
    return z.unaryExpr([t](double v) { return v > t ? v - t : (v < -t ? v + t : 0.0); });
}

// prox of t*(l1*|b|_1 + lg*w*|b|_2): soft threshold, then group shrink.
inline Eigen::VectorXd sgl_prox(const Eigen::VectorXd& z, double l1_step, double group_step) {
    Eigen::VectorXd s = soft_threshold(z, l1_step);
    const double norm = s.norm();
    if (norm <= group_step) return Eigen::VectorXd::Zero(z.size());
    return s * (1.0 - group_step / norm);
}

} // namespace detail

/// (1/2n)|y - Xb|^2 + lambda_group * sum_g sqrt(|g|) |b_g|_2 + lambda_l1 * |b|_1
inline double sgl_objective(const DesignMatrix& d, const Eigen::VectorXd& beta, double lambda_group, double lambda_l1) {
    const double n = static_cast<double>(d.response.size());
    double value = (d.response - d.predictors * beta).squaredNorm() / (2.0 * n);
    for (const auto& g : d.groups) {
        value += lambda_group * detail::group_weight(g) * beta.segment(g.begin, g.size).norm();
    }
    return value + lambda_l1 * beta.lpNorm<1>();
}

/// Largest violation of the subgradient optimality conditions.
inline double kkt_residual(const DesignMatrix& d, const Eigen::VectorXd& beta, double lambda_group, double lambda_l1) {
    const double n = static_cast<double>(d.response.size());
    const Eigen::VectorXd grad = -d.predictors.transpose() * (d.response - d.predictors * beta) / n;
    double worst = 0.0;
    for (const auto& g : d.groups) {
        const Eigen::VectorXd bg = beta.segment(g.begin, g.size);
        const Eigen::VectorXd gg = grad.segment(g.begin, g.size);
        const double w = lambda_group * detail::group_weight(g);
        const double norm = bg.norm();
        if (norm == 0.0) {
            // 0 in grad + l1*[-1,1] + w*unit-ball  <=>  |S(-grad, l1)| <= w
            worst = std::max(worst, std::max(0.0, detail::soft_threshold(-gg, lambda_l1).norm() - w));
            continue;
        }
        for (Eigen::Index j = 0; j < g.size; ++j) {
            if (bg[j] != 0.0) {
                const double sign = bg[j] > 0 ? 1.0 : -1.0;
                worst = std::max(worst, std::abs(gg[j] + lambda_l1 * sign + w * bg[j] / norm));
            } else {
                worst = std::max(worst, std::max(0.0, std::abs(gg[j]) - lambda_l1));
            }
        }
    }
    return worst;
}

/// Sparse group lasso by block coordinate descent. Each block update runs
/// proximal gradient steps on that block with step 1/L_g (L_g the largest
/// eigenvalue of X_g'X_g/n), so the objective never increases. Converged when
/// a full sweep moves no coefficient by more than the tolerance.
inline SglFit sparse_group_lasso(const DesignMatrix& d, double lambda_group, double lambda_l1, const SglOptions& options = {}) {
    if (!d.predictors.allFinite() || !d.response.allFinite()) throw NumericError("sgl: non-finite values in design");
    if (!(lambda_group >= 0) || !(lambda_l1 >= 0)) throw ConfigError("sgl: lambdas must be >= 0");
    const double n = static_cast<double>(d.response.size());
    const auto p = d.predictors.cols();

    struct Block {
        Eigen::MatrixXd gram;
        double lipschitz;
        Eigen::LLT<Eigen::MatrixXd> exact;
    };
    std::vector<Block> blocks;
    blocks.reserve(d.groups.size());
    for (const auto& g : d.groups) {
        const auto xg = d.predictors.middleCols(g.begin, g.size);
        Block b;
        b.gram = xg.transpose() * xg / n;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b.gram, Eigen::EigenvaluesOnly);
        b.lipschitz = eig.eigenvalues().maxCoeff();
        if (lambda_group == 0.0 && lambda_l1 == 0.0) b.exact.compute(b.gram);
        blocks.push_back(std::move(b));
    }

    SglFit fit;
    fit.coefficients = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd residual = d.response;
    const double inner_tol = options.tolerance * 1e-2;
    for (int sweep = 0; sweep < options.max_iterations; ++sweep) {
        double max_change = 0.0;
        for (std::size_t k = 0; k < d.groups.size(); ++k) {
            const auto& g = d.groups[k];
            const auto& blk = blocks[k];
            if (!(blk.lipschitz > 0)) continue;
            const auto xg = d.predictors.middleCols(g.begin, g.size);
            const Eigen::VectorXd old = fit.coefficients.segment(g.begin, g.size);
            // Block problem: min 0.5 b'Gb - c'b + penalty(b)
            const Eigen::VectorXd c = xg.transpose() * residual / n + blk.gram * old;
            const double w = lambda_group * detail::group_weight(g);
            Eigen::VectorXd b;
            if (detail::soft_threshold(c, lambda_l1).norm() <= w) {
                b = Eigen::VectorXd::Zero(g.size);
            } else if (lambda_group == 0.0 && lambda_l1 == 0.0 && blk.exact.info() == Eigen::Success) {
                b = blk.exact.solve(c);
            } else {
                b = old;
                const double step = 1.0 / blk.lipschitz;
                for (int it = 0; it < 10000; ++it) {
                    const Eigen::VectorXd next = detail::sgl_prox(b - step * (blk.gram * b - c), step * lambda_l1, step * w);
                    const double moved = (next - b).lpNorm<Eigen::Infinity>();
                    b = next;
                    if (moved < inner_tol) break;
                }
            }
            const Eigen::VectorXd delta = b - old;
            const double change = delta.lpNorm<Eigen::Infinity>();
            if (change > 0.0) {
                residual -= xg * delta;
                fit.coefficients.segment(g.begin, g.size) = b;
                max_change = std::max(max_change, change);
            }
        }
        fit.iterations = sweep + 1;
        if (options.record_objective) fit.objective_trace.push_back(sgl_objective(d, fit.coefficients, lambda_group, lambda_l1));
        if (max_change < options.tolerance) {
            fit.converged = true;
            break;
        }
    }
    return fit;
}

/// Lags whose group has any |coefficient| above the threshold.
inline std::vector<int> active_lags(const DesignMatrix& d, const Eigen::VectorXd& beta, double threshold) {
    std::vector<int> out;
    for (const auto& g : d.groups) {
        if (beta.segment(g.begin, g.size).cwiseAbs().maxCoeff() > threshold) out.push_back(g.lag);
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct LagSelection {
    // Every lag 1..max_lag, with the number of runs in which it was active.
    std::map<int, int> frequency;
    // Top lags by frequency, ties toward the smaller lag; only active lags.
    std::vector<int> selected;
    int runs = 0;
    int unconverged_runs = 0;
};

/// Runs the solver over every (target, lambda_group, lambda_l1) combination
/// and counts how often each lag group is active.
inline LagSelection lag_frequency(const std::vector<DesignMatrix>& designs, const LassoConfig& config, std::size_t workers = 1) {
    config.validate();
    if (designs.empty()) throw ConfigError("lag selection: no targets");
    struct Run {
        std::size_t design;
        double lambda_group;
        double lambda_l1;
    };
    std::vector<Run> runs;
    for (std::size_t t = 0; t < designs.size(); ++t)
        for (double lg : config.lambda_group_grid)
            for (double l1 : config.lambda_l1_grid) runs.push_back({t, lg, l1});

    std::vector<std::vector<int>> active(runs.size());
    std::vector<char> converged(runs.size(), 0);
    parallel_for(runs.size(), workers, [&](std::size_t k) {
        const auto& r = runs[k];
        const auto fit = sparse_group_lasso(designs[r.design], r.lambda_group, r.lambda_l1,
                                            {config.tolerance, config.max_iterations, false});
        active[k] = active_lags(designs[r.design], fit.coefficients, config.active_threshold);
        converged[k] = fit.converged;
    });

    LagSelection sel;
    int max_lag = 0;
    for (const auto& d : designs) max_lag = std::max(max_lag, d.max_lag);
    for (int l = 1; l <= max_lag; ++l) sel.frequency[l] = 0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        for (int l : active[k]) ++sel.frequency[l];
        if (!converged[k]) ++sel.unconverged_runs;
    }
    sel.runs = static_cast<int>(runs.size());
    if (sel.unconverged_runs > 0) {
        warn("lag selection: " + std::to_string(sel.unconverged_runs) + " run(s) hit max_iterations");
    }
    std::vector<std::pair<int, int>> ranked;
    for (const auto& [lag, count] : sel.frequency)
        if (count > 0) ranked.emplace_back(lag, count);
    if (ranked.empty()) {
        throw NumericError("lag selection: no lag group was active in any run; lower the lambda_group grid");
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (std::size_t i = 0; i < std::min(config.top_lags, ranked.size()); ++i) sel.selected.push_back(ranked[i].first);
    return sel;
}

/// One design per target, all sharing config.max_lag.
inline LagSelection lag_frequency(const Panel& panel, const std::vector<std::string>& targets, const LassoConfig& config,
                                  std::size_t workers = 1) {
    if (targets.empty()) throw ConfigError("lag selection: no targets");
    std::vector<DesignMatrix> designs;
    for (const auto& t : targets) designs.push_back(build_design(panel, t, config.max_lag));
    return lag_frequency(designs, config, workers);
}

inline void write_lag_frequency_csv(std::ostream& out, const LagSelection& sel) {
    csv::write_row(out, {"lag", "count"});
    for (const auto& [lag, count] : sel.frequency) csv::write_row(out, {std::to_string(lag), std::to_string(count)});
}

inline nlohmann::json lag_selection_json(const LagSelection& sel) {
    nlohmann::json freq = nlohmann::json::object();
    for (const auto& [lag, count] : sel.frequency) freq[std::to_string(lag)] = count;
    return {{"selected", sel.selected}, {"frequency", freq}, {"runs", sel.runs}, {"unconverged_runs", sel.unconverged_runs}};
}

inline LagSelection lag_selection_from_json(const nlohmann::json& j) {
    LagSelection sel;
    try {
        sel.selected = j.at("selected").get<std::vector<int>>();
        for (const auto& [k, v] : j.at("frequency").items()) sel.frequency[std::stoi(k)] = v.get<int>();
        sel.runs = j.value("runs", 0);
        sel.unconverged_runs = j.value("unconverged_runs", 0);
    } catch (const std::exception& e) {
        throw ParseError(std::string("lag selection: ") + e.what());
    }
    if (sel.selected.empty()) throw ParseError("lag selection: empty selected list");
    return sel;
}

} // namespace actorgc
