#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace actorgc {

struct OlsFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    double ssr = 0.0;
    std::size_t observations = 0;
    // Filled only when requested: sqrt(diag(s^2 (X'X)^-1)), s^2 = SSR/(n-p).
    Eigen::VectorXd standard_errors;
};

/// Least squares via column-pivoting Householder QR. Rank-deficient designs
/// throw NumericError naming the columns found to be dependent.
inline OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, bool standard_errors = false) {
    const auto n = design.rows();
    const auto p = design.cols();
    if (response.size() != n) throw NumericError("ols: response length does not match design rows");
    if (n <= p) {
        throw InsufficientDataError("ols: " + std::to_string(n) + " observations for " + std::to_string(p) + " parameters");
    }
    if (!design.allFinite() || !response.allFinite()) throw NumericError("ols: non-finite values in design or response");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
        std::string cols;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = qr.rank(); k < p; ++k) {
            if (!cols.empty()) cols += ", ";
            cols += std::to_string(perm[k]);
        }
        throw NumericError("ols: singular design; column(s) " + cols + " linearly dependent on the others");
    }
    OlsFit fit;
    fit.coefficients = qr.solve(response);
    fit.residuals = response - design * fit.coefficients;
    fit.ssr = fit.residuals.squaredNorm();
    fit.observations = static_cast<std::size_t>(n);
    if (standard_errors) {
        const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
        const Eigen::MatrixXd rinv =
            r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
        const double s2 = fit.ssr / static_cast<double>(n - p);
        fit.standard_errors.resize(p);
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = 0; k < p; ++k) {
            fit.standard_errors[perm[k]] = std::sqrt(s2 * rinv.row(k).squaredNorm());
        }
    }
    return fit;
}

} // namespace actorgc
