#include "hesn/ridge.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <spdlog/spdlog.h>

#include "hesn/errors.hpp"

namespace hesn {

Matrix ridge_solve(const Matrix& features, const Matrix& targets, double lambda) {
    if (features.rows() == 0 || features.cols() == 0 || targets.cols() == 0) {
        throw DimensionError("ridge_solve: empty features or targets");
    }
    if (features.rows() != targets.rows()) {
        throw DimensionError("ridge_solve: features have " + std::to_string(features.rows()) +
                             " rows but targets have " + std::to_string(targets.rows()));
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ArgumentError("ridge_solve: lambda must be finite and >= 0");
    }
    if (!features.allFinite() || !targets.allFinite()) {
        throw ArgumentError("ridge_solve: non-finite entries in design or targets");
    }
    if (features.rows() < features.cols()) {
        spdlog::warn("ridge_solve: {} samples for {} features; solution is underdetermined "
                     "without regularization",
                     features.rows(), features.cols());
    }

    const auto width = features.cols();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(width, width);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(features.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    gram.diagonal().array() += lambda;
    const Eigen::MatrixXd rhs = features.transpose() * targets;

    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    bool singular = llt.info() != Eigen::Success;
    if (!singular && lambda == 0.0) {
        // Rank deficiency often survives Cholesky as a tiny positive pivot.
        const Eigen::VectorXd pivots = llt.matrixL().toDenseMatrix().diagonal();
        const double largest = pivots.cwiseAbs().maxCoeff();
        const double smallest = pivots.cwiseAbs().minCoeff();
        const double floor = std::sqrt(static_cast<double>(width) *
                                       std::numeric_limits<double>::epsilon());
        singular = !(largest > 0.0) || smallest < floor * largest;
    }
    if (singular) {
        if (lambda == 0.0) {
            throw SingularityError(
                "ridge_solve: normal equations are singular; use lambda > 0");
        }
        throw SingularityError("ridge_solve: regularized normal equations could not be "
                               "factored; increase lambda");
    }
    Matrix solution = llt.solve(rhs).transpose();
    if (!solution.allFinite()) {
        throw SingularityError("ridge_solve: solution has non-finite entries; increase lambda");
    }
    return solution;
}

} // namespace hesn
