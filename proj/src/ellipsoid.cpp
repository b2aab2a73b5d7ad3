#include "maxent/ellipsoid.hpp"

#include <cmath>

namespace maxent {

EllipsoidState init_ball(Eigen::VectorXd anchor, Eigen::MatrixXd basis, double radius) {
    if (!(radius > 0.0)) throw InvalidInput("ball radius must be positive");
    if (basis.rows() != anchor.size()) throw DimensionMismatch("basis/anchor mismatch");
    const Eigen::Index r = basis.cols();
    const Eigen::MatrixXd gram = basis.transpose() * basis;
    if ((gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-10 &&
        r > 0)
        throw BadBasis("basis columns are not orthonormal");

    EllipsoidState state;
    state.anchor = std::move(anchor);
    state.basis = std::move(basis);
    state.center = Eigen::VectorXd::Zero(r);
    state.shape = radius * radius * Eigen::MatrixXd::Identity(r, r);
    return state;
}

CutInfo central_cut(EllipsoidState& state, const Eigen::VectorXd& normal) {
    if (normal.size() != state.basis.rows())
        throw DimensionMismatch("cut normal has wrong dimension");
    const int r = state.dimension();
    Eigen::VectorXd g = state.basis.transpose() * normal;
    if (g.norm() <= 1e-12)
        throw DegenerateNormal("cut normal vanishes inside the subspace");

    CutInfo info;
    if (r == 1) {
        // Interval case: the half containing the kept side is itself the
        // minimum enclosing "ellipsoid".
        const double a = std::sqrt(state.shape(0, 0));
        const double dir = g(0) > 0 ? 1.0 : -1.0;
        state.center(0) -= dir * a / 2.0;
        state.shape(0, 0) = a * a / 4.0;
        info.volume_ratio = 0.5;
        return info;
    }

    const Eigen::VectorXd sg = state.shape * g;
    const double denom2 = g.dot(sg);
    if (!(denom2 > 0.0))
        throw NumericalFailure("shape matrix lost positive definiteness");
    const double denom = std::sqrt(denom2);
    const double rd = static_cast<double>(r);

    state.center -= sg / ((rd + 1.0) * denom);
    state.shape = (rd * rd / (rd * rd - 1.0)) *
                  (state.shape - (2.0 / (rd + 1.0)) * (sg * sg.transpose()) / denom2);
    state.shape = ((state.shape + state.shape.transpose()) / 2.0).eval();

    // det(S') / det(S) = (r^2/(r^2-1))^r * (r-1)/(r+1); volume scales with
    // the square root.
    info.volume_ratio = std::pow(rd * rd / (rd * rd - 1.0), rd / 2.0) *
                        std::sqrt((rd - 1.0) / (rd + 1.0));
    return info;
}

double enclosing_radius(const EllipsoidState& state) {
    if (state.dimension() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(state.shape);
    if (es.info() != Eigen::Success)
        throw NumericalFailure("shape matrix eigendecomposition failed");
    const double min_eig = es.eigenvalues().minCoeff();
    const double max_eig = es.eigenvalues().maxCoeff();
    if (!(min_eig > 0.0))
        throw NumericalFailure("shape matrix lost positive definiteness");
    return std::sqrt(max_eig);
}

} // namespace maxent
