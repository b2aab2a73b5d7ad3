#include "maxent/simplex_lp.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#include "maxent/errors.hpp"

namespace maxent::detail {

namespace {

constexpr double kPivotTol = 1e-9;

} // namespace

PhaseOneResult phase_one_feasible(const Eigen::MatrixXd& B, const Eigen::VectorXd& d,
                                  double tol) {
    const Eigen::Index k = B.rows();
    const Eigen::Index n = B.cols();

    // Flip rows so the right-hand side is nonnegative; artificials then form
    // a feasible starting basis.
    Eigen::VectorXd sigma = Eigen::VectorXd::Ones(k);
    Eigen::VectorXd rhs = d;
    for (Eigen::Index i = 0; i < k; ++i) {
        if (rhs(i) < 0) {
            sigma(i) = -1.0;
            rhs(i) = -rhs(i);
        }
    }
    Eigen::MatrixXd A = sigma.asDiagonal() * B;

    // basis[i] < n: real column; otherwise artificial e_{basis[i]-n} with cost 1.
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) basis[static_cast<std::size_t>(i)] = n + i;
    Eigen::MatrixXd binv = Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd xb = rhs;

    const std::size_t max_pivots = 2000 + 40 * static_cast<std::size_t>(k + n);
    std::size_t pivots = 0;
    Eigen::VectorXd y(k);

    auto refactor = [&]() {
        Eigen::MatrixXd bas(k, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            const Eigen::Index v = basis[static_cast<std::size_t>(i)];
            if (v < n)
                bas.col(i) = A.col(v);
            else
                bas.col(i) = Eigen::VectorXd::Unit(k, v - n);
        }
        binv = bas.partialPivLu().inverse();
        xb = binv * rhs;
    };

    while (true) {
        // Dual prices for the phase-one costs (1 on artificials, 0 elsewhere).
        y.setZero();
        for (Eigen::Index i = 0; i < k; ++i)
            if (basis[static_cast<std::size_t>(i)] >= n) y += binv.row(i).transpose();

        // Bland: first real column with negative reduced cost.
        Eigen::Index entering = -1;
        for (Eigen::Index j = 0; j < n; ++j) {
            bool in_basis = false;
            for (Eigen::Index i = 0; i < k; ++i)
                if (basis[static_cast<std::size_t>(i)] == j) { in_basis = true; break; }
            if (in_basis) continue;
            if (-y.dot(A.col(j)) < -kPivotTol) { entering = j; break; }
        }
        if (entering < 0) break;

        Eigen::VectorXd u = binv * A.col(entering);
        Eigen::Index leave = -1;
        double best_ratio = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (u(i) <= kPivotTol) continue;
            const double ratio = xb(i) / u(i);
            if (leave < 0 || ratio < best_ratio - 1e-15 ||
                (std::abs(ratio - best_ratio) <= 1e-15 &&
                 basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave < 0) break; // numerically unbounded; treat current point as final

        basis[static_cast<std::size_t>(leave)] = entering;
        const double piv = u(leave);
        binv.row(leave) /= piv;
        xb(leave) /= piv;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (i == leave) continue;
            const double f = u(i);
            if (f != 0.0) {
                binv.row(i) -= f * binv.row(leave);
                xb(i) -= f * xb(leave);
            }
        }

        if (++pivots % 64 == 0) refactor();
        if (pivots > max_pivots)
            throw NumericalFailure("phase-one simplex failed to converge");
    }

    double objective = 0.0;
    for (Eigen::Index i = 0; i < k; ++i)
        if (basis[static_cast<std::size_t>(i)] >= n) objective += xb(i);

    PhaseOneResult result;
    result.feasible = objective <= tol * (1.0 + rhs.lpNorm<1>());
    if (!result.feasible) {
        y.setZero();
        for (Eigen::Index i = 0; i < k; ++i)
            if (basis[static_cast<std::size_t>(i)] >= n) y += binv.row(i).transpose();
        result.certificate = sigma.asDiagonal() * y;
    }
    return result;
}

} // namespace maxent::detail
