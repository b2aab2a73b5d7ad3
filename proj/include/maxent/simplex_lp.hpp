#pragma once

#include <Eigen/Dense>

namespace maxent::detail {

// Phase-one simplex feasibility test for  B p = d,  p >= 0.
//
// If infeasible, `certificate` is a Farkas vector y with  y . B_j <= tol for
// every column j and  y . d > 0.  Bland's rule is used throughout, so the
// iteration always terminates.
struct PhaseOneResult {
    bool feasible = false;
    Eigen::VectorXd certificate;
};

PhaseOneResult phase_one_feasible(const Eigen::MatrixXd& B, const Eigen::VectorXd& d,
                                  double tol = 1e-9);

} // namespace maxent::detail
