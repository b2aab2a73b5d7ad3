#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "maxent/counting.hpp"
#include "maxent/family.hpp"
#include "maxent/solver.hpp"

namespace maxent {

// A point certified to lie inside the vertex hull, together with a proven
// lower bound on its distance to the hull boundary measured within the
// hull's affine span. The point is the centroid of an affinely independent
// set of members (listed in `support`).
struct InteriorPointResult {
    Eigen::VectorXd theta;
    double eta = 0.0;
    std::vector<std::uint64_t> support;
};

InteriorPointResult interior_point(const Family& family,
                                   std::size_t enumerate_cap = kDefaultEnumerateCap);

// Verdict of the simplex-probe interiority test.
//
// deep == true certifies that theta lies in the hull at depth at least
// eta / (2m) within the affine span. Otherwise `normal` defines a halfspace
// cut: every point y of the hull at depth eta satisfies
// <normal, y> < <normal, theta>.
struct InteriorityAnswer {
    bool deep = false;
    Eigen::VectorXd normal;
};

// Probes the vertices of a regular simplex with edge length eta centered at
// theta inside the affine span of the hull. All vertices inside => deep;
// any separated vertex yields the cut certificate described above.
InteriorityAnswer interiority_test(const Family& family, const Eigen::VectorXd& theta,
                                   double eta,
                                   std::size_t enumerate_cap = kDefaultEnumerateCap);

// The probe points used by interiority_test: columns are the r + 1 vertices
// of a regular simplex with edge length eta, centroid theta, spanning the
// affine directions of the hull (r = affine dimension). For r = 0 the single
// column is theta itself.
Eigen::MatrixXd interiority_simplex(const Family& family, const Eigen::VectorXd& theta,
                                    double eta);

// Threshold oracle interface used by the counting-from-optimization
// reduction. A query either asserts that the optimal objective value at
// `theta` exceeds `zeta`, or returns a witness weight vector whose
// objective value is at most zeta (up to the oracle's precision `eps`).
struct ThresholdReply {
    bool asserted = false;
    Eigen::VectorXd lambda;
    double f_claimed = 0.0;
};

class MaxEntOracle {
public:
    virtual ~MaxEntOracle() = default;

    // eta is the certified interiority of theta; eps the precision the
    // reply's claimed objective value must meet.
    virtual ThresholdReply query(const Eigen::VectorXd& theta, double eta,
                                 double zeta, double eps) const = 0;
};

// Threshold oracle backed by the exact cutting-plane solver. A nonzero
// `shift` vector makes queries evaluate the shifted objective
// <theta, lambda> + ln Z(lambda + shift) + ln Z(shift).
class ExactSolveOracle final : public MaxEntOracle {
public:
    explicit ExactSolveOracle(Family family,
                              Eigen::VectorXd shift = Eigen::VectorXd(),
                              SolverConfig config = {});
    ThresholdReply query(const Eigen::VectorXd& theta, double eta, double zeta,
                         double eps) const override;

private:
    Family family_;
    Eigen::VectorXd shift_;
    SolverConfig config_;
};

// Threshold oracle backed by the noise-tolerant solver.
class ApproxSolveOracle final : public MaxEntOracle {
public:
    ApproxSolveOracle(Family family, NoiseSpec noise,
                      Eigen::VectorXd shift = Eigen::VectorXd(),
                      SolverConfig config = {});
    ThresholdReply query(const Eigen::VectorXd& theta, double eta, double zeta,
                         double eps) const override;

private:
    Family family_;
    NoiseSpec noise_;
    Eigen::VectorXd shift_;
    SolverConfig config_;
};

struct CountEstimate {
    double log_count = 0.0; // natural log of the estimate
    double count = 1.0;     // exp(log_count)
    std::size_t probes = 0; // threshold guesses attempted
    std::size_t oracle_queries = 0;
};

// Estimates ln |family| within epsilon by binary search over a threshold
// oracle for the optimization problem, searching marginal space with a
// cutting-plane scheme. The overloads without an oracle use the exact
// solver as the threshold oracle.
CountEstimate count_via_entropy(const Family& family, double epsilon,
                                const MaxEntOracle& oracle,
                                std::size_t enumerate_cap = kDefaultEnumerateCap);
CountEstimate count_via_entropy(const Family& family, double epsilon);

// Estimates the weighted member sum Z(mu) = sum_M exp(-<mu, 1_M>) within a
// factor of exp(epsilon), by the same reduction applied to the shifted
// objective. mu of size zero (or all zeros) reduces to plain counting.
CountEstimate generalized_count(const Family& family, const Eigen::VectorXd& mu,
                                double epsilon, const MaxEntOracle& oracle,
                                std::size_t enumerate_cap = kDefaultEnumerateCap);
CountEstimate generalized_count(const Family& family, const Eigen::VectorXd& mu,
                                double epsilon);

} // namespace maxent
