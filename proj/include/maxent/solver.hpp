#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "maxent/counting.hpp"
#include "maxent/dual.hpp"
#include "maxent/ellipsoid.hpp"
#include "maxent/family.hpp"

namespace maxent {

enum class OracleKind { Exact, Approximate };

struct SolveRequest {
    Family family;
    Eigen::VectorXd theta;      // target marginals
    double eta = 0.0;           // interiority promise for theta
    double epsilon = 1e-6;      // target accuracy on the dual value
    OracleKind oracle_kind = OracleKind::Exact;
    NoiseSpec noise;            // noise ceiling when oracle_kind == Approximate
};

struct SolverConfig {
    std::size_t max_iterations = 0; // 0: derived from the volume bound
    double stop_radius = 0.0;       // 0: derived from epsilon
    std::size_t enumerate_cap = kDefaultEnumerateCap;
};

struct GuessRecord {
    double zeta = 0.0;
    bool success = false;
};

struct SolveResult {
    Eigen::VectorXd lambda;   // canonical representative inside K
    double f_value = 0.0;     // exact dual objective at lambda
    double marginal_gap = 0.0;
    std::size_t iterations = 0;
    std::size_t oracle_calls = 0;
    std::vector<GuessRecord> guesses; // value-threshold probes, in probe order
};

// Cutting-plane minimization of the dual objective with exact counting.
// Requires oracle_kind == Exact. Returns the best visited center once the
// accumulated volume contraction certifies the accuracy target.
SolveResult solve_exact(const SolveRequest& req, const SolverConfig& config = {});

// Minimization that only relies on multiplicatively-approximate counts: a
// value threshold is searched by bisection, and each probe runs the cutting
// loop with noisy value and gradient surrogates until the ellipsoid radius
// falls below epsilon / (16 sqrt(m)). With oracle_kind == Approximate the
// surrogates inject simulated noise capped at the precision each step
// requires (epsilon/16 for values, epsilon/(32 R) for gradients, R = m/eta).
SolveResult solve_approx(const SolveRequest& req, const SolverConfig& config = {});

// Same loops on the shifted objective <theta,l> + ln Z(l + mu) + ln Z(mu),
// minimizing relative entropy to the product distribution induced by mu.
// Dispatches on req.oracle_kind.
SolveResult solve_kl(const SolveRequest& req, const Eigen::VectorXd& mu,
                     const SolverConfig& config = {});

// Recompute the marginal gap ||theta - marginals(lambda + mu)||_inf with the
// given oracle and throw GapExceeded when it exceeds sqrt(epsilon/2) + 1e-6.
double verify_marginals(const SolveResult& result, const Eigen::VectorXd& theta,
                        const CountingOracle& oracle, double epsilon,
                        const Eigen::VectorXd& mu = Eigen::VectorXd());

} // namespace maxent
