#pragma once

#include <Eigen/Dense>

#include "maxent/counting.hpp"
#include "maxent/family.hpp"

namespace maxent {

// Target marginals together with an interiority promise: theta is claimed to
// be at distance >= eta from the boundary of the hull, measured inside its
// affine hull. The solvers use eta only through the search radius m / eta.
struct InteriorSpec {
    double eta = 0.0;
};

// Orthonormal basis of the null space of the equality system's matrix, i.e.
// of the subspace K the dual objective is minimized over, plus the least-norm
// particular solution of A x = b for anchoring affine sets.
class NullSpaceBasis {
public:
    explicit NullSpaceBasis(const EqualitySystem& sys);

    int ambient_dimension() const { return static_cast<int>(basis_.rows()); }
    int dimension() const { return static_cast<int>(basis_.cols()); }
    const Eigen::MatrixXd& basis() const { return basis_; }

    // Orthogonal projection onto K.
    Eigen::VectorXd project(const Eigen::VectorXd& v) const;

    // Least-norm solution of A x = b.
    const Eigen::VectorXd& particular() const { return particular_; }

private:
    Eigen::MatrixXd basis_;
    Eigen::VectorXd particular_;
};

// Dual objective <theta, lambda> + ln Z(lambda). One oracle call.
double eval_f(const Eigen::VectorXd& theta, const Eigen::VectorXd& lambda,
              const CountingOracle& oracle);

// Shifted variant <theta, lambda> + ln Z(lambda + mu) + ln Z(mu), whose
// minimizers realize the distribution closest (in relative entropy) to the
// product distribution induced by mu. Two oracle calls.
double eval_f_kl(const Eigen::VectorXd& theta, const Eigen::VectorXd& lambda,
                 const Eigen::VectorXd& mu, const CountingOracle& oracle);

// Marginals of the product distribution at lambda: exp(log_Z_e - log_Z),
// clamped into [0, 1].
Eigen::VectorXd marginals_of(const Eigen::VectorXd& lambda, const CountingOracle& oracle);

// Gradient of the dual objective: theta - marginals_of(lambda).
Eigen::VectorXd grad_f(const Eigen::VectorXd& theta, const Eigen::VectorXd& lambda,
                       const CountingOracle& oracle);

// Canonical representative: orthogonal projection of lambda onto K.
Eigen::VectorXd project_to_K(const Eigen::VectorXd& lambda, const EqualitySystem& sys);

// Norm bound m / eta on the minimizer for eta-interior targets.
double radius_bound(int m, double eta);

} // namespace maxent
