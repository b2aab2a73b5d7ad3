#include "maxent/dual.hpp"

#include <algorithm>
#include <cmath>

namespace maxent {

namespace {
constexpr double kRankTol = 1e-9;
}

NullSpaceBasis::NullSpaceBasis(const EqualitySystem& sys) {
    const Eigen::Index k = sys.A.rows();
    const Eigen::Index m = sys.A.cols();
    if (sys.b.size() != k) throw DimensionMismatch("equality system shape mismatch");
    if (k == 0) {
        basis_ = Eigen::MatrixXd::Identity(m, m);
        particular_ = Eigen::VectorXd::Zero(m);
        return;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys.A.transpose());
    qr.setThreshold(kRankTol);
    if (qr.rank() < k) throw RankDeficient("equality rows are linearly dependent");
    Eigen::MatrixXd q = qr.householderQ();
    basis_ = q.rightCols(m - k);
    particular_ = sys.A.completeOrthogonalDecomposition().solve(sys.b);
}

Eigen::VectorXd NullSpaceBasis::project(const Eigen::VectorXd& v) const {
    if (v.size() != basis_.rows()) throw DimensionMismatch("vector has wrong dimension");
    return basis_ * (basis_.transpose() * v);
}

double eval_f(const Eigen::VectorXd& theta, const Eigen::VectorXd& lambda,
              const CountingOracle& oracle) {
    if (theta.size() != lambda.size())
        throw DimensionMismatch("marginals and weights differ in dimension");
    return theta.dot(lambda) + oracle.count(lambda).log_Z;
}

double eval_f_kl(const Eigen::VectorXd& theta, const Eigen::VectorXd& lambda,
                 const Eigen::VectorXd& mu, const CountingOracle& oracle) {
    if (theta.size() != lambda.size() || mu.size() != lambda.size())
        throw DimensionMismatch("marginals, weights and shift differ in dimension");
    return theta.dot(lambda) + oracle.count(lambda + mu).log_Z + oracle.count(mu).log_Z;
}

Eigen::VectorXd marginals_of(const Eigen::VectorXd& lambda, const CountingOracle& oracle) {
    const CountResult res = oracle.count(lambda);
    Eigen::VectorXd theta(res.log_Z_e.size());
    for (Eigen::Index e = 0; e < theta.size(); ++e) {
        if (std::isinf(res.log_Z_e(e)) && res.log_Z_e(e) < 0) {
            theta(e) = 0.0;
            continue;
        }
        theta(e) = std::clamp(std::exp(res.log_Z_e(e) - res.log_Z), 0.0, 1.0);
    }
    return theta;
}

Eigen::VectorXd grad_f(const Eigen::VectorXd& theta, const Eigen::VectorXd& lambda,
                       const CountingOracle& oracle) {
    if (theta.size() != lambda.size())
        throw DimensionMismatch("marginals and weights differ in dimension");
    return theta - marginals_of(lambda, oracle);
}

Eigen::VectorXd project_to_K(const Eigen::VectorXd& lambda, const EqualitySystem& sys) {
    return NullSpaceBasis(sys).project(lambda);
}

double radius_bound(int m, double eta) {
    if (!(eta > 0.0)) throw InvalidInput("interiority radius must be positive");
    return static_cast<double>(m) / eta;
}

} // namespace maxent
