#include "maxent/counter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "maxent/dual.hpp"
#include "maxent/ellipsoid.hpp"
#include "maxent/log.hpp"

namespace maxent {

namespace {

Eigen::MatrixXd vertex_matrix(const Family& family, std::size_t cap) {
    const auto& mem = family.members(cap);
    Eigen::MatrixXd verts(family.ground_set_size(), mem.size());
    for (std::size_t i = 0; i < mem.size(); ++i)
        verts.col(static_cast<Eigen::Index>(i)) =
            indicator(mem[i], family.ground_set_size());
    return verts;
}

// Certified depth of the centroid of an affinely independent vertex set:
// the simplex they span lies inside the hull, so the centroid's distance to
// the nearest simplex facet lower-bounds its distance to the hull boundary.
// Used for families without a structural depth formula.
double simplex_centroid_depth(const std::vector<std::uint64_t>& support, int m,
                              const Eigen::MatrixXd& span) {
    const int r = static_cast<int>(span.cols());
    // Simplex vertices in span coordinates; the centroid likewise.
    Eigen::MatrixXd y(r, r + 1);
    const Eigen::VectorXd v0 = indicator(support.front(), m);
    for (int j = 0; j <= r; ++j)
        y.col(j) = span.transpose() * (indicator(support[static_cast<std::size_t>(j)], m) - v0);
    const Eigen::VectorXd centroid = y.rowwise().mean();

    double depth = std::numeric_limits<double>::infinity();
    for (int omit = 0; omit <= r; ++omit) {
        // Distance from the centroid to the affine hull of the other vertices.
        int base = omit == 0 ? 1 : 0;
        Eigen::MatrixXd dirs(r, r - 1);
        int col = 0;
        for (int j = 0; j <= r; ++j) {
            if (j == omit || j == base) continue;
            dirs.col(col++) = y.col(j) - y.col(base);
        }
        const Eigen::VectorXd rel = centroid - y.col(base);
        double dist;
        if (dirs.cols() == 0) {
            dist = rel.norm();
        } else {
            const Eigen::VectorXd coeffs = dirs.colPivHouseholderQr().solve(rel);
            dist = (rel - dirs * coeffs).norm();
        }
        depth = std::min(depth, dist);
    }
    return depth;
}

} // namespace

InteriorPointResult interior_point(const Family& family, std::size_t enumerate_cap) {
    const int m = family.ground_set_size();
    const auto& mem = family.members(enumerate_cap);
    if (mem.empty()) throw EmptyFamily("family has no members");

    // Greedy affinely independent subset, orthonormalizing directions from
    // the first member (twice-iterated Gram-Schmidt for stability).
    std::vector<std::uint64_t> support{mem.front()};
    const Eigen::VectorXd v0 = indicator(mem.front(), m);
    Eigen::MatrixXd span(m, 0);
    for (std::size_t i = 1; i < mem.size(); ++i) {
        Eigen::VectorXd d = indicator(mem[i], m) - v0;
        for (int pass = 0; pass < 2; ++pass)
            if (span.cols() > 0) d -= span * (span.transpose() * d);
        if (d.norm() > 1e-9) {
            span.conservativeResize(Eigen::NoChange, span.cols() + 1);
            span.col(span.cols() - 1) = d.normalized();
            support.push_back(mem[i]);
        }
    }

    InteriorPointResult out;
    out.support = support;
    out.theta = Eigen::VectorXd::Zero(m);
    for (std::uint64_t mask : support) out.theta += indicator(mask, m);
    out.theta /= static_cast<double>(support.size());

    if (span.cols() == 0) {
        out.eta = 1.0; // zero-dimensional hull: depth is vacuous
        return out;
    }

    const double m_pow = std::pow(static_cast<double>(m), 1.5);
    switch (family.kind()) {
    case FamilyKind::SpanningTrees: {
        const double max_size =
            static_cast<double>(family.undirected().vertices) - 1.0;
        out.eta = 1.0 / (max_size * m_pow);
        break;
    }
    case FamilyKind::BipartitePerfectMatchings:
    case FamilyKind::CycleCovers:
        out.eta = 1.0 / m_pow;
        break;
    case FamilyKind::Explicit:
        out.eta = simplex_centroid_depth(support, m, span);
        break;
    }
    return out;
}

Eigen::MatrixXd interiority_simplex(const Family& family, const Eigen::VectorXd& theta,
                                    double eta) {
    const int m = family.ground_set_size();
    if (theta.size() != m) throw DimensionMismatch("probe point has wrong dimension");
    if (eta <= 0.0) throw InvalidInput("simplex edge length must be positive");

    const NullSpaceBasis ns(equality_system(family));
    const int r = ns.dimension();
    if (r == 0) return theta;

    // Orthonormal basis of the hyperplane orthogonal to the all-ones vector
    // in R^{r+1}; mapping the standard regular simplex through it preserves
    // the pairwise distances sqrt(2), which the scale turns into eta.
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(r + 1, 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
    const Eigen::MatrixXd full_q =
        qr.householderQ() * Eigen::MatrixXd::Identity(r + 1, r + 1);
    const Eigen::MatrixXd w = full_q.rightCols(r);

    const double scale = eta / std::sqrt(2.0);
    Eigen::MatrixXd simplex(m, r + 1);
    for (int i = 0; i <= r; ++i) {
        Eigen::VectorXd u = Eigen::VectorXd::Constant(r + 1, -1.0 / (r + 1));
        u(i) += 1.0;
        simplex.col(i) = theta + scale * (ns.basis() * (w.transpose() * u));
    }
    return simplex;
}

InteriorityAnswer interiority_test(const Family& family, const Eigen::VectorXd& theta,
                                   double eta, std::size_t enumerate_cap) {
    const Eigen::MatrixXd verts = vertex_matrix(family, enumerate_cap);
    if (verts.cols() == 0) throw EmptyFamily("family has no members");
    const Eigen::MatrixXd simplex = interiority_simplex(family, theta, eta);

    InteriorityAnswer out;
    for (Eigen::Index i = 0; i < simplex.cols(); ++i) {
        const SeparationAnswer sep =
            detail::hull_separation_points(verts, simplex.col(i));
        if (!sep.inside) {
            out.deep = false;
            out.normal = sep.normal;
            return out;
        }
    }
    out.deep = true;
    return out;
}

ExactSolveOracle::ExactSolveOracle(Family family, Eigen::VectorXd shift,
                                   SolverConfig config)
    : family_(std::move(family)), shift_(std::move(shift)), config_(config) {}

ThresholdReply ExactSolveOracle::query(const Eigen::VectorXd& theta, double eta,
                                       double zeta, double eps) const {
    SolveRequest req;
    req.family = family_;
    req.theta = theta;
    req.eta = eta;
    req.epsilon = eps;
    req.oracle_kind = OracleKind::Exact;
    const SolveResult res = shift_.size() == 0 ? solve_exact(req, config_)
                                               : solve_kl(req, shift_, config_);
    ThresholdReply reply;
    reply.f_claimed = res.f_value;
    if (res.f_value > zeta)
        reply.asserted = true;
    else
        reply.lambda = res.lambda;
    return reply;
}

ApproxSolveOracle::ApproxSolveOracle(Family family, NoiseSpec noise,
                                     Eigen::VectorXd shift, SolverConfig config)
    : family_(std::move(family)), noise_(noise), shift_(std::move(shift)),
      config_(config) {}

ThresholdReply ApproxSolveOracle::query(const Eigen::VectorXd& theta, double eta,
                                        double zeta, double eps) const {
    SolveRequest req;
    req.family = family_;
    req.theta = theta;
    req.eta = eta;
    req.epsilon = eps;
    req.oracle_kind = OracleKind::Approximate;
    req.noise = noise_;
    const SolveResult res = shift_.size() == 0 ? solve_approx(req, config_)
                                               : solve_kl(req, shift_, config_);
    ThresholdReply reply;
    reply.f_claimed = res.f_value;
    if (res.f_value > zeta)
        reply.asserted = true;
    else
        reply.lambda = res.lambda;
    return reply;
}

namespace {

struct ReverseParams {
    double lo = 0.0;          // threshold treated as passing without a probe
    double hi = 0.0;          // first probed threshold
    double granularity = 0.0; // bisection resolution
    double eta_used = 0.0;    // interiority margin the probes certify
    double solver_eta = 0.0;  // interiority forwarded to the oracle
    double oracle_eps = 0.0;  // precision requested from the oracle
    double stop_radius = 0.0; // search exhaustion radius in marginal space
};

double largest_passing_threshold(const Family& family, const MaxEntOracle& oracle,
                                 const ReverseParams& p, std::size_t cap,
                                 CountEstimate& stats) {
    const int m = family.ground_set_size();
    const NullSpaceBasis ns(equality_system(family));
    const int r = ns.dimension();
    const double radius = std::sqrt(static_cast<double>(m));

    // Center the search ball on the affine span's closest point to the cube
    // center; every hull point lies within sqrt(m)/2 of it.
    const Eigen::VectorXd cube_center = Eigen::VectorXd::Constant(m, 0.5);
    const Eigen::VectorXd anchor =
        ns.particular() +
        ns.basis() * (ns.basis().transpose() * (cube_center - ns.particular()));

    const std::size_t max_iter =
        static_cast<std::size_t>(std::ceil(
            2.2 * r * r * std::log(std::max(2.0, radius / p.stop_radius)))) +
        64;

    auto probe = [&](double zeta) -> bool {
        ++stats.probes;
        EllipsoidState ell = init_ball(anchor, ns.basis(), radius);
        const double log_exhausted = r * std::log(p.stop_radius / radius);
        double acc_log_volume = 0.0;
        std::size_t iter = 0;
        const auto still_searching = [&] {
            if (acc_log_volume <= log_exhausted) return false;
            try {
                return enclosing_radius(ell) > p.stop_radius;
            } catch (const NumericalFailure&) {
                return false; // shape beyond float precision: no deep point found
            }
        };
        while (still_searching()) {
            const Eigen::VectorXd theta_t = ell.ambient_center();
            Eigen::VectorXd cut_normal;
            const InteriorityAnswer deep_check =
                interiority_test(family, theta_t, p.eta_used, cap);
            if (!deep_check.deep) {
                cut_normal = deep_check.normal;
            } else {
                const ThresholdReply reply =
                    oracle.query(theta_t, p.solver_eta, zeta, p.oracle_eps);
                ++stats.oracle_queries;
                if (reply.asserted) return true;
                if (reply.lambda.size() != m)
                    throw SolverContractViolation(
                        "threshold oracle returned a witness of wrong dimension");
                if (reply.f_claimed > zeta + p.oracle_eps + 1e-9)
                    throw SolverContractViolation(
                        "threshold oracle claimed value " +
                        std::to_string(reply.f_claimed) +
                        " above the threshold " + std::to_string(zeta));
                // Any marginal vector beating the threshold satisfies
                // <lambda, x - theta_t> > 0; keep that halfspace.
                cut_normal = -reply.lambda;
            }
            try {
                acc_log_volume +=
                    std::log(central_cut(ell, cut_normal).volume_ratio);
            } catch (const DegenerateNormal&) {
                // A vanishing witness weight vector: the unweighted value
                // already fails the threshold everywhere.
                return false;
            } catch (const NumericalFailure&) {
                return false; // shape beyond float precision: no deep point found
            }
            if (++iter > max_iter)
                throw MaxIterations("threshold probe exceeded its iteration budget");
        }
        return false;
    };

    double lo = p.lo;
    double hi = p.hi;
    if (probe(hi)) return hi;
    while (hi - lo > p.granularity) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid))
            lo = mid;
        else
            hi = mid;
        MAXENT_LOG(1) << "count bracket [" << lo << ", " << hi << "]";
    }
    return lo;
}

} // namespace

CountEstimate count_via_entropy(const Family& family, double epsilon,
                                const MaxEntOracle& oracle, std::size_t enumerate_cap) {
    if (epsilon <= 0.0) throw InvalidInput("accuracy must be positive");
    const int m = family.ground_set_size();
    const NullSpaceBasis ns(equality_system(family));

    CountEstimate out;
    if (ns.dimension() == 0) {
        // A zero-dimensional hull has exactly one member.
        out.log_count = 0.0;
        out.count = 1.0;
        return out;
    }

    const InteriorPointResult ip = interior_point(family, enumerate_cap);
    const double m_cubed = std::pow(static_cast<double>(m), 3.0);

    ReverseParams p;
    p.granularity = epsilon / 8.0;
    p.eta_used = epsilon / (16.0 * m_cubed) * ip.eta;
    p.solver_eta = p.eta_used / (2.0 * m);
    p.oracle_eps = epsilon / 16.0;
    p.stop_radius = epsilon * p.eta_used / (16.0 * m);
    p.lo = 0.0;
    p.hi = static_cast<double>(m);

    out.log_count = largest_passing_threshold(family, oracle, p, enumerate_cap, out);
    out.count = std::exp(out.log_count);
    return out;
}

CountEstimate count_via_entropy(const Family& family, double epsilon) {
    const ExactSolveOracle oracle(family);
    return count_via_entropy(family, epsilon, oracle);
}

CountEstimate generalized_count(const Family& family, const Eigen::VectorXd& mu,
                                double epsilon, const MaxEntOracle& oracle,
                                std::size_t enumerate_cap) {
    if (epsilon <= 0.0) throw InvalidInput("accuracy must be positive");
    const int m = family.ground_set_size();
    if (mu.size() == 0 || mu.lpNorm<1>() == 0.0)
        return count_via_entropy(family, epsilon, oracle, enumerate_cap);
    if (mu.size() != m) throw DimensionMismatch("shift weights have wrong dimension");

    const NullSpaceBasis ns(equality_system(family));
    CountEstimate out;
    if (ns.dimension() == 0) {
        // Single member: the weighted sum is available in closed form.
        out.log_count = count_enumerate(family, mu, enumerate_cap).log_Z;
        out.count = std::exp(out.log_count);
        return out;
    }

    const InteriorPointResult ip = interior_point(family, enumerate_cap);
    const double m_cubed = std::pow(static_cast<double>(m), 3.0);
    const double mu_l1 = mu.lpNorm<1>();
    const double scale = 1.0 + mu_l1;

    ReverseParams p;
    p.granularity = epsilon / 8.0;
    p.eta_used = epsilon / (16.0 * m_cubed * scale) * ip.eta;
    p.solver_eta = p.eta_used / (2.0 * m);
    p.oracle_eps = epsilon / 16.0;
    p.stop_radius = epsilon * p.eta_used / (16.0 * m * scale);
    p.lo = -2.0 * mu_l1 - p.granularity;
    p.hi = 2.0 * (m + mu_l1);

    // The threshold search estimates the best shifted objective value, which
    // equals twice the log of the weighted sum.
    const double zeta = largest_passing_threshold(family, oracle, p, enumerate_cap, out);
    out.log_count = 0.5 * zeta;
    out.count = std::exp(out.log_count);
    return out;
}

CountEstimate generalized_count(const Family& family, const Eigen::VectorXd& mu,
                                double epsilon) {
    const ExactSolveOracle oracle(family, mu);
    return generalized_count(family, mu, epsilon, oracle);
}

} // namespace maxent
