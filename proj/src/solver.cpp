#include "maxent/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>

#include "maxent/log.hpp"

namespace maxent {

namespace {

class TallyOracle final : public CountingOracle {
public:
    TallyOracle(std::shared_ptr<const CountingOracle> inner, std::size_t* counter)
        : inner_(std::move(inner)), counter_(counter) {}
    int ground_set_size() const override { return inner_->ground_set_size(); }
    CountResult count(const Eigen::VectorXd& lambda) const override {
        ++*counter_;
        return inner_->count(lambda);
    }

private:
    std::shared_ptr<const CountingOracle> inner_;
    std::size_t* counter_;
};

struct Workspace {
    Eigen::VectorXd theta;
    Eigen::VectorXd mu;        // zero vector when the objective is unshifted
    bool shifted = false;      // a shift vector was supplied (even all-zero)
    double constant = 0.0;     // ln Z(mu) for shifted objectives
    EqualitySystem eq;
    NullSpaceBasis ns;
    int m = 0;

    Workspace(const SolveRequest& req, const Eigen::VectorXd& mu_in)
        : theta(req.theta),
          mu(mu_in),
          shifted(mu_in.size() != 0),
          eq(equality_system(req.family)),
          ns(eq),
          m(req.family.ground_set_size()) {
        if (theta.size() != m) throw DimensionMismatch("marginals have wrong dimension");
        if (mu.size() == 0) mu = Eigen::VectorXd::Zero(m);
        if (mu.size() != m) throw DimensionMismatch("shift weights have wrong dimension");
    }

    double value_from(const CountResult& cr, const Eigen::VectorXd& lambda) const {
        return theta.dot(lambda) + cr.log_Z + constant;
    }

    static Eigen::VectorXd marginals_from(const CountResult& cr) {
        Eigen::VectorXd t(cr.log_Z_e.size());
        for (Eigen::Index e = 0; e < t.size(); ++e)
            t(e) = std::isinf(cr.log_Z_e(e)) && cr.log_Z_e(e) < 0
                       ? 0.0
                       : std::clamp(std::exp(cr.log_Z_e(e) - cr.log_Z), 0.0, 1.0);
        return t;
    }
};

// Upper bound on the spread of the objective over the search ball; the
// volume-based stopping rule certifies a gap of epsilon once the per-
// dimension contraction reaches epsilon over this spread.
double objective_spread(int m, double r_box, const Eigen::VectorXd& mu) {
    return 2.0 * m * r_box + r_box + 2.0 * m + 2.0 * mu.lpNorm<1>() + 1.0;
}

SolveResult run_exact(const SolveRequest& req, const Eigen::VectorXd& mu_in,
                      const SolverConfig& config) {
    if (req.oracle_kind != OracleKind::Exact)
        throw InvalidInput("exact solve requires an exact oracle");
    Workspace ws(req, mu_in);
    SolveResult out;

    auto base = make_exact_oracle(req.family, config.enumerate_cap);
    TallyOracle oracle(base, &out.oracle_calls);
    const bool shifted = ws.shifted;
    if (shifted) ws.constant = oracle.count(ws.mu).log_Z;

    const int r = ws.ns.dimension();
    if (r == 0) {
        out.lambda = Eigen::VectorXd::Zero(ws.m);
        const CountResult cr = oracle.count(ws.mu);
        out.f_value = ws.value_from(cr, out.lambda);
        out.marginal_gap = (ws.theta - Workspace::marginals_from(cr)).lpNorm<Eigen::Infinity>();
        return out;
    }

    const double r_box = radius_bound(ws.m, req.eta);
    const double r_init = std::sqrt(static_cast<double>(ws.m)) * r_box;
    const double spread = objective_spread(ws.m, r_box, ws.mu);
    const double log_target = static_cast<double>(r) * std::log(req.epsilon / spread);

    std::size_t max_iter = config.max_iterations;
    if (max_iter == 0)
        max_iter = static_cast<std::size_t>(
                       std::ceil(2.2 * r * r * std::log(spread / req.epsilon))) +
                   64;

    EllipsoidState ell =
        init_ball(Eigen::VectorXd::Zero(ws.m), ws.ns.basis(), r_init);
    double best_f = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_lambda = Eigen::VectorXd::Zero(ws.m);
    double acc_log_volume = 0.0;

    while (true) {
        const Eigen::VectorXd lambda = ell.ambient_center();
        const CountResult cr = oracle.count(lambda + ws.mu);
        const double f = ws.value_from(cr, lambda);
        if (f < best_f) {
            best_f = f;
            best_lambda = lambda;
        }
        ++out.iterations;
        const Eigen::VectorXd normal = ws.theta - Workspace::marginals_from(cr);
        try {
            acc_log_volume += std::log(central_cut(ell, normal).volume_ratio);
        } catch (const DegenerateNormal&) {
            break; // gradient vanishes inside K: the center is optimal
        } catch (const NumericalFailure&) {
            break; // ellipsoid shrank below float precision: localization is done
        }
        if (acc_log_volume <= log_target) break;
        if (out.iterations >= max_iter)
            throw MaxIterations("cutting loop exceeded its iteration budget");
    }

    if (best_lambda.norm() >= 0.995 * r_init)
        throw NotInterior("minimizer pushed against the search ball; "
                          "the interiority promise looks wrong");

    out.lambda = ws.ns.project(best_lambda);
    const CountResult cr = oracle.count(out.lambda + ws.mu);
    out.f_value = ws.value_from(cr, out.lambda);
    out.marginal_gap = (ws.theta - Workspace::marginals_from(cr)).lpNorm<Eigen::Infinity>();
    return out;
}

SolveResult run_approx(const SolveRequest& req, const Eigen::VectorXd& mu_in,
                       const SolverConfig& config) {
    Workspace ws(req, mu_in);
    SolveResult out;

    auto base = make_exact_oracle(req.family, config.enumerate_cap);
    auto tally = std::make_shared<TallyOracle>(base, &out.oracle_calls);

    const double eps = req.epsilon;
    const double r_ball = radius_bound(ws.m, req.eta);
    const double user_eps =
        req.oracle_kind == OracleKind::Approximate ? req.noise.epsilon : 0.0;

    // Each loop step needs its own oracle precision; simulated noise is
    // capped at both the user's level and the level the step tolerates.
    auto wrapper = [&](double step_eps) -> std::shared_ptr<const CountingOracle> {
        const double level = std::min(user_eps, step_eps);
        if (level <= 0.0) return tally;
        NoiseSpec spec = req.noise;
        spec.epsilon = level;
        return noisy_oracle(tally, spec);
    };
    auto value_oracle = wrapper(eps / 16.0);
    auto grad_oracle = wrapper(eps / (32.0 * r_ball));

    const bool shifted = ws.shifted;
    if (shifted) ws.constant = value_oracle->count(ws.mu).log_Z;

    const int r = ws.ns.dimension();
    const double sqrt_m = std::sqrt(static_cast<double>(ws.m));
    const double stop_radius =
        config.stop_radius > 0.0 ? config.stop_radius : eps / (16.0 * sqrt_m);
    std::size_t max_iter = config.max_iterations;
    if (max_iter == 0)
        max_iter = static_cast<std::size_t>(std::ceil(
                       8.0 * std::max(1, r * r) *
                       std::log(std::max(2.0, r_ball / stop_radius)))) +
                   128;

    struct ProbeResult {
        bool success = false;
        Eigen::VectorXd lambda;
    };
    auto probe = [&](double zeta) -> ProbeResult {
        ProbeResult pr;
        if (r == 0) {
            const Eigen::VectorXd lambda = Eigen::VectorXd::Zero(ws.m);
            const double est =
                ws.value_from(value_oracle->count(lambda + ws.mu), lambda);
            pr.success = est <= zeta;
            pr.lambda = lambda;
            return pr;
        }
        EllipsoidState ell =
            init_ball(Eigen::VectorXd::Zero(ws.m), ws.ns.basis(), r_ball);
        std::size_t iter = 0;
        // Exhaust the search when either the enclosing radius or the volume
        // drops below that of a ball with the stop radius; volume can shrink
        // much faster than the radius when the ellipsoid turns needle-shaped.
        const double log_exhausted = r * std::log(stop_radius / r_ball);
        double acc_log_volume = 0.0;
        const auto still_searching = [&] {
            if (acc_log_volume <= log_exhausted) return false;
            try {
                return enclosing_radius(ell) > stop_radius;
            } catch (const NumericalFailure&) {
                return false; // shape beyond float precision: settle now
            }
        };
        while (still_searching()) {
            const Eigen::VectorXd lambda = ell.ambient_center();
            const double est =
                ws.value_from(value_oracle->count(lambda + ws.mu), lambda);
            ++out.iterations;
            if (est <= zeta) {
                pr.success = true;
                pr.lambda = lambda;
                return pr;
            }
            const Eigen::VectorXd surrogate =
                Workspace::marginals_from(grad_oracle->count(lambda + ws.mu));
            try {
                acc_log_volume +=
                    std::log(central_cut(ell, ws.theta - surrogate).volume_ratio);
            } catch (const DegenerateNormal&) {
                break; // no usable cut direction; settle at the final test
            } catch (const NumericalFailure&) {
                break; // ellipsoid shrank below float precision
            }
            if (++iter >= max_iter)
                throw MaxIterations("threshold probe exceeded its iteration budget");
        }
        const Eigen::VectorXd lambda = ell.ambient_center();
        const double est = ws.value_from(value_oracle->count(lambda + ws.mu), lambda);
        ++out.iterations;
        pr.success = est <= zeta;
        pr.lambda = lambda;
        return pr;
    };

    // Threshold range. The objective value of any admissible target lies in
    // [0, m] for the plain objective; the shifted objective moves by
    // ln Z(mu) - <theta, mu>.
    double lo = 0.0;
    double hi = static_cast<double>(ws.m);
    if (shifted) {
        const double offset = ws.constant - ws.theta.dot(ws.mu);
        lo += offset - eps / 8.0;
        hi += offset;
    }

    const double granularity = eps / 8.0;
    std::optional<Eigen::VectorXd> best;
    auto record = [&](double zeta) {
        ProbeResult pr = probe(zeta);
        out.guesses.push_back({zeta, pr.success});
        if (pr.success) best = std::move(pr.lambda);
        return pr.success;
    };

    if (!record(hi))
        throw NoGuessSucceeded("threshold search failed at the upper bound");
    while (hi - lo > granularity) {
        const double mid = 0.5 * (lo + hi);
        if (record(mid))
            hi = mid;
        else
            lo = mid;
        MAXENT_LOG(1) << "threshold bracket [" << lo << ", " << hi << "]";
    }

    // Report the noise-free objective value at the returned point.
    out.lambda = ws.ns.project(*best);
    const double exact_constant = shifted ? tally->count(ws.mu).log_Z : 0.0;
    const CountResult cr = tally->count(out.lambda + ws.mu);
    out.f_value = ws.theta.dot(out.lambda) + cr.log_Z + exact_constant;
    out.marginal_gap = (ws.theta - Workspace::marginals_from(cr)).lpNorm<Eigen::Infinity>();
    return out;
}

} // namespace

SolveResult solve_exact(const SolveRequest& req, const SolverConfig& config) {
    return run_exact(req, Eigen::VectorXd(), config);
}

SolveResult solve_approx(const SolveRequest& req, const SolverConfig& config) {
    return run_approx(req, Eigen::VectorXd(), config);
}

SolveResult solve_kl(const SolveRequest& req, const Eigen::VectorXd& mu,
                     const SolverConfig& config) {
    if (req.oracle_kind == OracleKind::Exact) return run_exact(req, mu, config);
    return run_approx(req, mu, config);
}

double verify_marginals(const SolveResult& result, const Eigen::VectorXd& theta,
                        const CountingOracle& oracle, double epsilon,
                        const Eigen::VectorXd& mu) {
    Eigen::VectorXd probe = result.lambda;
    if (mu.size() != 0) {
        if (mu.size() != probe.size())
            throw DimensionMismatch("shift weights have wrong dimension");
        probe += mu;
    }
    const Eigen::VectorXd margins = marginals_of(probe, oracle);
    if (margins.size() != theta.size())
        throw DimensionMismatch("marginals have wrong dimension");
    const double gap = (theta - margins).lpNorm<Eigen::Infinity>();
    const double bound = std::sqrt(epsilon / 2.0) + 1e-6;
    if (gap > bound) throw GapExceeded("marginal gap " + std::to_string(gap) +
                                       " exceeds bound " + std::to_string(bound));
    return gap;
}

} // namespace maxent
