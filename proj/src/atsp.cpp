#include "maxent/atsp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "maxent/counter.hpp"
#include "maxent/counting.hpp"
#include "maxent/dual.hpp"
#include "maxent/log.hpp"
#include "maxent/sampler.hpp"
#include "maxent/solver.hpp"

namespace maxent {

namespace {

// Complete loop-free digraph on the first k of a label set, with costs
// looked up between original labels.
DirectedGraph complete_digraph(int k) {
    DirectedGraph g;
    g.vertices = k;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j) g.arcs.emplace_back(i, j);
    return g;
}

void check_degree_sums(const Eigen::VectorXd& marginals, const DirectedGraph& g) {
    Eigen::VectorXd out_sum = Eigen::VectorXd::Zero(g.vertices);
    Eigen::VectorXd in_sum = Eigen::VectorXd::Zero(g.vertices);
    for (std::size_t a = 0; a < g.arcs.size(); ++a) {
        const double v = marginals(static_cast<Eigen::Index>(a));
        if (v < -1e-9 || v > 1.0 + 1e-9)
            throw InfeasibleMarginals("marginal outside [0, 1]");
        out_sum(g.arcs[a].first) += v;
        in_sum(g.arcs[a].second) += v;
    }
    for (int v = 0; v < g.vertices; ++v)
        if (std::abs(out_sum(v) - 1.0) > 1e-6 || std::abs(in_sum(v) - 1.0) > 1e-6)
            throw InfeasibleMarginals("vertex " + std::to_string(v) +
                                      " has degree sums (" + std::to_string(out_sum(v)) +
                                      ", " + std::to_string(in_sum(v)) + "), expected 1");
}

} // namespace

AtspResult atsp_demo(const DirectedGraph& g, const Eigen::VectorXd& costs,
                     const AtspOptions& options) {
    validate(g);
    const int n = g.vertices;
    if (n < 2) throw InvalidInput("a tour needs at least two vertices");
    if (static_cast<std::int64_t>(n) * (n - 1) > 64)
        throw SizeExceeded("demo supports at most 8 vertices");
    if (costs.size() != static_cast<Eigen::Index>(g.arcs.size()))
        throw DimensionMismatch("cost vector does not match the arc list");
    if (options.beta <= 0.0 || options.mix <= 0.0 || options.mix > 0.5 ||
        options.epsilon <= 0.0)
        throw InvalidInput("beta and epsilon must be positive, mix in (0, 0.5]");

    // The shortcut step jumps between arbitrary vertex pairs, so every
    // ordered pair must carry an arc.
    Eigen::MatrixXi arc_index = Eigen::MatrixXi::Constant(n, n, -1);
    for (std::size_t a = 0; a < g.arcs.size(); ++a) {
        const auto& [u, v] = g.arcs[a];
        if (u == v) throw NoHamiltonianClosure("self-loops cannot join a tour");
        arc_index(u, v) = static_cast<int>(a);
    }
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v && arc_index(u, v) < 0)
                throw NoHamiltonianClosure("arc " + std::to_string(u) + "->" +
                                           std::to_string(v) + " is missing");

    if (options.marginals.size() != 0) {
        if (options.marginals.size() != costs.size())
            throw DimensionMismatch("first-round marginals do not match the arc list");
        check_degree_sums(options.marginals, g);
    }

    std::mt19937_64 rng(options.seed);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = i;

    AtspResult result;
    while (labels.size() >= 2) {
        ++result.rounds;
        const int k = static_cast<int>(labels.size());
        const DirectedGraph gk = complete_digraph(k);
        const Family fam = Family::cycle_covers(gk);
        const int mk = static_cast<int>(gk.arcs.size());

        Eigen::VectorXd theta_raw(mk);
        if (result.rounds == 1 && options.marginals.size() != 0) {
            for (int a = 0; a < mk; ++a)
                theta_raw(a) =
                    options.marginals(arc_index(gk.arcs[a].first, gk.arcs[a].second));
        } else {
            // Marginals of the soft-min cost distribution over covers; they
            // lie in the hull by construction.
            Eigen::VectorXd lam(mk);
            for (int a = 0; a < mk; ++a)
                lam(a) = options.beta *
                         costs(arc_index(labels[gk.arcs[a].first], labels[gk.arcs[a].second]));
            const EnumerationOracle oracle(fam, options.enumerate_cap);
            theta_raw = marginals_of(lam, oracle);
        }

        const InteriorPointResult ip = interior_point(fam, options.enumerate_cap);
        SolveRequest req;
        req.family = fam;
        req.theta = (1.0 - options.mix) * theta_raw + options.mix * ip.theta;
        req.eta = options.mix * ip.eta;
        req.epsilon = options.epsilon;
        SolverConfig cfg;
        cfg.enumerate_cap = options.enumerate_cap;
        const SolveResult solved = solve_exact(req, cfg);

        const std::uint64_t mask =
            sample_family(fam, solved.lambda, 1, rng(), options.enumerate_cap)
                .members.front();
        MAXENT_LOG(1) << "round " << result.rounds << ": " << k
                      << " components, dual value " << solved.f_value;

        // Decompose the sampled cover into cycles and contract each one to
        // its smallest original label.
        std::vector<int> succ(k, -1);
        for (int a = 0; a < mk; ++a)
            if (mask >> a & 1) succ[gk.arcs[a].first] = gk.arcs[a].second;
        for (int i = 0; i < k; ++i)
            result.chosen_arcs.emplace_back(labels[i], labels[succ[i]]);

        std::vector<int> next_labels;
        std::vector<char> visited(k, 0);
        for (int i = 0; i < k; ++i) {
            if (visited[i]) continue;
            int rep = labels[i];
            for (int j = i; !visited[j]; j = succ[j]) {
                visited[j] = 1;
                rep = std::min(rep, labels[j]);
            }
            next_labels.push_back(rep);
        }
        std::sort(next_labels.begin(), next_labels.end());
        labels = std::move(next_labels);
    }

    // Eulerian circuit over the sampled arcs (in- and out-degrees match at
    // every vertex, and the contraction chain makes the union connected).
    std::map<int, std::vector<int>> adj;
    for (const auto& [u, v] : result.chosen_arcs) adj[u].push_back(v);
    std::map<int, std::size_t> next_arc;
    std::vector<int> stack{0}, circuit;
    while (!stack.empty()) {
        const int v = stack.back();
        if (next_arc[v] < adj[v].size())
            stack.push_back(adj[v][next_arc[v]++]);
        else {
            circuit.push_back(v);
            stack.pop_back();
        }
    }
    std::reverse(circuit.begin(), circuit.end());

    std::vector<char> seen(n, 0);
    for (int v : circuit)
        if (!seen[v]) {
            seen[v] = 1;
            result.tour.push_back(v);
        }
    for (std::size_t i = 0; i < result.tour.size(); ++i) {
        const int u = result.tour[i];
        const int v = result.tour[(i + 1) % result.tour.size()];
        result.tour_cost += costs(arc_index(u, v));
    }
    return result;
}

} // namespace maxent
