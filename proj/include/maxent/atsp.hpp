#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "maxent/family.hpp"

namespace maxent {

// End-to-end demonstration pipeline on a complete digraph with arc costs:
// repeatedly fit a max-entropy distribution over cycle covers to target
// marginals, sample a cover from it, contract each sampled cycle to its
// smallest vertex, and recurse until one component remains. The union of
// sampled arcs has equal in- and out-degrees everywhere and is connected,
// so an Eulerian circuit exists; shortcutting repeated vertices yields a
// closed tour.
struct AtspOptions {
    double beta = 1.0;    // inverse temperature for cost-derived marginals
    double mix = 1e-3;    // blend toward a certified interior point
    double epsilon = 1e-4; // solver accuracy per round
    std::uint64_t seed = 0;
    Eigen::VectorXd marginals; // optional target for the first round, in the
                               // input's arc order; empty = cost-derived
    std::size_t enumerate_cap = kDefaultEnumerateCap;
};

struct AtspResult {
    std::vector<int> tour; // each vertex once; the tour closes back to front()
    double tour_cost = 0.0;
    int rounds = 0;
    std::vector<std::pair<int, int>> chosen_arcs; // all sampled arcs, original labels
};

// Requires the complete loop-free digraph on its vertices (every ordered
// pair present); throws NoHamiltonianClosure otherwise. `costs` follows the
// arc order of `g`. A supplied first-round marginal vector must have
// per-vertex in- and out-degree sums of one (else InfeasibleMarginals).
AtspResult atsp_demo(const DirectedGraph& g, const Eigen::VectorXd& costs,
                     const AtspOptions& options = {});

} // namespace maxent
