#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "maxent/family.hpp"
#include "maxent/graphs.hpp"

namespace testsupport {

// ---- Fixed desk-scale families -------------------------------------------

maxent::Family triangle_trees();        // 3 spanning trees of the 3-cycle
maxent::Family k4_trees();              // 16 spanning trees of K4
maxent::Family k22_matchings();         // 2 perfect matchings of K_{2,2}
maxent::Family k33_matchings();         // 6 perfect matchings of K_{3,3}
std::vector<maxent::Family> desk_families();

// ---- Independent optimum oracle ------------------------------------------

// Iterative proportional fitting on the member distribution: converges to
// the max-entropy distribution with the requested marginals, entirely
// independent of the dual machinery under test.
struct IpfResult {
    bool converged = false;
    double entropy = 0.0;
    Eigen::VectorXd marginals;
    std::vector<double> probabilities; // in member enumeration order
};
IpfResult ipf_max_entropy(const maxent::Family& family, const Eigen::VectorXd& theta,
                          double tol = 1e-12, int max_sweeps = 200000);

// ---- Independent geometry oracle -----------------------------------------

// Depth of theta inside the member hull, measured within the affine hull,
// by brute-force facet enumeration (all r-subsets of vertices). Only
// suitable for small families. Negative values mean theta is outside.
double hull_depth(const maxent::Family& family, const Eigen::VectorXd& theta);

// ---- Statistics ----------------------------------------------------------

// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);
double chi_square_pvalue(double statistic, int dof);

// Exact member probabilities under weights lambda, in enumeration order.
std::vector<double> member_probabilities(const maxent::Family& family,
                                         const Eigen::VectorXd& lambda);

// Total variation between empirical draws and exact probabilities.
double total_variation(const maxent::Family& family, const Eigen::VectorXd& lambda,
                       const std::vector<std::uint64_t>& draws);

// Chi-square p-value of draws against the exact distribution.
double sampler_pvalue(const maxent::Family& family, const Eigen::VectorXd& lambda,
                      const std::vector<std::uint64_t>& draws);

// ---- Random instances ----------------------------------------------------

maxent::UndirectedGraph random_connected_graph(std::mt19937_64& rng, int vertices,
                                               int extra_edges);
maxent::BipartiteGraph random_bipartite_with_matching(std::mt19937_64& rng, int side,
                                                      int extra_edges);
maxent::DirectedGraph random_digraph_with_cover(std::mt19937_64& rng, int vertices,
                                                int extra_arcs);
maxent::Family random_explicit_family(std::mt19937_64& rng, int ground_set,
                                      int member_count);
Eigen::VectorXd random_lambda(std::mt19937_64& rng, int m, double scale);

// Random convex combination of the member indicators, mixed toward the
/// vertex centroid: (1 - mix) * random + mix * centroid.
Eigen::VectorXd random_interior_theta(std::mt19937_64& rng, const maxent::Family& family,
                                      double mix);

// ---- Process helper (CLI tests) ------------------------------------------

struct CliResult {
    int exit_code = -1;
    std::string output;
    std::string error;
};
CliResult run_cli(const std::string& binary, const std::vector<std::string>& args,
                  const std::string& stdin_text);

} // namespace testsupport
