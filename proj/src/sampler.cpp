#include "maxent/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "maxent/counting.hpp"
#include "maxent/errors.hpp"

namespace maxent {

namespace {

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

double log_sum_exp(const std::vector<double>& values) {
    const double top = *std::max_element(values.begin(), values.end());
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - top);
    return top + std::log(acc);
}

} // namespace

SampleBatch sample_enumerate(const Family& family, const Eigen::VectorXd& lambda,
                             std::size_t draws, std::uint64_t seed,
                             std::size_t enumerate_cap) {
    const int m = family.ground_set_size();
    if (lambda.size() != m) throw DimensionMismatch("weights have wrong dimension");
    const auto& mem = family.members(enumerate_cap);
    if (mem.empty()) throw EmptyFamily("family has no members");

    // Cumulative weights, stabilized by the largest exponent.
    std::vector<double> expo(mem.size());
    for (std::size_t i = 0; i < mem.size(); ++i) {
        double w = 0.0;
        for (std::uint64_t bits = mem[i]; bits != 0; bits &= bits - 1)
            w -= lambda(std::countr_zero(bits));
        expo[i] = w;
    }
    const double top = *std::max_element(expo.begin(), expo.end());
    std::vector<double> cum(mem.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < mem.size(); ++i) {
        acc += std::exp(expo[i] - top);
        cum[i] = acc;
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SampleBatch out;
    out.members.reserve(draws);
    for (std::size_t d = 0; d < draws; ++d) {
        const double target = unit(rng) * acc;
        const auto it = std::upper_bound(cum.begin(), cum.end(), target);
        const std::size_t idx =
            std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), mem.size() - 1);
        out.members.push_back(mem[idx]);
    }
    return out;
}

SampleBatch sample_spanning_trees(const UndirectedGraph& g, const Eigen::VectorXd& lambda,
                                  std::size_t draws, std::uint64_t seed) {
    validate(g);
    const int m = static_cast<int>(g.edges.size());
    if (lambda.size() != m) throw DimensionMismatch("weights have wrong dimension");
    {
        // Fail early on graphs without spanning trees.
        Dsu dsu(g.vertices);
        for (const auto& [a, b] : g.edges) dsu.unite(a, b);
        for (int v = 1; v < g.vertices; ++v)
            if (dsu.find(v) != dsu.find(0)) throw Disconnected("graph is not connected");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Weighted tree count of the undecided part of the graph under vertex
    // relabeling `comp`, skipping edges below `first` (already decided) and
    // optionally pre-merging the endpoints of edge `contract`.
    auto log_tree_count = [&](const std::vector<int>& comp, int vertices, int first,
                              int contracted_edge) -> double {
        std::vector<int> label = comp;
        int n = vertices;
        if (contracted_edge >= 0) {
            const int cu = label[g.edges[contracted_edge].first];
            const int cv = label[g.edges[contracted_edge].second];
            const int keep = std::min(cu, cv);
            const int drop = std::max(cu, cv);
            for (int& l : label)
                if (l == drop)
                    l = keep;
                else if (l > drop)
                    --l;
            --n;
        }
        if (n == 1) return 0.0; // the empty tree, with weight one

        // Merge parallel edges; a tree can use at most one copy, so copies
        // add up and a single edge with the summed weight counts the same.
        std::map<std::pair<int, int>, std::vector<double>> groups;
        for (int e = first; e < m; ++e) {
            if (e == contracted_edge) continue;
            int a = label[g.edges[e].first];
            int b = label[g.edges[e].second];
            if (a == b) continue;
            groups[{std::min(a, b), std::max(a, b)}].push_back(-lambda(e));
        }
        UndirectedGraph h;
        h.vertices = n;
        Eigen::VectorXd merged(static_cast<Eigen::Index>(groups.size()));
        Eigen::Index i = 0;
        for (const auto& [key, logs] : groups) {
            h.edges.push_back(key);
            merged(i++) = -log_sum_exp(logs);
        }
        return count_spanning_trees(h, merged).log_Z;
    };

    SampleBatch out;
    out.members.reserve(draws);
    for (std::size_t d = 0; d < draws; ++d) {
        std::vector<int> comp(g.vertices);
        std::iota(comp.begin(), comp.end(), 0);
        int vertices = g.vertices;
        std::uint64_t mask = 0;

        for (int e = 0; e < m; ++e) {
            const int cu = comp[g.edges[e].first];
            const int cv = comp[g.edges[e].second];
            if (cu == cv) continue; // would close a cycle: excluded for sure

            // An edge whose removal disconnects the undecided graph is in
            // every remaining tree; forcing it sidesteps the roundoff of a
            // probability that is exactly one.
            bool forced = false;
            {
                Dsu dsu(vertices);
                for (int e2 = e + 1; e2 < m; ++e2) {
                    const int a = comp[g.edges[e2].first];
                    const int b = comp[g.edges[e2].second];
                    if (a != b) dsu.unite(a, b);
                }
                forced = dsu.find(cu) != dsu.find(cv);
            }

            bool include = true;
            if (!forced) {
                const double log_all = log_tree_count(comp, vertices, e, -1);
                const double log_with = -lambda(e) + log_tree_count(comp, vertices, e, e);
                const double p = std::min(1.0, std::exp(log_with - log_all));
                include = unit(rng) < p;
            }
            if (include) {
                mask |= std::uint64_t{1} << e;
                const int keep = std::min(cu, cv);
                const int drop = std::max(cu, cv);
                for (int& l : comp)
                    if (l == drop)
                        l = keep;
                    else if (l > drop)
                        --l;
                --vertices;
                if (vertices == 1) break;
            }
        }
        out.members.push_back(mask);
    }
    return out;
}

SampleBatch sample_family(const Family& family, const Eigen::VectorXd& lambda,
                          std::size_t draws, std::uint64_t seed,
                          std::size_t enumerate_cap) {
    if (family.kind() == FamilyKind::SpanningTrees)
        return sample_spanning_trees(family.undirected(), lambda, draws, seed);
    return sample_enumerate(family, lambda, draws, seed, enumerate_cap);
}

} // namespace maxent
