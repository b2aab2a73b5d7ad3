#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/Dense>

#include "maxent/errors.hpp"
#include "maxent/family.hpp"

namespace maxent {

// Weighted counts over a family at weights lambda. Every member M carries
// weight exp(-sum_{e in M} lambda_e); Z sums them all, Z_e sums the members
// containing element e. Values are kept in the natural-log domain so that
// large weight spreads do not overflow; log_Z_e(e) == -infinity encodes an
// element that appears in no member.
struct CountResult {
    double log_Z = 0.0;
    Eigen::VectorXd log_Z_e;
};

class CountingOracle {
public:
    virtual ~CountingOracle() = default;
    virtual int ground_set_size() const = 0;
    virtual CountResult count(const Eigen::VectorXd& lambda) const = 0;
};

// Exact counting by a single pass over the enumerated member list.
class EnumerationOracle final : public CountingOracle {
public:
    explicit EnumerationOracle(Family family, std::size_t cap = kDefaultEnumerateCap);
    int ground_set_size() const override { return m_; }
    CountResult count(const Eigen::VectorXd& lambda) const override;

private:
    int m_;
    std::vector<std::uint64_t> members_;
};

// Weighted spanning tree counts through determinants of the reduced graph
// Laplacian; per-edge counts by contracting the edge, which keeps every
// determinant a sum of positive terms (deleting and subtracting instead
// cancels catastrophically when the edge carries most of the weight).
class SpanningTreeOracle final : public CountingOracle {
public:
    explicit SpanningTreeOracle(UndirectedGraph g);
    int ground_set_size() const override { return static_cast<int>(graph_.edges.size()); }
    CountResult count(const Eigen::VectorXd& lambda) const override;

private:
    UndirectedGraph graph_;
};

// Weighted perfect matching counts of a square bipartite graph via the
// inclusion-exclusion permanent expansion (cost 2^n, capped at n <= 20).
class BipartitePmOracle final : public CountingOracle {
public:
    explicit BipartitePmOracle(BipartiteGraph g);
    int ground_set_size() const override { return static_cast<int>(graph_.edges.size()); }
    CountResult count(const Eigen::VectorXd& lambda) const override;

private:
    BipartiteGraph graph_;
};

// Cycle cover counts of a digraph, reduced to perfect matchings between
// out-sides and in-sides of the vertices.
class CycleCoverOracle final : public CountingOracle {
public:
    explicit CycleCoverOracle(DirectedGraph g);
    int ground_set_size() const override { return static_cast<int>(inner_.ground_set_size()); }
    CountResult count(const Eigen::VectorXd& lambda) const override;

private:
    BipartitePmOracle inner_;
};

// Simulated approximate oracle: multiplies every output of the base oracle
// by a factor inside [1 - epsilon, 1 + epsilon].
//
// Deterministic mode inflates Z by (1 + eps) and alternates Z_e between
// deflation (even e) and inflation (odd e). SeededUniform derives the factor
// from (seed, lambda, output index) with a hash, so a given call always sees
// the same noise regardless of call order.
struct NoiseSpec {
    enum class Mode { Deterministic, SeededUniform };
    double epsilon = 0.0;
    Mode mode = Mode::Deterministic;
    std::uint64_t seed = 0;
};

class NoisyOracle final : public CountingOracle {
public:
    NoisyOracle(std::shared_ptr<const CountingOracle> base, NoiseSpec spec);
    int ground_set_size() const override { return base_->ground_set_size(); }
    CountResult count(const Eigen::VectorXd& lambda) const override;
    const NoiseSpec& spec() const { return spec_; }

private:
    std::shared_ptr<const CountingOracle> base_;
    NoiseSpec spec_;
};

// Convenience wrappers.
CountResult count_enumerate(const Family& family, const Eigen::VectorXd& lambda,
                            std::size_t cap = kDefaultEnumerateCap);
CountResult count_spanning_trees(const UndirectedGraph& g, const Eigen::VectorXd& lambda);
CountResult count_bipartite_pm(const BipartiteGraph& g, const Eigen::VectorXd& lambda);
CountResult count_cycle_covers(const DirectedGraph& g, const Eigen::VectorXd& lambda);
std::shared_ptr<const CountingOracle> noisy_oracle(std::shared_ptr<const CountingOracle> base,
                                                   NoiseSpec spec);

// Exact oracle for any family kind. Enumeration-backed: the solvers probe
// weights with coordinates up to m/eta, where determinant and permanent
// backends can overflow, while the log-sum-exp pass cannot. The specialized
// oracles remain available for direct counting queries.
std::shared_ptr<const CountingOracle> make_exact_oracle(const Family& family,
                                                        std::size_t cap = kDefaultEnumerateCap);

} // namespace maxent
