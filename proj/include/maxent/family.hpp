#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "maxent/errors.hpp"
#include "maxent/graphs.hpp"

namespace maxent {

// A set family over a ground set of m <= 64 elements. Members are encoded as
// bit masks: bit e set means element e belongs to the member. The convex hull
// of the member indicator vectors is the polytope all other modules work
// with; its vertices are exactly the members because indicators are 0/1.
enum class FamilyKind {
    Explicit,
    SpanningTrees,
    BipartitePerfectMatchings,
    CycleCovers,
};

inline constexpr std::size_t kDefaultEnumerateCap = 1'000'000;

class Family {
public:
    // Empty explicit family over an empty ground set; a placeholder meant to
    // be overwritten by a factory result before use.
    Family() = default;

    static Family explicit_members(int ground_set, std::vector<std::uint64_t> members);
    static Family spanning_trees(UndirectedGraph g);
    static Family bipartite_perfect_matchings(BipartiteGraph g);
    static Family cycle_covers(DirectedGraph g);

    FamilyKind kind() const { return kind_; }
    int ground_set_size() const { return m_; }

    const UndirectedGraph& undirected() const;
    const BipartiteGraph& bipartite() const;
    const DirectedGraph& directed() const;

    // Members in a deterministic order (construction order). The result is
    // cached, so repeated calls are cheap. Throws CapExceeded if more than
    // `cap` members exist.
    const std::vector<std::uint64_t>& members(std::size_t cap = kDefaultEnumerateCap) const;

private:
    FamilyKind kind_ = FamilyKind::Explicit;
    int m_ = 0;
    std::vector<std::uint64_t> explicit_members_;
    UndirectedGraph ugraph_;
    BipartiteGraph bgraph_;
    DirectedGraph dgraph_;

    struct Cache;
    std::shared_ptr<Cache> cache_;
};

// Maximal independent system A x = b satisfied by every member indicator.
// rank(A) always equals m minus the affine dimension of the member set.
struct EqualitySystem {
    Eigen::MatrixXd A; // k x m, rows linearly independent
    Eigen::VectorXd b; // k
};

// Answer of a convex-hull membership query. When `inside` is false, the
// hyperplane satisfies <normal, 1_M> <= offset for every member while
// <normal, x> > offset for the query point, and ||normal|| = 1.
struct SeparationAnswer {
    bool inside = false;
    Eigen::VectorXd normal;
    double offset = 0.0;
};

std::vector<std::uint64_t> enumerate_members(const Family& family,
                                             std::size_t cap = kDefaultEnumerateCap);

EqualitySystem equality_system(const Family& family);

SeparationAnswer hull_separation(const Family& family, const Eigen::VectorXd& x);

// Average of all member indicator vectors.
Eigen::VectorXd vertex_centroid(const Family& family);

// Expand a member mask into a dense 0/1 indicator vector.
Eigen::VectorXd indicator(std::uint64_t member, int m);

namespace detail {

// Hull membership against an explicit vertex matrix (columns = vertices).
// Shared by hull_separation and by callers that already hold the vertices.
SeparationAnswer hull_separation_points(const Eigen::MatrixXd& vertices,
                                        const Eigen::VectorXd& x);

} // namespace detail

} // namespace maxent
