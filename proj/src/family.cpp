#include "maxent/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "maxent/simplex_lp.hpp"

namespace maxent {

namespace {

constexpr int kMaxGroundSet = 64;
constexpr double kRankTol = 1e-9;

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    }
    // Returns false when both endpoints are already in one component.
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(b)] = a;
        return true;
    }
};

void check_ground_set(std::size_t m) {
    if (m > kMaxGroundSet)
        throw InvalidFamily("ground sets larger than 64 elements are not supported");
}

// All spanning trees of g, one bit mask per tree. Classic include/exclude
// recursion over the edge list; the exclude branch is pruned whenever the
// still-available edges can no longer connect the graph, so every visited
// leaf is a tree.
std::vector<std::uint64_t> enumerate_spanning_trees(const UndirectedGraph& g,
                                                    std::size_t cap) {
    const int n = g.vertices;
    const int m = static_cast<int>(g.edges.size());
    std::vector<std::uint64_t> out;
    if (n == 0) return out;
    if (n == 1) {
        out.push_back(0);
        return out;
    }

    auto connects = [&](const Dsu& partial, int from) {
        Dsu probe = partial;
        int merges = 0;
        for (int i = from; i < m; ++i)
            if (probe.unite(g.edges[static_cast<std::size_t>(i)].first,
                            g.edges[static_cast<std::size_t>(i)].second))
                ++merges;
        int root = probe.find(0);
        for (int v = 1; v < n; ++v)
            if (probe.find(v) != root) return false;
        (void)merges;
        return true;
    };

    struct Frame {
        int idx;
        int components;
        std::uint64_t chosen;
        Dsu dsu;
    };

    std::vector<Frame> stack;
    if (!connects(Dsu(n), 0)) return out; // disconnected graph, no trees
    stack.push_back({0, n, 0, Dsu(n)});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (f.components == 1) {
            out.push_back(f.chosen);
            if (out.size() > cap) throw CapExceeded("spanning tree enumeration exceeded cap");
            continue;
        }
        if (f.idx >= m) continue;
        const auto [u, v] = g.edges[static_cast<std::size_t>(f.idx)];
        // Exclude branch first so trees come out in increasing mask order of
        // later edges; pushed first means popped last, keeping the include
        // branch (lexicographically smaller index sets) first in the output.
        if (connects(f.dsu, f.idx + 1))
            stack.push_back({f.idx + 1, f.components, f.chosen, f.dsu});
        Dsu with = f.dsu;
        if (with.unite(u, v))
            stack.push_back({f.idx + 1, f.components - 1,
                             f.chosen | (std::uint64_t{1} << f.idx), std::move(with)});
    }
    // The stack discipline above emits trees in reverse preorder; normalize to
    // the deterministic preorder of the recursion.
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<std::uint64_t> enumerate_matchings(const BipartiteGraph& g, std::size_t cap) {
    std::vector<std::uint64_t> out;
    if (g.left != g.right) return out; // a perfect matching must cover both sides
    const int n = g.left;
    if (n == 0) {
        out.push_back(0);
        return out;
    }
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
        adj[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].first)]
            .emplace_back(e, g.edges[static_cast<std::size_t>(e)].second);

    std::vector<bool> used(static_cast<std::size_t>(n), false);
    std::uint64_t chosen = 0;
    auto rec = [&](auto&& self, int i) -> void {
        if (i == n) {
            out.push_back(chosen);
            if (out.size() > cap) throw CapExceeded("matching enumeration exceeded cap");
            return;
        }
        for (const auto& [e, j] : adj[static_cast<std::size_t>(i)]) {
            if (used[static_cast<std::size_t>(j)]) continue;
            used[static_cast<std::size_t>(j)] = true;
            chosen |= std::uint64_t{1} << e;
            self(self, i + 1);
            chosen &= ~(std::uint64_t{1} << e);
            used[static_cast<std::size_t>(j)] = false;
        }
    };
    rec(rec, 0);
    return out;
}

// A cycle cover picks exactly one outgoing and one incoming arc per vertex,
// which is a perfect matching between out-sides and in-sides.
BipartiteGraph double_cover(const DirectedGraph& g) {
    BipartiteGraph b;
    b.left = b.right = g.vertices;
    b.edges = g.arcs;
    return b;
}

} // namespace

void validate(const UndirectedGraph& g) {
    std::set<std::pair<int, int>> seen;
    for (const auto& [u, v] : g.edges) {
        if (u < 0 || v < 0 || u >= g.vertices || v >= g.vertices)
            throw InvalidFamily("edge endpoint out of range");
        if (u == v) throw InvalidFamily("self-loops are not allowed");
        auto key = std::minmax(u, v);
        if (!seen.insert(key).second) throw InvalidFamily("duplicate edge");
    }
}

void validate(const DirectedGraph& g) {
    std::set<std::pair<int, int>> seen;
    for (const auto& [u, v] : g.arcs) {
        if (u < 0 || v < 0 || u >= g.vertices || v >= g.vertices)
            throw InvalidFamily("arc endpoint out of range");
        if (!seen.insert({u, v}).second) throw InvalidFamily("duplicate arc");
    }
}

void validate(const BipartiteGraph& g) {
    std::set<std::pair<int, int>> seen;
    for (const auto& [i, j] : g.edges) {
        if (i < 0 || j < 0 || i >= g.left || j >= g.right)
            throw InvalidFamily("edge endpoint out of range");
        if (!seen.insert({i, j}).second) throw InvalidFamily("duplicate edge");
    }
}

struct Family::Cache {
    std::vector<std::uint64_t> members;
    bool filled = false;
};

Family Family::explicit_members(int ground_set, std::vector<std::uint64_t> members) {
    if (ground_set < 0) throw InvalidFamily("negative ground set size");
    check_ground_set(static_cast<std::size_t>(ground_set));
    const std::uint64_t limit =
        ground_set == 64 ? ~std::uint64_t{0}
                         : (std::uint64_t{1} << ground_set) - 1;
    std::set<std::uint64_t> seen;
    for (std::uint64_t mask : members) {
        if ((mask & ~limit) != 0) throw InvalidFamily("member uses element outside ground set");
        if (!seen.insert(mask).second) throw InvalidFamily("duplicate member");
    }
    Family f;
    f.kind_ = FamilyKind::Explicit;
    f.m_ = ground_set;
    f.explicit_members_ = std::move(members);
    f.cache_ = std::make_shared<Cache>();
    return f;
}

Family Family::spanning_trees(UndirectedGraph g) {
    validate(g);
    check_ground_set(g.edges.size());
    Family f;
    f.kind_ = FamilyKind::SpanningTrees;
    f.m_ = static_cast<int>(g.edges.size());
    f.ugraph_ = std::move(g);
    f.cache_ = std::make_shared<Cache>();
    return f;
}

Family Family::bipartite_perfect_matchings(BipartiteGraph g) {
    validate(g);
    check_ground_set(g.edges.size());
    Family f;
    f.kind_ = FamilyKind::BipartitePerfectMatchings;
    f.m_ = static_cast<int>(g.edges.size());
    f.bgraph_ = std::move(g);
    f.cache_ = std::make_shared<Cache>();
    return f;
}

Family Family::cycle_covers(DirectedGraph g) {
    validate(g);
    check_ground_set(g.arcs.size());
    Family f;
    f.kind_ = FamilyKind::CycleCovers;
    f.m_ = static_cast<int>(g.arcs.size());
    f.dgraph_ = std::move(g);
    f.cache_ = std::make_shared<Cache>();
    return f;
}

const UndirectedGraph& Family::undirected() const {
    if (kind_ != FamilyKind::SpanningTrees) throw InvalidFamily("not a spanning tree family");
    return ugraph_;
}

const BipartiteGraph& Family::bipartite() const {
    if (kind_ != FamilyKind::BipartitePerfectMatchings)
        throw InvalidFamily("not a matching family");
    return bgraph_;
}

const DirectedGraph& Family::directed() const {
    if (kind_ != FamilyKind::CycleCovers) throw InvalidFamily("not a cycle cover family");
    return dgraph_;
}

const std::vector<std::uint64_t>& Family::members(std::size_t cap) const {
    if (!cache_->filled) {
        switch (kind_) {
            case FamilyKind::Explicit:
                cache_->members = explicit_members_;
                if (cache_->members.size() > cap)
                    throw CapExceeded("explicit member list exceeds cap");
                break;
            case FamilyKind::SpanningTrees:
                cache_->members = enumerate_spanning_trees(ugraph_, cap);
                break;
            case FamilyKind::BipartitePerfectMatchings:
                cache_->members = enumerate_matchings(bgraph_, cap);
                break;
            case FamilyKind::CycleCovers:
                cache_->members = enumerate_matchings(double_cover(dgraph_), cap);
                break;
        }
        cache_->filled = true;
    } else if (cache_->members.size() > cap) {
        throw CapExceeded("member list exceeds cap");
    }
    return cache_->members;
}

std::vector<std::uint64_t> enumerate_members(const Family& family, std::size_t cap) {
    return family.members(cap);
}

Eigen::VectorXd indicator(std::uint64_t member, int m) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    for (int e = 0; e < m; ++e)
        if (member & (std::uint64_t{1} << e)) v(e) = 1.0;
    return v;
}

Eigen::VectorXd vertex_centroid(const Family& family) {
    const auto& members = family.members();
    if (members.empty()) throw InvalidFamily("family has no members");
    const int m = family.ground_set_size();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
    for (std::uint64_t mask : members)
        for (int e = 0; e < m; ++e)
            if (mask & (std::uint64_t{1} << e)) sum(e) += 1.0;
    return sum / static_cast<double>(members.size());
}

namespace {

// Orthonormal basis of the affine directions spanned by the members,
// via twice-iterated Gram-Schmidt over (v - v0).
Eigen::MatrixXd affine_direction_basis(const std::vector<std::uint64_t>& members, int m) {
    Eigen::MatrixXd u(m, m);
    int d = 0;
    const Eigen::VectorXd v0 = indicator(members.front(), m);
    for (std::uint64_t mask : members) {
        Eigen::VectorXd r = indicator(mask, m) - v0;
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < d; ++j) r -= u.col(j).dot(r) * u.col(j);
        if (r.norm() > kRankTol) {
            u.col(d++) = r.normalized();
            if (d == m) break;
        }
    }
    return u.leftCols(d);
}

std::vector<std::pair<Eigen::VectorXd, double>> closed_form_rows(const Family& family) {
    std::vector<std::pair<Eigen::VectorXd, double>> rows;
    const int m = family.ground_set_size();
    switch (family.kind()) {
        case FamilyKind::SpanningTrees: {
            // Every spanning tree has exactly |V| - 1 edges.
            rows.emplace_back(Eigen::VectorXd::Ones(m),
                              static_cast<double>(family.undirected().vertices - 1));
            break;
        }
        case FamilyKind::BipartitePerfectMatchings: {
            const auto& g = family.bipartite();
            for (int i = 0; i < g.left; ++i) {
                Eigen::VectorXd row = Eigen::VectorXd::Zero(m);
                for (int e = 0; e < m; ++e)
                    if (g.edges[static_cast<std::size_t>(e)].first == i) row(e) = 1.0;
                rows.emplace_back(std::move(row), 1.0);
            }
            for (int j = 0; j < g.right; ++j) {
                Eigen::VectorXd row = Eigen::VectorXd::Zero(m);
                for (int e = 0; e < m; ++e)
                    if (g.edges[static_cast<std::size_t>(e)].second == j) row(e) = 1.0;
                rows.emplace_back(std::move(row), 1.0);
            }
            break;
        }
        case FamilyKind::CycleCovers: {
            const auto& g = family.directed();
            for (int v = 0; v < g.vertices; ++v) {
                Eigen::VectorXd row = Eigen::VectorXd::Zero(m);
                for (int e = 0; e < m; ++e)
                    if (g.arcs[static_cast<std::size_t>(e)].first == v) row(e) = 1.0;
                rows.emplace_back(std::move(row), 1.0);
            }
            for (int v = 0; v < g.vertices; ++v) {
                Eigen::VectorXd row = Eigen::VectorXd::Zero(m);
                for (int e = 0; e < m; ++e)
                    if (g.arcs[static_cast<std::size_t>(e)].second == v) row(e) = 1.0;
                rows.emplace_back(std::move(row), 1.0);
            }
            break;
        }
        case FamilyKind::Explicit:
            break;
    }
    return rows;
}

bool holds_on_all(const Eigen::VectorXd& row, double b,
                  const std::vector<std::uint64_t>& members, int m) {
    for (std::uint64_t mask : members) {
        double dot = 0.0;
        for (int e = 0; e < m; ++e)
            if (mask & (std::uint64_t{1} << e)) dot += row(e);
        if (std::abs(dot - b) > 1e-9) return false;
    }
    return true;
}

} // namespace

EqualitySystem equality_system(const Family& family) {
    const auto& members = family.members();
    if (members.empty()) throw InvalidFamily("family has no members");
    const int m = family.ground_set_size();
    const Eigen::VectorXd v0 = indicator(members.front(), m);

    const Eigen::MatrixXd dirs = affine_direction_basis(members, m);
    const int affine_dim = static_cast<int>(dirs.cols());
    const int target_rank = m - affine_dim;

    // Orthonormal complement of the affine directions; closed-form rows lie in
    // its span, and it supplies the augmentation rows when they fall short.
    Eigen::MatrixXd complement;
    if (affine_dim == 0) {
        complement = Eigen::MatrixXd::Identity(m, m);
    } else {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(dirs);
        Eigen::MatrixXd q = qr.householderQ();
        complement = q.rightCols(m - affine_dim);
    }

    std::vector<Eigen::VectorXd> rows;
    std::vector<double> rhs;
    Eigen::MatrixXd gram(m, target_rank); // orthonormalized row space
    int rank = 0;
    auto try_add = [&](const Eigen::VectorXd& a, double b) {
        if (rank == target_rank) return;
        Eigen::VectorXd r = a;
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < rank; ++j) r -= gram.col(j).dot(r) * gram.col(j);
        if (r.norm() <= kRankTol * std::max(1.0, a.norm())) return;
        rows.push_back(a);
        rhs.push_back(b);
        gram.col(rank++) = r.normalized();
    };

    for (const auto& [a, b] : closed_form_rows(family)) {
        if (!holds_on_all(a, b, members, m)) continue;
        try_add(a, b);
    }
    for (int j = 0; j < complement.cols() && rank < target_rank; ++j) {
        const Eigen::VectorXd a = complement.col(j);
        try_add(a, a.dot(v0));
    }
    if (rank != target_rank)
        throw NumericalFailure("failed to complete the equality system");

    EqualitySystem sys;
    sys.A.resize(rank, m);
    sys.b.resize(rank);
    for (int i = 0; i < rank; ++i) {
        sys.A.row(i) = rows[static_cast<std::size_t>(i)].transpose();
        sys.b(i) = rhs[static_cast<std::size_t>(i)];
    }
    return sys;
}

namespace detail {

SeparationAnswer hull_separation_points(const Eigen::MatrixXd& vertices,
                                        const Eigen::VectorXd& x) {
    const Eigen::Index m = vertices.rows();
    const Eigen::Index n = vertices.cols();
    Eigen::MatrixXd constraints(m + 1, n);
    constraints.topRows(m) = vertices;
    constraints.row(m).setOnes();
    Eigen::VectorXd rhs(m + 1);
    rhs.head(m) = x;
    rhs(m) = 1.0;

    auto lp = phase_one_feasible(constraints, rhs, 1e-9);
    SeparationAnswer ans;
    if (lp.feasible) {
        ans.inside = true;
        return ans;
    }

    Eigen::VectorXd a = lp.certificate.head(m);
    if (a.norm() <= 1e-12) {
        // Certificate degenerated to the normalization row; cannot happen for
        // a genuinely separated point, so report membership conservatively.
        ans.inside = true;
        return ans;
    }
    a.normalize();
    double offset = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) offset = std::max(offset, a.dot(vertices.col(j)));
    if (a.dot(x) <= offset) {
        ans.inside = true; // the strict violation did not survive normalization
        return ans;
    }
    ans.inside = false;
    ans.normal = a;
    ans.offset = offset;
    return ans;
}

} // namespace detail

SeparationAnswer hull_separation(const Family& family, const Eigen::VectorXd& x) {
    const int m = family.ground_set_size();
    if (x.size() != m) throw DimensionMismatch("query point has wrong dimension");
    const auto& members = family.members();
    if (members.empty()) throw InvalidFamily("family has no members");
    if (members.size() > 200'000)
        throw CapExceeded("hull separation over this many members is not supported");
    Eigen::MatrixXd vertices(m, static_cast<Eigen::Index>(members.size()));
    for (std::size_t j = 0; j < members.size(); ++j)
        vertices.col(static_cast<Eigen::Index>(j)) = indicator(members[j], m);
    return detail::hull_separation_points(vertices, x);
}

} // namespace maxent
