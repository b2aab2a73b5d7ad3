#include "maxent/counting.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <vector>

namespace maxent {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double member_weight_exponent(std::uint64_t mask, const Eigen::VectorXd& lambda) {
    double s = 0.0;
    while (mask) {
        const int e = std::countr_zero(mask);
        mask &= mask - 1;
        s += lambda(e);
    }
    return -s;
}

// log-det of an SPD matrix via an in-place Cholesky in extended precision.
// Throws NumericalFailure when a pivot is not strictly positive.
using MatrixLD = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

long double cholesky_log_det(MatrixLD a) {
    const Eigen::Index n = a.rows();
    long double log_det = 0.0L;
    for (Eigen::Index j = 0; j < n; ++j) {
        long double pivot = a(j, j);
        for (Eigen::Index k = 0; k < j; ++k) pivot -= a(j, k) * a(j, k);
        if (!(pivot > 0.0L) || !std::isfinite(static_cast<double>(pivot)))
            throw NumericalFailure("Cholesky pivot is not positive");
        const long double root = sqrtl(pivot);
        a(j, j) = root;
        log_det += 2.0L * logl(root);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            long double v = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) v -= a(i, k) * a(j, k);
            a(i, j) = v / root;
        }
    }
    return log_det;
}

bool graph_connected(const UndirectedGraph& g) {
    if (g.vertices <= 1) return true;
    std::vector<int> parent(static_cast<std::size_t>(g.vertices));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v)
            v = parent[static_cast<std::size_t>(v)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
        return v;
    };
    for (const auto& [u, v] : g.edges) {
        parent[static_cast<std::size_t>(find(u))] = find(v);
    }
    const int root = find(0);
    for (int v = 1; v < g.vertices; ++v)
        if (find(v) != root) return false;
    return true;
}

// Reduced (first row and column dropped) weighted Laplacian.
MatrixLD reduced_laplacian(int n, const std::vector<std::pair<int, int>>& edges,
                           const std::vector<long double>& weights) {
    MatrixLD lap = MatrixLD::Zero(n, n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        const long double w = weights[e];
        lap(u, u) += w;
        lap(v, v) += w;
        lap(u, v) -= w;
        lap(v, u) -= w;
    }
    return lap.bottomRightCorner(n - 1, n - 1);
}

// Permanent of a nonnegative square matrix by the inclusion-exclusion
// expansion over column subsets, Gray-code ordered, with compensated
// summation. Entries are expected to be scaled into [0, 1].
long double permanent(const MatrixLD& w) {
    const int n = static_cast<int>(w.rows());
    if (n == 0) return 1.0L;
    std::vector<long double> row_sum(static_cast<std::size_t>(n), 0.0L);
    long double total = 0.0L;
    long double comp = 0.0L; // Neumaier carry
    std::uint64_t gray = 0;
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < count; ++k) {
        const std::uint64_t next = k ^ (k >> 1);
        const std::uint64_t diff = next ^ gray;
        const int j = std::countr_zero(diff);
        const long double sign_col = (next & diff) ? 1.0L : -1.0L;
        for (int i = 0; i < n; ++i)
            row_sum[static_cast<std::size_t>(i)] += sign_col * w(i, j);
        gray = next;
        long double prod = ((n - std::popcount(next)) % 2 == 0) ? 1.0L : -1.0L;
        for (int i = 0; i < n; ++i) prod *= row_sum[static_cast<std::size_t>(i)];
        const long double t = total + prod;
        if (fabsl(total) >= fabsl(prod))
            comp += (total - t) + prod;
        else
            comp += (prod - t) + total;
        total = t;
    }
    return total + comp;
}

// Kuhn augmenting-path test for the existence of a perfect matching.
bool has_perfect_matching(int n, const std::vector<std::vector<int>>& adj) {
    std::vector<int> match_right(static_cast<std::size_t>(n), -1);
    std::vector<bool> visited;
    auto augment = [&](auto&& self, int i) -> bool {
        for (int j : adj[static_cast<std::size_t>(i)]) {
            if (visited[static_cast<std::size_t>(j)]) continue;
            visited[static_cast<std::size_t>(j)] = true;
            if (match_right[static_cast<std::size_t>(j)] < 0 ||
                self(self, match_right[static_cast<std::size_t>(j)])) {
                match_right[static_cast<std::size_t>(j)] = i;
                return true;
            }
        }
        return false;
    };
    for (int i = 0; i < n; ++i) {
        visited.assign(static_cast<std::size_t>(n), false);
        if (!augment(augment, i)) return false;
    }
    return true;
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t value) {
    for (int byte = 0; byte < 8; ++byte) {
        h ^= (value >> (8 * byte)) & 0xffu;
        h *= 0x100000001b3ull;
    }
    return h;
}

double hashed_unit(const NoiseSpec& spec, const Eigen::VectorXd& lambda, std::uint64_t tag) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    h = fnv1a(h, spec.seed);
    h = fnv1a(h, tag);
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(double));
        const double x = lambda(i);
        std::memcpy(&bits, &x, sizeof(bits));
        h = fnv1a(h, bits);
    }
    return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

} // namespace

EnumerationOracle::EnumerationOracle(Family family, std::size_t cap)
    : m_(family.ground_set_size()), members_(family.members(cap)) {}

CountResult EnumerationOracle::count(const Eigen::VectorXd& lambda) const {
    if (lambda.size() != m_) throw DimensionMismatch("weight vector has wrong dimension");
    if (members_.empty()) throw EmptyFamily("family has no members");

    double w_max = kNegInf;
    std::vector<double> w(members_.size());
    for (std::size_t i = 0; i < members_.size(); ++i) {
        w[i] = member_weight_exponent(members_[i], lambda);
        w_max = std::max(w_max, w[i]);
    }
    double z = 0.0;
    Eigen::VectorXd z_e = Eigen::VectorXd::Zero(m_);
    for (std::size_t i = 0; i < members_.size(); ++i) {
        const double s = std::exp(w[i] - w_max);
        z += s;
        std::uint64_t mask = members_[i];
        while (mask) {
            const int e = std::countr_zero(mask);
            mask &= mask - 1;
            z_e(e) += s;
        }
    }
    CountResult res;
    res.log_Z = std::log(z) + w_max;
    res.log_Z_e.resize(m_);
    for (int e = 0; e < m_; ++e)
        res.log_Z_e(e) = z_e(e) > 0.0 ? std::log(z_e(e)) + w_max : kNegInf;
    return res;
}

SpanningTreeOracle::SpanningTreeOracle(UndirectedGraph g) : graph_(std::move(g)) {
    validate(graph_);
}

CountResult SpanningTreeOracle::count(const Eigen::VectorXd& lambda) const {
    const int n = graph_.vertices;
    const int m = static_cast<int>(graph_.edges.size());
    if (lambda.size() != m) throw DimensionMismatch("weight vector has wrong dimension");
    if (n == 0) throw EmptyFamily("graph has no vertices");
    if (!graph_connected(graph_)) throw Disconnected("graph is disconnected");

    CountResult res;
    res.log_Z_e.resize(m);
    if (n == 1) {
        res.log_Z = 0.0;
        return res;
    }

    // Every tree has exactly n-1 edges, so a uniform shift of the weights
    // rescales Z by a known factor; shifting by the minimum keeps all edge
    // factors in (0, 1].
    const double shift = lambda.minCoeff();
    std::vector<long double> gamma(static_cast<std::size_t>(m));
    for (int e = 0; e < m; ++e)
        gamma[static_cast<std::size_t>(e)] = expl(-static_cast<long double>(lambda(e) - shift));
    const double scale = static_cast<double>(n - 1) * shift;

    const long double log_det =
        cholesky_log_det(reduced_laplacian(n, graph_.edges, gamma));
    res.log_Z = static_cast<double>(log_det) - scale;

    // Per-edge counts by contraction: trees through e are trees of the graph
    // with e collapsed, weighted by gamma_e. All terms stay positive, so no
    // cancellation occurs even for edges with tiny marginals.
    for (int e = 0; e < m; ++e) {
        const auto [cu, cv] = graph_.edges[static_cast<std::size_t>(e)];
        std::vector<std::pair<int, int>> edges;
        std::vector<long double> weights;
        edges.reserve(static_cast<std::size_t>(m - 1));
        weights.reserve(static_cast<std::size_t>(m - 1));
        auto remap = [&](int v) {
            if (v == cv) v = cu;          // merge cv into cu
            if (v > cv) --v;              // close the label gap
            return v;
        };
        for (int f = 0; f < m; ++f) {
            if (f == e) continue;
            const auto [u, v] = graph_.edges[static_cast<std::size_t>(f)];
            const int ru = remap(u), rv = remap(v);
            if (ru == rv) continue; // became a loop, cannot join e in a tree
            edges.emplace_back(ru, rv);
            weights.push_back(gamma[static_cast<std::size_t>(f)]);
        }
        if (n == 2) {
            // Contracting the only cut pair leaves a single vertex.
            res.log_Z_e(e) =
                -static_cast<double>(lambda(e) - shift) - scale;
            continue;
        }
        const long double contracted =
            cholesky_log_det(reduced_laplacian(n - 1, edges, weights));
        res.log_Z_e(e) = -static_cast<double>(lambda(e) - shift) +
                         static_cast<double>(contracted) - scale;
    }
    return res;
}

BipartitePmOracle::BipartitePmOracle(BipartiteGraph g) : graph_(std::move(g)) {
    validate(graph_);
}

CountResult BipartitePmOracle::count(const Eigen::VectorXd& lambda) const {
    const int m = static_cast<int>(graph_.edges.size());
    if (lambda.size() != m) throw DimensionMismatch("weight vector has wrong dimension");
    if (graph_.left != graph_.right)
        throw SideMismatch("perfect matchings need equal side sizes");
    const int n = graph_.left;
    if (n > 20) throw SizeExceeded("permanent expansion is capped at 20x20");

    CountResult res;
    res.log_Z_e.resize(m);
    if (n == 0) {
        res.log_Z = 0.0;
        return res;
    }

    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& [i, j] : graph_.edges) adj[static_cast<std::size_t>(i)].push_back(j);
    if (!has_perfect_matching(n, adj)) throw EmptyFamily("graph has no perfect matching");

    // Per-row weight shifts: each matching uses exactly one edge per row, so
    // shifting a row rescales the permanent by a known factor and keeps the
    // entries inside [0, 1].
    Eigen::VectorXd row_shift = Eigen::VectorXd::Zero(n);
    row_shift.setConstant(std::numeric_limits<double>::infinity());
    for (int e = 0; e < m; ++e)
        row_shift(graph_.edges[static_cast<std::size_t>(e)].first) =
            std::min(row_shift(graph_.edges[static_cast<std::size_t>(e)].first), lambda(e));
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(row_shift(i))) row_shift(i) = 0.0; // isolated row: caught above

    MatrixLD w = MatrixLD::Zero(n, n);
    for (int e = 0; e < m; ++e) {
        const auto [i, j] = graph_.edges[static_cast<std::size_t>(e)];
        w(i, j) = expl(-static_cast<long double>(lambda(e) - row_shift(i)));
    }

    const long double perm = permanent(w);
    if (!(perm > 0.0L)) throw NumericalFailure("permanent evaluation lost all precision");
    res.log_Z = static_cast<double>(logl(perm)) - row_shift.sum();

    for (int e = 0; e < m; ++e) {
        const auto [i, j] = graph_.edges[static_cast<std::size_t>(e)];
        MatrixLD minor(n - 1, n - 1);
        for (int r = 0, rr = 0; r < n; ++r) {
            if (r == i) continue;
            for (int c = 0, cc = 0; c < n; ++c) {
                if (c == j) continue;
                minor(rr, cc++) = w(r, c);
            }
            ++rr;
        }
        // Decide structurally first whether any matching uses this edge:
        // the alternating-sum permanent can leave roundoff residue where
        // the exact value is zero, and only the matching test is exact.
        std::vector<std::vector<int>> sub(static_cast<std::size_t>(n - 1));
        for (int r = 0, rr = 0; r < n; ++r) {
            if (r == i) continue;
            for (int c : adj[static_cast<std::size_t>(r)])
                if (c != j) sub[static_cast<std::size_t>(rr)].push_back(c > j ? c - 1 : c);
            ++rr;
        }
        if (!has_perfect_matching(n - 1, sub)) {
            res.log_Z_e(e) = kNegInf;
            continue;
        }
        const long double perm_minor = permanent(minor);
        if (!(perm_minor > 0.0L))
            throw NumericalFailure("permanent minor evaluation lost all precision");
        res.log_Z_e(e) = -lambda(e) + static_cast<double>(logl(perm_minor)) -
                         (row_shift.sum() - row_shift(i));
    }
    return res;
}

CycleCoverOracle::CycleCoverOracle(DirectedGraph g)
    : inner_([&g] {
          validate(g);
          BipartiteGraph b;
          b.left = b.right = g.vertices;
          b.edges = g.arcs;
          return b;
      }()) {}

CountResult CycleCoverOracle::count(const Eigen::VectorXd& lambda) const {
    return inner_.count(lambda);
}

NoisyOracle::NoisyOracle(std::shared_ptr<const CountingOracle> base, NoiseSpec spec)
    : base_(std::move(base)), spec_(spec) {
    if (!(spec_.epsilon >= 0.0 && spec_.epsilon < 1.0))
        throw InvalidInput("noise level must lie in [0, 1)");
}

CountResult NoisyOracle::count(const Eigen::VectorXd& lambda) const {
    CountResult res = base_->count(lambda);
    const double eps = spec_.epsilon;
    if (eps == 0.0) return res;
    auto factor_log = [&](std::uint64_t tag, bool deflate_when_deterministic) {
        if (spec_.mode == NoiseSpec::Mode::Deterministic)
            return std::log1p(deflate_when_deterministic ? -eps : eps);
        return std::log1p(eps * hashed_unit(spec_, lambda, tag));
    };
    res.log_Z += factor_log(0, false);
    for (Eigen::Index e = 0; e < res.log_Z_e.size(); ++e) {
        if (std::isinf(res.log_Z_e(e))) continue; // exact zeros stay exact
        res.log_Z_e(e) += factor_log(1 + static_cast<std::uint64_t>(e), e % 2 == 0);
    }
    return res;
}

CountResult count_enumerate(const Family& family, const Eigen::VectorXd& lambda,
                            std::size_t cap) {
    return EnumerationOracle(family, cap).count(lambda);
}

CountResult count_spanning_trees(const UndirectedGraph& g, const Eigen::VectorXd& lambda) {
    return SpanningTreeOracle(g).count(lambda);
}

CountResult count_bipartite_pm(const BipartiteGraph& g, const Eigen::VectorXd& lambda) {
    return BipartitePmOracle(g).count(lambda);
}

CountResult count_cycle_covers(const DirectedGraph& g, const Eigen::VectorXd& lambda) {
    return CycleCoverOracle(g).count(lambda);
}

std::shared_ptr<const CountingOracle> noisy_oracle(std::shared_ptr<const CountingOracle> base,
                                                   NoiseSpec spec) {
    return std::make_shared<NoisyOracle>(std::move(base), spec);
}

std::shared_ptr<const CountingOracle> make_exact_oracle(const Family& family,
                                                        std::size_t cap) {
    return std::make_shared<EnumerationOracle>(family, cap);
}

} // namespace maxent
