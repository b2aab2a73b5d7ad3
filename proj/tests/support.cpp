#include "support.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "maxent/errors.hpp"

namespace testsupport {

using maxent::Family;

Family triangle_trees() {
    return Family::spanning_trees({3, {{0, 1}, {1, 2}, {2, 0}}});
}

Family k4_trees() {
    return Family::spanning_trees(
        {4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}});
}

Family k22_matchings() {
    return Family::bipartite_perfect_matchings({2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}});
}

Family k33_matchings() {
    maxent::BipartiteGraph g;
    g.left = g.right = 3;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g.edges.emplace_back(i, j);
    return Family::bipartite_perfect_matchings(std::move(g));
}

std::vector<Family> desk_families() {
    return {triangle_trees(), k4_trees(), k22_matchings(), k33_matchings()};
}

IpfResult ipf_max_entropy(const Family& family, const Eigen::VectorXd& theta,
                          double tol, int max_sweeps) {
    const int m = family.ground_set_size();
    const auto& mem = family.members();
    IpfResult out;
    out.probabilities.assign(mem.size(), 1.0 / static_cast<double>(mem.size()));
    out.marginals = Eigen::VectorXd::Zero(m);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double worst = 0.0;
        for (int e = 0; e < m; ++e) {
            double t = 0.0;
            for (std::size_t i = 0; i < mem.size(); ++i)
                if (mem[i] >> e & 1) t += out.probabilities[i];
            worst = std::max(worst, std::abs(t - theta(e)));
            if (t <= 0.0 || t >= 1.0) continue; // cannot rescale a degenerate split
            const double in_factor = theta(e) / t;
            const double out_factor = (1.0 - theta(e)) / (1.0 - t);
            for (std::size_t i = 0; i < mem.size(); ++i)
                out.probabilities[i] *= (mem[i] >> e & 1) ? in_factor : out_factor;
        }
        if (worst < tol && sweep > 0) {
            out.converged = true;
            break;
        }
    }

    for (std::size_t i = 0; i < mem.size(); ++i) {
        const double p = out.probabilities[i];
        if (p > 0.0) out.entropy -= p * std::log(p);
        for (std::uint64_t bits = mem[i]; bits != 0; bits &= bits - 1)
            out.marginals(std::countr_zero(bits)) += p;
    }
    return out;
}

double hull_depth(const Family& family, const Eigen::VectorXd& theta) {
    const int m = family.ground_set_size();
    const auto& mem = family.members();
    if (mem.empty()) throw std::runtime_error("hull_depth: empty family");
    const std::size_t n = mem.size();

    Eigen::MatrixXd verts(m, n);
    for (std::size_t i = 0; i < n; ++i)
        verts.col(static_cast<Eigen::Index>(i)) = maxent::indicator(mem[i], m);

    // Orthonormal basis of the affine directions.
    Eigen::MatrixXd span(m, 0);
    for (std::size_t i = 1; i < n; ++i) {
        Eigen::VectorXd d = verts.col(static_cast<Eigen::Index>(i)) - verts.col(0);
        for (int pass = 0; pass < 2; ++pass)
            if (span.cols() > 0) d -= span * (span.transpose() * d);
        if (d.norm() > 1e-9) {
            span.conservativeResize(Eigen::NoChange, span.cols() + 1);
            span.col(span.cols() - 1) = d.normalized();
        }
    }
    const int r = static_cast<int>(span.cols());

    const Eigen::VectorXd rel = theta - verts.col(0);
    const Eigen::VectorXd y_theta = span.transpose() * rel;
    if ((rel - span * y_theta).norm() > 1e-7)
        throw std::runtime_error("hull_depth: point is off the affine hull");
    if (r == 0) return 0.0;

    Eigen::MatrixXd coords(r, n);
    for (std::size_t i = 0; i < n; ++i)
        coords.col(static_cast<Eigen::Index>(i)) =
            span.transpose() * (verts.col(static_cast<Eigen::Index>(i)) - verts.col(0));

    double depth = std::numeric_limits<double>::infinity();
    std::vector<int> subset(r);
    std::iota(subset.begin(), subset.end(), 0);
    const auto advance = [&]() -> bool {
        int i = r - 1;
        while (i >= 0 && subset[i] == static_cast<int>(n) - (r - i)) --i;
        if (i < 0) return false;
        ++subset[i];
        for (int j = i + 1; j < r; ++j) subset[j] = subset[j - 1] + 1;
        return true;
    };

    do {
        // Normal of the hyperplane through the subset, if it spans r-1 dims.
        Eigen::MatrixXd d(r, r - 1);
        for (int j = 1; j < r; ++j)
            d.col(j - 1) = coords.col(subset[j]) - coords.col(subset[0]);
        Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(d);
        qr.setThreshold(1e-9);
        if (qr.rank() != r - 1) continue;
        const Eigen::MatrixXd full_q =
            qr.matrixQ() * Eigen::MatrixXd::Identity(r, r);
        Eigen::VectorXd normal = full_q.col(r - 1);
        const double offset = normal.dot(coords.col(subset[0]));

        double lo = offset, hi = offset;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = normal.dot(coords.col(static_cast<Eigen::Index>(i)));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double tol = 1e-9;
        if (hi <= offset + tol)
            depth = std::min(depth, offset - normal.dot(y_theta));
        else if (lo >= offset - tol)
            depth = std::min(depth, normal.dot(y_theta) - offset);
    } while (advance());

    if (!std::isfinite(depth)) throw std::runtime_error("hull_depth: no facet found");
    return depth;
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::runtime_error("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double log_gamma = std::lgamma(a);
    if (x < a + 1.0) {
        // Lower series; Q = 1 - P.
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - log_gamma);
    }
    // Continued fraction (modified Lentz).
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma) * h;
}

double chi_square_pvalue(double statistic, int dof) {
    return gamma_q(static_cast<double>(dof) / 2.0, statistic / 2.0);
}

std::vector<double> member_probabilities(const Family& family,
                                         const Eigen::VectorXd& lambda) {
    const auto& mem = family.members();
    std::vector<double> expo(mem.size());
    for (std::size_t i = 0; i < mem.size(); ++i) {
        double w = 0.0;
        for (std::uint64_t bits = mem[i]; bits != 0; bits &= bits - 1)
            w -= lambda(std::countr_zero(bits));
        expo[i] = w;
    }
    const double top = *std::max_element(expo.begin(), expo.end());
    double total = 0.0;
    for (double& e : expo) {
        e = std::exp(e - top);
        total += e;
    }
    for (double& e : expo) e /= total;
    return expo;
}

double total_variation(const Family& family, const Eigen::VectorXd& lambda,
                       const std::vector<std::uint64_t>& draws) {
    const auto& mem = family.members();
    const std::vector<double> probs = member_probabilities(family, lambda);
    std::map<std::uint64_t, std::size_t> index;
    for (std::size_t i = 0; i < mem.size(); ++i) index[mem[i]] = i;

    std::vector<double> freq(mem.size(), 0.0);
    for (std::uint64_t mask : draws) freq.at(index.at(mask)) += 1.0;
    double tv = 0.0;
    for (std::size_t i = 0; i < mem.size(); ++i)
        tv += std::abs(freq[i] / static_cast<double>(draws.size()) - probs[i]);
    return tv / 2.0;
}

double sampler_pvalue(const Family& family, const Eigen::VectorXd& lambda,
                      const std::vector<std::uint64_t>& draws) {
    const auto& mem = family.members();
    const std::vector<double> probs = member_probabilities(family, lambda);
    std::map<std::uint64_t, std::size_t> index;
    for (std::size_t i = 0; i < mem.size(); ++i) index[mem[i]] = i;

    std::vector<double> observed(mem.size(), 0.0);
    for (std::uint64_t mask : draws) observed.at(index.at(mask)) += 1.0;
    double statistic = 0.0;
    int dof = -1;
    for (std::size_t i = 0; i < mem.size(); ++i) {
        const double expected = probs[i] * static_cast<double>(draws.size());
        if (expected < 5.0)
            throw std::runtime_error("sampler_pvalue: bin too small for chi-square");
        statistic += (observed[i] - expected) * (observed[i] - expected) / expected;
        ++dof;
    }
    return chi_square_pvalue(statistic, dof);
}

maxent::UndirectedGraph random_connected_graph(std::mt19937_64& rng, int vertices,
                                               int extra_edges) {
    maxent::UndirectedGraph g;
    g.vertices = vertices;
    std::set<std::pair<int, int>> used;
    for (int v = 1; v < vertices; ++v) {
        const int parent = static_cast<int>(rng() % static_cast<std::uint64_t>(v));
        g.edges.emplace_back(parent, v);
        used.insert({parent, v});
    }
    const int max_edges = vertices * (vertices - 1) / 2;
    int attempts = 0;
    while (static_cast<int>(g.edges.size()) <
               std::min(max_edges, vertices - 1 + extra_edges) &&
           static_cast<int>(g.edges.size()) < 64 && attempts++ < 1000) {
        int a = static_cast<int>(rng() % static_cast<std::uint64_t>(vertices));
        int b = static_cast<int>(rng() % static_cast<std::uint64_t>(vertices));
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        if (!used.insert({a, b}).second) continue;
        g.edges.emplace_back(a, b);
    }
    return g;
}

maxent::BipartiteGraph random_bipartite_with_matching(std::mt19937_64& rng, int side,
                                                      int extra_edges) {
    maxent::BipartiteGraph g;
    g.left = g.right = side;
    std::vector<int> perm(side);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::set<std::pair<int, int>> used;
    for (int i = 0; i < side; ++i) {
        g.edges.emplace_back(i, perm[i]);
        used.insert({i, perm[i]});
    }
    int attempts = 0;
    while (static_cast<int>(g.edges.size()) < std::min(side * side, side + extra_edges) &&
           static_cast<int>(g.edges.size()) < 64 && attempts++ < 1000) {
        const int a = static_cast<int>(rng() % static_cast<std::uint64_t>(side));
        const int b = static_cast<int>(rng() % static_cast<std::uint64_t>(side));
        if (!used.insert({a, b}).second) continue;
        g.edges.emplace_back(a, b);
    }
    return g;
}

maxent::DirectedGraph random_digraph_with_cover(std::mt19937_64& rng, int vertices,
                                                int extra_arcs) {
    maxent::DirectedGraph g;
    g.vertices = vertices;
    std::vector<int> perm(vertices);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::set<std::pair<int, int>> used;
    for (int i = 0; i < vertices; ++i) {
        g.arcs.emplace_back(i, perm[i]);
        used.insert({i, perm[i]});
    }
    int attempts = 0;
    while (static_cast<int>(g.arcs.size()) <
               std::min(vertices * vertices, vertices + extra_arcs) &&
           static_cast<int>(g.arcs.size()) < 64 && attempts++ < 1000) {
        const int a = static_cast<int>(rng() % static_cast<std::uint64_t>(vertices));
        const int b = static_cast<int>(rng() % static_cast<std::uint64_t>(vertices));
        if (!used.insert({a, b}).second) continue;
        g.arcs.emplace_back(a, b);
    }
    return g;
}

Family random_explicit_family(std::mt19937_64& rng, int ground_set, int member_count) {
    std::set<std::uint64_t> members;
    const std::uint64_t space =
        ground_set >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << ground_set) - 1;
    while (static_cast<int>(members.size()) < member_count)
        members.insert(rng() & space);
    return Family::explicit_members(ground_set,
                                    std::vector<std::uint64_t>(members.begin(), members.end()));
}

Eigen::VectorXd random_lambda(std::mt19937_64& rng, int m, double scale) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = scale * unit(rng);
    return v;
}

Eigen::VectorXd random_interior_theta(std::mt19937_64& rng, const Family& family,
                                      double mix) {
    const int m = family.ground_set_size();
    const auto& mem = family.members();
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> weights(mem.size());
    double total = 0.0;
    for (double& w : weights) {
        w = expo(rng);
        total += w;
    }
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < mem.size(); ++i)
        theta += (weights[i] / total) * maxent::indicator(mem[i], m);
    return (1.0 - mix) * theta + mix * maxent::vertex_centroid(family);
}

CliResult run_cli(const std::string& binary, const std::vector<std::string>& args,
                  const std::string& stdin_text) {
    const std::string base = "/tmp/maxent_cli_" + std::to_string(rand());
    const std::string in_path = base + ".in";
    const std::string out_path = base + ".out";
    const std::string err_path = base + ".err";
    {
        std::ofstream in(in_path);
        in << stdin_text;
    }
    std::string cmd = binary;
    for (const std::string& a : args) cmd += " " + a;
    cmd += " < " + in_path + " > " + out_path + " 2> " + err_path;

    CliResult result;
    const int raw = std::system(cmd.c_str());
    result.exit_code = raw < 0 ? raw : WEXITSTATUS(raw);
    const auto slurp = [](const std::string& path) {
        std::ifstream f(path);
        std::ostringstream buffer;
        buffer << f.rdbuf();
        return buffer.str();
    };
    result.output = slurp(out_path);
    result.error = slurp(err_path);
    std::remove(in_path.c_str());
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return result;
}

} // namespace testsupport
