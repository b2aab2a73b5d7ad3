#pragma once

#include <utility>
#include <vector>

namespace maxent {

// Edge lists are ordered: the position of an edge in the list is its index in
// the ground set. All algorithms that accept per-edge weight vectors use this
// indexing.

struct UndirectedGraph {
    int vertices = 0;
    std::vector<std::pair<int, int>> edges;
};

struct DirectedGraph {
    int vertices = 0;
    std::vector<std::pair<int, int>> arcs;
};

struct BipartiteGraph {
    int left = 0;
    int right = 0;
    std::vector<std::pair<int, int>> edges; // (left index, right index)
};

// Throw InvalidFamily on out-of-range endpoints, self-loops (undirected only)
// or duplicate edges.
void validate(const UndirectedGraph& g);
void validate(const DirectedGraph& g);
void validate(const BipartiteGraph& g);

} // namespace maxent
