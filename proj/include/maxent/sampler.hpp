#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "maxent/family.hpp"

namespace maxent {

struct SampleBatch {
    std::vector<std::uint64_t> members; // one mask per draw
};

// Draws from p_M proportional to exp(-sum_{e in M} lambda_e) by inverting
// the cumulative distribution over the enumerated member list.
SampleBatch sample_enumerate(const Family& family, const Eigen::VectorXd& lambda,
                             std::size_t draws, std::uint64_t seed,
                             std::size_t enumerate_cap = kDefaultEnumerateCap);

// Draws weighted spanning trees without enumeration: edges are decided in
// index order, each with its exact conditional inclusion probability given
// the decisions so far, computed from weighted tree counts of the
// contracted graph (self-reducibility).
SampleBatch sample_spanning_trees(const UndirectedGraph& g, const Eigen::VectorXd& lambda,
                                  std::size_t draws, std::uint64_t seed);

// Dispatch: conditional sampler for spanning trees, enumeration sampler for
// every other family kind.
SampleBatch sample_family(const Family& family, const Eigen::VectorXd& lambda,
                          std::size_t draws, std::uint64_t seed,
                          std::size_t enumerate_cap = kDefaultEnumerateCap);

} // namespace maxent
