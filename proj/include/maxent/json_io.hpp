#pragma once

#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "maxent/atsp.hpp"
#include "maxent/counter.hpp"
#include "maxent/family.hpp"
#include "maxent/sampler.hpp"
#include "maxent/solver.hpp"

namespace maxent {

// Family documents are recognized by their keys:
//   {"ground_set": m, "members": [mask, ...]}          explicit family
//   {"vertices": n, "edges": [[u, v], ...]}            spanning trees
//   {"left": a, "right": b, "edges": [[u, v], ...]}    bipartite perfect matchings
//   {"vertices": n, "arcs": [[u, v], ...]}             cycle covers
// Throws InvalidInput when no schema matches or fields are malformed.
Family family_from_json(const nlohmann::json& j);

Eigen::VectorXd vector_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);

// NoiseSpec from {"epsilon": x, "mode": "deterministic"|"seeded", "seed": n};
// all fields optional.
NoiseSpec noise_from_json(const nlohmann::json& j);

// Report documents; every report carries "schema": 1.
nlohmann::json solve_report(const SolveResult& result);
nlohmann::json count_report(const CountEstimate& estimate);
nlohmann::json sample_report(const SampleBatch& batch);
nlohmann::json verify_report(double gap, double bound);
nlohmann::json atsp_report(const AtspResult& result);

// Parse text as JSON, converting parse failures into InvalidInput.
nlohmann::json parse_json(const std::string& text);

} // namespace maxent
