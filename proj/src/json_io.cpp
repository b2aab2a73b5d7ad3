#include "maxent/json_io.hpp"

#include <utility>
#include <vector>

#include "maxent/errors.hpp"

namespace maxent {

namespace {

using nlohmann::json;

int require_int(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw InvalidInput(std::string("missing or non-integer field \"") + key + "\"");
    return j.at(key).get<int>();
}

std::vector<std::pair<int, int>> pair_list(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw InvalidInput(std::string("missing or non-array field \"") + key + "\"");
    std::vector<std::pair<int, int>> out;
    for (const auto& item : j.at(key)) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_number_integer() ||
            !item[1].is_number_integer())
            throw InvalidInput(std::string("field \"") + key +
                               "\" must hold [int, int] pairs");
        out.emplace_back(item[0].get<int>(), item[1].get<int>());
    }
    return out;
}

} // namespace

Family family_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidInput("family document must be an object");
    if (j.contains("members")) {
        const int m = require_int(j, "ground_set");
        if (!j.at("members").is_array())
            throw InvalidInput("field \"members\" must be an array of masks");
        std::vector<std::uint64_t> members;
        for (const auto& item : j.at("members")) {
            if (!item.is_number_unsigned() && !item.is_number_integer())
                throw InvalidInput("member masks must be nonnegative integers");
            members.push_back(item.get<std::uint64_t>());
        }
        return Family::explicit_members(m, std::move(members));
    }
    if (j.contains("left")) {
        BipartiteGraph g;
        g.left = require_int(j, "left");
        g.right = require_int(j, "right");
        g.edges = pair_list(j, "edges");
        return Family::bipartite_perfect_matchings(std::move(g));
    }
    if (j.contains("arcs")) {
        DirectedGraph g;
        g.vertices = require_int(j, "vertices");
        g.arcs = pair_list(j, "arcs");
        return Family::cycle_covers(std::move(g));
    }
    if (j.contains("edges")) {
        UndirectedGraph g;
        g.vertices = require_int(j, "vertices");
        g.edges = pair_list(j, "edges");
        return Family::spanning_trees(std::move(g));
    }
    throw InvalidInput("unrecognized family document: expected one of the keys "
                       "\"members\", \"left\", \"arcs\", \"edges\"");
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw InvalidInput("expected a numeric array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    Eigen::Index i = 0;
    for (const auto& item : j) {
        if (!item.is_number()) throw InvalidInput("expected a numeric array");
        v(i++) = item.get<double>();
    }
    return v;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

NoiseSpec noise_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidInput("noise document must be an object");
    NoiseSpec spec;
    if (j.contains("epsilon")) {
        if (!j.at("epsilon").is_number()) throw InvalidInput("noise epsilon must be a number");
        spec.epsilon = j.at("epsilon").get<double>();
    }
    if (j.contains("mode")) {
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "deterministic")
            spec.mode = NoiseSpec::Mode::Deterministic;
        else if (mode == "seeded")
            spec.mode = NoiseSpec::Mode::SeededUniform;
        else
            throw InvalidInput("noise mode must be \"deterministic\" or \"seeded\"");
    }
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    return spec;
}

nlohmann::json solve_report(const SolveResult& result) {
    json guesses = json::array();
    for (const auto& guess : result.guesses)
        guesses.push_back({{"zeta", guess.zeta}, {"success", guess.success}});
    return {{"schema", 1},
            {"lambda", vector_to_json(result.lambda)},
            {"f_value", result.f_value},
            {"marginal_gap", result.marginal_gap},
            {"iterations", result.iterations},
            {"oracle_calls", result.oracle_calls},
            {"guesses", std::move(guesses)}};
}

nlohmann::json count_report(const CountEstimate& estimate) {
    return {{"schema", 1},
            {"log_count", estimate.log_count},
            {"count", estimate.count},
            {"probes", estimate.probes},
            {"oracle_queries", estimate.oracle_queries}};
}

nlohmann::json sample_report(const SampleBatch& batch) {
    json samples = json::array();
    for (std::uint64_t mask : batch.members) samples.push_back(mask);
    return {{"schema", 1}, {"draws", batch.members.size()}, {"samples", std::move(samples)}};
}

nlohmann::json verify_report(double gap, double bound) {
    return {{"schema", 1}, {"gap", gap}, {"bound", bound}, {"within_bound", gap <= bound}};
}

nlohmann::json atsp_report(const AtspResult& result) {
    json tour = json::array();
    for (int v : result.tour) tour.push_back(v);
    json arcs = json::array();
    for (const auto& [u, v] : result.chosen_arcs) arcs.push_back({u, v});
    return {{"schema", 1},
            {"tour", std::move(tour)},
            {"tour_cost", result.tour_cost},
            {"rounds", result.rounds},
            {"chosen_arcs", std::move(arcs)}};
}

nlohmann::json parse_json(const std::string& text) {
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded()) throw InvalidInput("input is not valid JSON");
    return parsed;
}

} // namespace maxent
