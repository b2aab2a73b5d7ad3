#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "maxent/counter.hpp"
#include "maxent/errors.hpp"
#include "maxent/json_io.hpp"
#include "maxent/sampler.hpp"
#include "maxent/solver.hpp"

namespace {

using nlohmann::json;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream file(path);
    if (!file) throw maxent::InvalidInput("cannot open input file: " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

void write_output(const std::string& path, const json& doc) {
    if (path == "-") {
        std::cout << doc.dump(2) << std::endl;
        return;
    }
    std::ofstream file(path);
    if (!file) throw maxent::InvalidInput("cannot open output file: " + path);
    file << doc.dump(2) << std::endl;
}

maxent::SolveRequest solve_request_from(const json& doc) {
    if (!doc.contains("family"))
        throw maxent::InvalidInput("solve document needs a \"family\" field");
    maxent::SolveRequest req;
    req.family = maxent::family_from_json(doc.at("family"));
    if (!doc.contains("theta"))
        throw maxent::InvalidInput("solve document needs a \"theta\" field");
    req.theta = maxent::vector_from_json(doc.at("theta"));
    if (doc.contains("eta")) req.eta = doc.at("eta").get<double>();
    if (doc.contains("epsilon")) req.epsilon = doc.at("epsilon").get<double>();
    if (doc.contains("noise")) {
        req.oracle_kind = maxent::OracleKind::Approximate;
        req.noise = maxent::noise_from_json(doc.at("noise"));
    }
    if (doc.contains("oracle")) {
        const std::string kind = doc.at("oracle").get<std::string>();
        if (kind == "exact")
            req.oracle_kind = maxent::OracleKind::Exact;
        else if (kind == "approximate")
            req.oracle_kind = maxent::OracleKind::Approximate;
        else
            throw maxent::InvalidInput("oracle must be \"exact\" or \"approximate\"");
    }
    return req;
}

maxent::SolveResult dispatch_solve(const maxent::SolveRequest& req,
                                   const Eigen::VectorXd& mu) {
    if (mu.size() != 0) return maxent::solve_kl(req, mu);
    if (req.oracle_kind == maxent::OracleKind::Approximate)
        return maxent::solve_approx(req);
    return maxent::solve_exact(req);
}

int run(const std::string& command, const std::string& input_path,
        const std::string& output_path) {
    const json doc = maxent::parse_json(read_input(input_path));
    if (!doc.is_object()) throw maxent::InvalidInput("input document must be an object");

    json report;
    if (command == "solve" || command == "solve-kl") {
        const maxent::SolveRequest req = solve_request_from(doc);
        Eigen::VectorXd mu;
        if (command == "solve-kl") {
            if (!doc.contains("mu"))
                throw maxent::InvalidInput("solve-kl document needs a \"mu\" field");
            mu = maxent::vector_from_json(doc.at("mu"));
        }
        report = maxent::solve_report(dispatch_solve(req, mu));
    } else if (command == "count" || command == "count-mu") {
        const maxent::Family family = maxent::family_from_json(doc.at("family"));
        const double epsilon =
            doc.contains("epsilon") ? doc.at("epsilon").get<double>() : 0.1;
        if (command == "count-mu") {
            if (!doc.contains("mu"))
                throw maxent::InvalidInput("count-mu document needs a \"mu\" field");
            report = maxent::count_report(maxent::generalized_count(
                family, maxent::vector_from_json(doc.at("mu")), epsilon));
        } else {
            report = maxent::count_report(maxent::count_via_entropy(family, epsilon));
        }
    } else if (command == "sample") {
        const maxent::Family family = maxent::family_from_json(doc.at("family"));
        const Eigen::VectorXd lambda = maxent::vector_from_json(doc.at("lambda"));
        const std::size_t draws =
            doc.contains("draws") ? doc.at("draws").get<std::size_t>() : 1;
        const std::uint64_t seed =
            doc.contains("seed") ? doc.at("seed").get<std::uint64_t>() : 0;
        report = maxent::sample_report(maxent::sample_family(family, lambda, draws, seed));
    } else if (command == "verify") {
        const maxent::Family family = maxent::family_from_json(doc.at("family"));
        maxent::SolveResult carrier;
        carrier.lambda = maxent::vector_from_json(doc.at("lambda"));
        const Eigen::VectorXd theta = maxent::vector_from_json(doc.at("theta"));
        const double epsilon =
            doc.contains("epsilon") ? doc.at("epsilon").get<double>() : 1e-4;
        Eigen::VectorXd mu;
        if (doc.contains("mu")) mu = maxent::vector_from_json(doc.at("mu"));
        const auto oracle = maxent::make_exact_oracle(family);
        const double gap =
            maxent::verify_marginals(carrier, theta, *oracle, epsilon, mu);
        report = maxent::verify_report(gap, std::sqrt(epsilon / 2.0) + 1e-6);
    } else if (command == "atsp-demo") {
        maxent::DirectedGraph g;
        g.vertices = doc.at("vertices").get<int>();
        for (const auto& arc : doc.at("arcs"))
            g.arcs.emplace_back(arc[0].get<int>(), arc[1].get<int>());
        const Eigen::VectorXd costs = maxent::vector_from_json(doc.at("costs"));
        maxent::AtspOptions options;
        if (doc.contains("beta")) options.beta = doc.at("beta").get<double>();
        if (doc.contains("mix")) options.mix = doc.at("mix").get<double>();
        if (doc.contains("epsilon")) options.epsilon = doc.at("epsilon").get<double>();
        if (doc.contains("seed")) options.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("marginals"))
            options.marginals = maxent::vector_from_json(doc.at("marginals"));
        report = maxent::atsp_report(maxent::atsp_demo(g, costs, options));
    } else {
        throw maxent::InvalidInput("unknown command: " + command);
    }

    write_output(output_path, report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Max-entropy distributions over combinatorial families: "
                 "solving, counting, sampling"};
    app.require_subcommand(1);

    std::string input_path = "-";
    std::string output_path = "-";
    app.add_option("-i,--input", input_path,
                   "input JSON document (\"-\" for stdin)")
        ->capture_default_str();
    app.add_option("-o,--output", output_path,
                   "output JSON document (\"-\" for stdout)")
        ->capture_default_str();

    static const char* kCommands[] = {"solve",  "solve-kl", "count",    "count-mu",
                                      "sample", "verify",   "atsp-demo"};
    static const char* kDescriptions[] = {
        "fit weights matching target marginals",
        "fit weights for the product-tilted objective",
        "estimate the number of members",
        "estimate the weighted member sum",
        "draw members from a product distribution",
        "check marginals of given weights against targets",
        "tour construction by repeated cycle-cover sampling"};
    for (std::size_t i = 0; i < std::size(kCommands); ++i)
        app.add_subcommand(kCommands[i], kDescriptions[i])
            ->fallthrough(); // lets -i / -o appear after the subcommand

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        return run(app.get_subcommands().front()->get_name(), input_path, output_path);
    } catch (const maxent::GapExceeded& e) {
        std::cerr << "contract violation: " << e.what() << std::endl;
        return 2;
    } catch (const maxent::SolverContractViolation& e) {
        std::cerr << "contract violation: " << e.what() << std::endl;
        return 2;
    } catch (const maxent::Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << std::endl;
        return 3;
    }
}
