// dlyap_cli.cpp - command-line entry point with the cumulants, identify and analyze subcommands.
#include "dlyap/constraints.hpp"
#include "dlyap/error.hpp"
#include "dlyap/graph.hpp"
#include "dlyap/identify.hpp"
#include "dlyap/io.hpp"
#include "dlyap/jacobian.hpp"
#include "dlyap/lyapunov.hpp"
#include "dlyap/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using dlyap::io::json;

enum ExitCode { kOk = 0, kFailure = 1, kInputError = 2, kInstability = 3, kIdentificationFailure = 4 };

struct RunConfig {
    std::string command;
    std::string graph_path;
    std::string params_path;
    std::string stack_path;
    std::uint64_t seed = 0;
    int trials = 10;
    std::string orders;
    double tol = 1e-8;
    double rank_tol = 1e-12;
    double degeneracy_tol = 1e-12;
    int max_subset = 2;
    std::string out;
    std::string format = "json";
    int threads = 1;
};

json config_json(const RunConfig& c) {
    return {{"command", c.command},    {"graph", c.graph_path},          {"params", c.params_path},
            {"stack", c.stack_path},   {"seed", c.seed},                 {"trials", c.trials},
            {"orders", c.orders},      {"tol", c.tol},                   {"rank_tol", c.rank_tol},
            {"degeneracy_tol", c.degeneracy_tol}, {"max_subset", c.max_subset}, {"format", c.format},
            {"threads", c.threads}};
}

json envelope(const RunConfig& c) {
    return {{"tool", "dlyap"}, {"version", dlyap::kVersion}, {"config", config_json(c)}};
}

std::vector<int> parse_orders(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int n = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(n);
        } catch (const std::exception&) {
            throw dlyap::InvalidArgument("cannot parse order '" + item + "'");
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty()) throw dlyap::InvalidArgument("at least one order is required");
    for (int n : out)
        if (n < 2 || n > 4) throw dlyap::InvalidArgument("orders must lie in {2,3,4}");
    return out;
}

void validate(const RunConfig& c) {
    if (c.tol <= 0 || c.rank_tol <= 0 || c.degeneracy_tol <= 0) throw dlyap::InvalidArgument("tolerances must be positive");
    if (c.trials < 1) throw dlyap::InvalidArgument("--trials must be positive");
    if (c.threads < 1) throw dlyap::InvalidArgument("--threads must be positive");
    if (c.max_subset < 1) throw dlyap::InvalidArgument("--max-subset must be positive");
    if (c.format != "json" && c.format != "csv") throw dlyap::InvalidArgument("--format must be json or csv");
}

void emit(const RunConfig& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
    } else {
        dlyap::io::write_text_file(c.out, text);
    }
}

dlyap::ModelPoint model_point(const RunConfig& c, const dlyap::DirectedGraph& g) {
    if (!c.params_path.empty()) return dlyap::io::model_point_from_json(g, dlyap::io::read_json_file(c.params_path));
    return dlyap::sample_model_point(g, c.seed);
}

int cmd_cumulants(const RunConfig& c) {
    const dlyap::DirectedGraph g = dlyap::io::graph_from_json(dlyap::io::read_json_file(c.graph_path));
    const std::vector<int> orders = parse_orders(c.orders.empty() ? "2,3,4" : c.orders);
    const dlyap::ModelPoint mp = model_point(c, g);
    mp.A.require_stable();
    const dlyap::DiagonalCumulant* noise[] = {&mp.omega2, &mp.omega3, &mp.omega4};

    json doc = envelope(c);
    doc["graph"] = dlyap::io::graph_to_json(g);
    doc["parameters"] = dlyap::io::model_point_to_json(mp);
    json cumulants = json::object();
    json residuals = json::object();
    std::ostringstream csv;
    csv.precision(17);
    csv << "order,index,value\n";
    for (int n : orders) {
        const dlyap::DiagonalCumulant& w = *noise[n - 2];
        const dlyap::SymmetricTensor T = dlyap::solve_cumulant(mp.A, w);
        cumulants[std::to_string(n)] = dlyap::io::tensor_to_json(T);
        residuals[std::to_string(n)] = dlyap::recursive_residual(T, mp.A, w);
        const auto& ms = T.index().multisets();
        for (std::size_t k = 0; k < ms.size(); ++k)
            csv << n << ",\"" << dlyap::index_key(ms[k]) << "\"," << T.values()[k] << '\n';
    }
    doc["cumulants"] = cumulants;
    doc["recursive_residuals"] = residuals;
    if (c.format == "csv" && orders == std::vector<int>{2}) {
        emit(c, dlyap::io::dense_matrix_csv(dlyap::solve_cumulant(mp.A, mp.omega2)));
        return kOk;
    }
    emit(c, c.format == "csv" ? csv.str() : doc.dump(2) + "\n");
    return kOk;
}

dlyap::CumulantStack load_stack(const RunConfig& c, const dlyap::DirectedGraph& g) {
    if (!c.stack_path.empty()) {
        dlyap::CumulantStack stack = dlyap::io::stack_from_json(dlyap::io::read_json_file(c.stack_path));
        if (stack.p() != g.p()) throw dlyap::InvalidArgument("stack dimension differs from the graph");
        return stack;
    }
    const dlyap::ModelPoint mp = model_point(c, g);
    mp.A.require_stable();
    return mp.forward(true);
}

int cmd_identify(const RunConfig& c) {
    const dlyap::DirectedGraph g = dlyap::io::graph_from_json(dlyap::io::read_json_file(c.graph_path));
    const dlyap::CumulantStack stack = load_stack(c, g);
    dlyap::IdentifyOptions opt;
    opt.residual_tol = c.tol;
    opt.degeneracy_tol = c.degeneracy_tol;
    opt.rank_policy.relative = c.rank_tol;

    json doc = envelope(c);
    doc["graph"] = dlyap::io::graph_to_json(g);
    const int n_max = stack.R ? 4 : 3;
    const std::string method = dlyap::select_identification_method(g, stack.R.has_value());
    int code = kOk;
    if (!method.empty()) {
        try {
            dlyap::IdentifiabilityReport rep;
            if (method == "dag-all-loops") {
                rep = dlyap::identify_dag_all_loops(g, stack, opt);
            } else if (method == "polytree") {
                rep = dlyap::identify_polytree(g, stack, opt);
            } else {
                rep = dlyap::identify_two_node_report(g, stack, opt);
            }
            doc["report"] = dlyap::io::report_to_json(rep);
            if (rep.verdict != dlyap::Verdict::Recovered) code = kIdentificationFailure;
        } catch (const dlyap::SingularBlock& e) {
            doc["report"] = {{"method", method},
                             {"verdict", "degenerate"},
                             {"message", e.what()},
                             {"vertex", e.vertex()},
                             {"condition_number", e.condition_number()},
                             {"rank", e.rank()}};
            code = kIdentificationFailure;
        } catch (const dlyap::DegenerateDenominator& e) {
            doc["report"] = {{"method", method}, {"verdict", "degenerate"}, {"message", e.what()}};
            code = kIdentificationFailure;
        }
        if (code != kOk) doc["equation_count"] = dlyap::io::equation_count_to_json(dlyap::count_equations_vs_parameters(g, n_max));
    } else {
        dlyap::VerdictOptions vo;
        vo.rank_policy.relative = c.rank_tol;
        vo.threads = c.threads;
        const dlyap::LocalIdentifiabilityReport local = dlyap::local_identifiability_verdict(g, c.trials, c.seed, vo);
        doc["report"] = {{"method", "jacobian"},
                         {"verdict", local.verdict},
                         {"message", "no closed-form method applies; local verdict from the modified Jacobian"}};
        doc["jacobian"] = dlyap::io::local_report_to_json(local);
        doc["equation_count"] = dlyap::io::equation_count_to_json(dlyap::count_equations_vs_parameters(g, n_max));
        if (!local.locally_identifiable) code = kIdentificationFailure;
    }
    emit(c, doc.dump(2) + "\n");
    return code;
}

json independence_json(const dlyap::DirectedGraph& g) {
    const int p = g.p();
    json biedges = json::array();
    for (const auto& [i, j] : dlyap::equitrek_graph(g).biedges()) biedges.push_back({i, j});
    json statements = json::array();
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            std::vector<int> rest;
            for (int v = 0; v < p; ++v)
                if (v != i && v != j) rest.push_back(v);
            const std::size_t subsets = std::size_t{1} << rest.size();
            for (std::size_t mask = 0; mask < subsets; ++mask) {
                std::vector<int> K;
                for (std::size_t b = 0; b < rest.size(); ++b)
                    if ((mask >> b) & 1u) K.push_back(rest[b]);
                if (dlyap::implied_conditional_independence(g, {i}, {j}, K)) statements.push_back({{"I", {i}}, {"J", {j}}, {"K", K}});
            }
        }
    return {{"equitrek_biedges", biedges}, {"implied_ci", statements}};
}

int cmd_analyze(const RunConfig& c) {
    const dlyap::DirectedGraph g = dlyap::io::graph_from_json(dlyap::io::read_json_file(c.graph_path));
    const std::vector<int> orders = parse_orders(c.orders.empty() ? "2,3" : c.orders);
    json doc = envelope(c);
    doc["graph"] = dlyap::io::graph_to_json(g);
    doc["independence"] = independence_json(g);

    if (g.is_weakly_connected()) {
        const dlyap::StarClassification sc = dlyap::classify_star(g);
        doc["star"] = {{"kind", dlyap::to_string(sc.kind)}, {"center", sc.center}};
    } else {
        doc["star"] = {{"kind", "disconnected"}, {"center", -1}};
    }

    try {
        const auto levels = dlyap::level_partition(g);
        doc["tree_levels"] = levels;
    } catch (const dlyap::HypothesisViolated&) {
    }

    const dlyap::ModelPoint mp = model_point(c, g);
    mp.A.require_stable();
    dlyap::RankScanOptions rso;
    rso.rank_policy.relative = c.rank_tol;
    rso.throw_on_violation = false;
    const auto constraints = dlyap::rank_constraints_scan(g, mp.forward(false), c.max_subset, rso);
    std::size_t violations = 0;
    for (const auto& rc : constraints)
        if (rc.rank > rc.bound) ++violations;
    doc["rank_constraints"] = dlyap::io::rank_constraints_to_json(constraints);
    doc["rank_constraint_violations"] = violations;

    dlyap::VerdictOptions vo;
    vo.orders = orders;
    vo.rank_policy.relative = c.rank_tol;
    vo.threads = c.threads;
    const dlyap::LocalIdentifiabilityReport local = dlyap::local_identifiability_verdict(g, c.trials, c.seed, vo);
    doc["local_identifiability"] = dlyap::io::local_report_to_json(local);
    doc["equation_count"] = dlyap::io::equation_count_to_json(
        dlyap::count_equations_vs_parameters(g, *std::max_element(orders.begin(), orders.end())));

    if (c.format == "csv") {
        emit(c, dlyap::io::trials_csv(local));
    } else {
        emit(c, doc.dump(2) + "\n");
    }
    return violations ? kFailure : kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state cumulants, identification and constraints for discrete Lyapunov models"};
    app.set_version_flag("--version", std::string(dlyap::kVersion));
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&cfg](CLI::App* sub) {
        sub->add_option("--graph", cfg.graph_path, "Graph JSON file")->required();
        sub->add_option("--seed", cfg.seed, "Seed for sampled parameters and trials");
        sub->add_option("--params", cfg.params_path, "Parameter JSON with A and noise vectors");
        sub->add_option("--orders", cfg.orders, "Comma separated cumulant orders from {2,3,4}");
        sub->add_option("--trials", cfg.trials, "Random points for the Jacobian verdict");
        sub->add_option("--tol", cfg.tol, "Relative forward residual tolerance");
        sub->add_option("--rank-tol", cfg.rank_tol, "Relative singular value threshold");
        sub->add_option("--degeneracy-tol", cfg.degeneracy_tol, "Closed-form denominator threshold");
        sub->add_option("--out", cfg.out, "Output path (stdout when omitted)");
        sub->add_option("--format", cfg.format, "json or csv");
        sub->add_option("--threads", cfg.threads, "Worker threads for batch computations");
    };
    CLI::App* cumulants = app.add_subcommand("cumulants", "Solve for cumulant tensors");
    add_common(cumulants);
    CLI::App* identify = app.add_subcommand("identify", "Recover parameters from a cumulant stack");
    add_common(identify);
    identify->add_option("--stack", cfg.stack_path, "Stack JSON with S, T and optionally R");
    CLI::App* analyze = app.add_subcommand("analyze", "Independence, star class, rank constraints and local verdict");
    add_common(analyze);
    analyze->add_option("--max-subset", cfg.max_subset, "Largest vertex subset in the rank constraint scan");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    try {
        if (cumulants->parsed()) cfg.command = "cumulants";
        if (identify->parsed()) cfg.command = "identify";
        if (analyze->parsed()) cfg.command = "analyze";
        validate(cfg);
        if (cfg.command == "cumulants") return cmd_cumulants(cfg);
        if (cfg.command == "identify") return cmd_identify(cfg);
        return cmd_analyze(cfg);
    } catch (const dlyap::Unstable& e) {
        std::cerr << "dlyap: " << e.what() << '\n';
        return kInstability;
    } catch (const dlyap::HypothesisViolated& e) {
        std::cerr << "dlyap: " << e.what() << '\n';
        return kIdentificationFailure;
    } catch (const dlyap::InvalidArgument& e) {
        std::cerr << "dlyap: " << e.what() << '\n';
        return kInputError;
    } catch (const dlyap::DimensionMismatch& e) {
        std::cerr << "dlyap: " << e.what() << '\n';
        return kInputError;
    } catch (const json::exception& e) {
        std::cerr << "dlyap: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "dlyap: " << e.what() << '\n';
        return kFailure;
    }
}
