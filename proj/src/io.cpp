// io.cpp - JSON and CSV serialization of graphs, tensors, stacks and reports.
#include "dlyap/io.hpp"

#include "dlyap/error.hpp"
#include "dlyap/tensor.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dlyap::io {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidArgument("malformed JSON in '" + path + "': " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    out << text;
    if (!out) throw InvalidArgument("failed writing '" + path + "'");
}

namespace {

// Infinite values (unbounded singular-value gaps) are written as strings.
json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

double to_double(const json& j, const char* what) {
    if (!j.is_number()) throw InvalidArgument(std::string(what) + " must be a number");
    return j.get<double>();
}

int to_int(const json& j, const char* what) {
    if (!j.is_number_integer()) throw InvalidArgument(std::string(what) + " must be an integer");
    return j.get<int>();
}

Eigen::VectorXd vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = to_double(j[k], what);
    return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(number(v(k)));
    return out;
}

} // namespace

json graph_to_json(const DirectedGraph& g) {
    json edges = json::array();
    for (const Edge& e : g.edges()) edges.push_back({e.from, e.to});
    return {{"p", g.p()}, {"edges", edges}};
}

DirectedGraph graph_from_json(const json& j) {
    if (!j.is_object() || !j.contains("p") || !j.contains("edges"))
        throw InvalidArgument("graph JSON needs fields 'p' and 'edges'");
    const int p = to_int(j.at("p"), "p");
    if (p < 1) throw InvalidArgument("p must be positive");
    const json& es = j.at("edges");
    if (!es.is_array()) throw InvalidArgument("'edges' must be an array");
    std::vector<Edge> edges;
    for (const json& e : es) {
        if (!e.is_array() || e.size() != 2) throw InvalidArgument("each edge must be a [source, target] pair");
        edges.push_back({to_int(e[0], "edge endpoint"), to_int(e[1], "edge endpoint")});
    }
    return DirectedGraph(p, edges);
}

json matrix_to_json(const Eigen::MatrixXd& M) {
    json out = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(number(M(r, c)));
        out.push_back(row);
    }
    return out;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InvalidArgument("matrix must be a nonempty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    Eigen::MatrixXd M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw InvalidArgument("matrix rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c)
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = to_double(j[r][c], "matrix entry");
    }
    return M;
}

json tensor_to_json(const SymmetricTensor& T) {
    json entries = json::object();
    const auto& ms = T.index().multisets();
    for (std::size_t k = 0; k < ms.size(); ++k) entries[index_key(ms[k])] = number(T.values()[k]);
    return {{"order", T.order()}, {"p", T.p()}, {"entries", entries}};
}

namespace {

std::vector<int> parse_index_key(const std::string& key, int order, int p) {
    std::vector<int> index;
    std::stringstream in(key);
    std::string part;
    while (std::getline(in, part, ',')) {
        std::size_t used = 0;
        int v = -1;
        try {
            v = std::stoi(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != part.size()) throw InvalidArgument("bad tensor key '" + key + "'");
        if (v < 0 || v >= p) throw InvalidArgument("tensor index out of range in '" + key + "'");
        index.push_back(v);
    }
    if (static_cast<int>(index.size()) != order) throw InvalidArgument("tensor key '" + key + "' has the wrong length");
    return index;
}

} // namespace

SymmetricTensor tensor_from_json(const json& j) {
    if (!j.is_object() || !j.contains("order") || !j.contains("p") || !j.contains("entries"))
        throw InvalidArgument("tensor JSON needs fields 'order', 'p' and 'entries'");
    const int order = to_int(j.at("order"), "order");
    const int p = to_int(j.at("p"), "p");
    if (order < 1 || p < 1) throw InvalidArgument("tensor order and p must be positive");
    const json& entries = j.at("entries");
    if (!entries.is_object()) throw InvalidArgument("'entries' must map index keys to values");
    SymmetricTensor T(order, p);
    for (const auto& [key, value] : entries.items())
        T.set(parse_index_key(key, order, p), to_double(value, "tensor value"));
    return T;
}

json stack_to_json(const CumulantStack& stack) {
    json out = {{"S", tensor_to_json(stack.S)}, {"T", tensor_to_json(stack.T)}};
    if (stack.R) out["R"] = tensor_to_json(*stack.R);
    return out;
}

CumulantStack stack_from_json(const json& j) {
    if (!j.is_object() || !j.contains("S") || !j.contains("T")) throw InvalidArgument("stack JSON needs 'S' and 'T'");
    CumulantStack stack;
    stack.S = tensor_from_json(j.at("S"));
    stack.T = tensor_from_json(j.at("T"));
    if (j.contains("R")) stack.R = tensor_from_json(j.at("R"));
    try {
        stack.validate();
    } catch (const DimensionMismatch& e) {
        throw InvalidArgument(std::string("inconsistent stack: ") + e.what());
    }
    return stack;
}

json model_point_to_json(const ModelPoint& mp) {
    return {{"A", matrix_to_json(mp.A.entries())},
            {"omega2", vector_to_json(mp.omega2.w)},
            {"omega3", vector_to_json(mp.omega3.w)},
            {"omega4", vector_to_json(mp.omega4.w)}};
}

ModelPoint model_point_from_json(const DirectedGraph& g, const json& j) {
    if (!j.is_object() || !j.contains("A")) throw InvalidArgument("parameter JSON needs field 'A'");
    const Eigen::MatrixXd A = matrix_from_json(j.at("A"));
    if (A.rows() != g.p() || A.cols() != g.p()) throw InvalidArgument("'A' must be p x p");
    ModelPoint mp{ParameterMatrix(g, A), {}, {}, {}};
    auto noise = [&](const char* key, int order) {
        Eigen::VectorXd w = Eigen::VectorXd::Ones(g.p());
        if (j.contains(key)) w = vector_from_json(j.at(key), key);
        if (w.size() != g.p()) throw InvalidArgument(std::string("'") + key + "' must have p entries");
        return DiagonalCumulant(order, w);
    };
    mp.omega2 = noise("omega2", 2);
    mp.omega3 = noise("omega3", 3);
    mp.omega4 = noise("omega4", 4);
    return mp;
}

json equation_count_to_json(const EquationCount& ec) {
    return {{"order", ec.order},
            {"parameters", ec.parameters},
            {"equations", ec.equations},
            {"zero_entries", ec.zero_entries},
            {"bound_satisfied", ec.bound_satisfied}};
}

json report_to_json(const IdentifiabilityReport& rep) {
    json out;
    out["method"] = rep.method;
    out["verdict"] = to_string(rep.verdict);
    out["message"] = rep.message;
    if (rep.A) out["A"] = matrix_to_json(*rep.A);
    json noise = json::array();
    for (std::size_t k = 0; k < rep.noise.size(); ++k) {
        json n = {{"order", rep.noise[k].order}, {"w", vector_to_json(rep.noise[k].w)}};
        if (k < rep.noise_offdiag_defects.size()) n["offdiag_defect"] = number(rep.noise_offdiag_defects[k]);
        if (k < rep.forward_residuals.size()) n["forward_residual"] = number(rep.forward_residuals[k]);
        noise.push_back(n);
    }
    out["noise"] = noise;
    json sources = json::array();
    for (const auto& s : rep.sources)
        sources.push_back({{"source", s.source}, {"partner", s.partner}, {"formula", s.formula}});
    out["sources"] = sources;
    json blocks = json::array();
    for (const auto& b : rep.blocks)
        blocks.push_back({{"vertex", b.vertex},
                          {"rows", b.rows},
                          {"unknowns", b.unknowns},
                          {"condition_number", number(b.condition_number)},
                          {"rank", b.rank}});
    out["blocks"] = blocks;
    if (rep.equation_count) out["equation_count"] = equation_count_to_json(*rep.equation_count);
    return out;
}

json local_report_to_json(const LocalIdentifiabilityReport& rep) {
    json trials = json::array();
    for (const auto& t : rep.trials)
        trials.push_back({{"seed", t.seed},
                          {"radius", t.radius},
                          {"rank", t.rank},
                          {"gap", number(t.gap)},
                          {"sigma_max", number(t.sigma_max)},
                          {"sigma_min", number(t.sigma_min)}});
    return {{"verdict", rep.verdict},
            {"locally_identifiable", rep.locally_identifiable},
            {"structural", rep.structural},
            {"augmented", rep.augmented},
            {"orders", rep.orders},
            {"edges", rep.edges},
            {"offdiag_rows", rep.offdiag_rows},
            {"generic_rank", rep.generic_rank},
            {"deficiency", rep.deficiency},
            {"note", rep.note},
            {"trials", trials}};
}

json rank_constraints_to_json(const std::vector<RankConstraint>& constraints) {
    json out = json::array();
    for (const auto& rc : constraints)
        out.push_back({{"kind", to_string(rc.kind)},
                       {"U", rc.U},
                       {"bound", rc.bound},
                       {"rank", rc.rank},
                       {"rows", rc.rows.size()},
                       {"vacuous", rc.vacuous},
                       {"minors_checked", rc.minors_checked},
                       {"max_violation", number(rc.max_violation)}});
    return out;
}

std::string toric_matrix_csv(const ToricMatrix& P) {
    std::ostringstream out;
    out << "parameter";
    for (const auto& c : P.column_labels) out << ',' << c;
    out << '\n';
    for (std::size_t r = 0; r < P.num_rows(); ++r) {
        out << P.row_labels[r];
        for (long e : P.entries[r]) out << ',' << e;
        out << '\n';
    }
    return out.str();
}

std::string dense_matrix_csv(const SymmetricTensor& S) {
    if (S.order() != 2) throw InvalidArgument("dense CSV export needs an order-2 tensor");
    std::ostringstream out;
    out.precision(std::numeric_limits<double>::max_digits10);
    const int p = S.p();
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) out << (j ? "," : "") << S.at({i, j});
        out << '\n';
    }
    return out.str();
}

std::string tensor_csv(const SymmetricTensor& T) {
    std::ostringstream out;
    out.precision(std::numeric_limits<double>::max_digits10);
    out << "index,value\n";
    const auto& ms = T.index().multisets();
    for (std::size_t k = 0; k < ms.size(); ++k) out << '"' << index_key(ms[k]) << "\"," << T.values()[k] << '\n';
    return out.str();
}

std::string trials_csv(const LocalIdentifiabilityReport& rep) {
    std::ostringstream out;
    out.precision(std::numeric_limits<double>::max_digits10);
    out << "trial,seed,radius,rank,gap,sigma_max,sigma_min\n";
    for (std::size_t k = 0; k < rep.trials.size(); ++k) {
        const auto& t = rep.trials[k];
        out << k << ',' << t.seed << ',' << t.radius << ',' << t.rank << ',' << t.gap << ',' << t.sigma_max << ','
            << t.sigma_min << '\n';
    }
    return out.str();
}

} // namespace dlyap::io
