// io.hpp - JSON and CSV serialization of graphs, tensors, stacks and reports.
#pragma once

#include "dlyap/constraints.hpp"
#include "dlyap/graph.hpp"
#include "dlyap/identify.hpp"
#include "dlyap/jacobian.hpp"
#include "dlyap/lyapunov.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace dlyap::io {

using json = nlohmann::json;

/// Parses a file as JSON. Throws InvalidArgument when unreadable or malformed.
json read_json_file(const std::string& path);
/// Throws InvalidArgument when the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);

/// {"p": 2, "edges": [[0,0],[0,1]]} with [source, target] pairs.
json graph_to_json(const DirectedGraph& g);
/// Throws InvalidArgument on schema errors.
DirectedGraph graph_from_json(const json& j);

json matrix_to_json(const Eigen::MatrixXd& M);
Eigen::MatrixXd matrix_from_json(const json& j);

/// {"order": 3, "p": 2, "entries": {"0,0,1": x, ...}} keyed by canonical multisets.
json tensor_to_json(const SymmetricTensor& T);
/// Keys may list indices in any order; missing multisets default to zero.
/// Throws InvalidArgument on schema errors.
SymmetricTensor tensor_from_json(const json& j);

/// {"S": tensor, "T": tensor, "R": tensor (optional)}.
json stack_to_json(const CumulantStack& stack);
CumulantStack stack_from_json(const json& j);

/// {"A": [[...]], "omega2": [...], "omega3": [...], "omega4": [...]}.
json model_point_to_json(const ModelPoint& mp);
/// Noise vectors default to ones when omitted. Throws InvalidArgument and DimensionMismatch.
ModelPoint model_point_from_json(const DirectedGraph& g, const json& j);

json report_to_json(const IdentifiabilityReport& rep);
json equation_count_to_json(const EquationCount& ec);
json local_report_to_json(const LocalIdentifiabilityReport& rep);
json rank_constraints_to_json(const std::vector<RankConstraint>& constraints);

/// Rows labeled by parameters, columns by cumulants.
std::string toric_matrix_csv(const ToricMatrix& P);
/// Dense order-2 tensor as p comma-separated rows without a header.
std::string dense_matrix_csv(const SymmetricTensor& S);
/// "index,value" lines over canonical multisets.
std::string tensor_csv(const SymmetricTensor& T);
/// "trial,seed,radius,rank,gap,sigma_max,sigma_min" lines.
std::string trials_csv(const LocalIdentifiabilityReport& rep);

} // namespace dlyap::io
