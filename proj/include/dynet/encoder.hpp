#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dynet/core_model.hpp"
#include "dynet/formula_ast.hpp"

namespace dynet {

/// Fixed symbol names of the generated SMT vocabulary.
namespace vocab {
inline constexpr std::string_view kEdgeDatatype = "Edge";
inline constexpr std::string_view kMkEdge = "mk-edge";
inline constexpr std::string_view kSrc = "src";
inline constexpr std::string_view kDst = "dst";
inline constexpr std::string_view kNodes = "nodes";
inline constexpr std::string_view kNodesSize = "nodes_size";
inline constexpr std::string_view kEdges = "edges";
inline constexpr std::string_view kEdgesSize = "edges_size";
}  // namespace vocab

/// Declaration set every encoded network shares: the Edge record
/// datatype, the nodes/edges arrays with their sizes, and one
/// uninterpreted function per parameter (Edge -> Int).
class NetworkVocabulary {
public:
    explicit NetworkVocabulary(const DynamicNetwork& net);

    static ast::Sort edge_sort();
    static ast::DatatypeDecl edge_datatype_decl();

    // Declarations in rendering order: datatype, parameter functions,
    // node array + size, edge array + size.
    std::vector<ast::Declaration> declarations() const;

    const std::vector<std::string>& param_names() const noexcept { return param_names_; }
    bool has_param(std::string_view name) const noexcept;

private:
    std::vector<std::string> param_names_;
};

/// Declarations plus assertions produced for one part of the network
/// formula; standalone-renderable for testing.
struct Fragment {
    std::vector<ast::Declaration> declarations;
    std::vector<ast::Term> assertions;

    ast::Script to_script() const;
};

/// Named property templates checked against the network formula.
struct Property {
    struct NonNegative {};
    struct DegreeAtLeastOne {};
    struct ParamBound {
        std::string param;
        CompareOp op{CompareOp::Gt};
        std::int64_t value{0};
    };
    struct Raw {
        ast::Term term;
    };

    std::string name;
    std::variant<NonNegative, DegreeAtLeastOne, ParamBound, Raw> body;
};

// Node set as store-equalities over the `nodes` array plus its size.
Fragment encode_nodes(const DynamicNetwork& net);

// Edge list as store-equalities over the `edges` array plus its size.
Fragment encode_edges(const DynamicNetwork& net);

// Parameter domain constraints: one quantified assertion per parameter,
// guards compiled as implication pairs with explicit negations of all
// earlier guards (first-match semantics).
Fragment encode_params(const DynamicNetwork& net);

// Full network formula: declarations plus the node, edge, and parameter
// assertions in that order.
ast::Script encode_network(const DynamicNetwork& net);

// Property as a closed Bool term over the network vocabulary.
// Throws UnknownParam when a template references a parameter the
// network does not declare.
ast::Term encode_property(const Property& prop, const DynamicNetwork& net);

// Link presence: exists x. 1 <= x <= edges_size and edges[x] = (va, vb).
ast::Term encode_link_presence(const Edge& e);

// Observed parameter value equated with the model's function at that
// edge. Throws UnknownParam.
ast::Term encode_param_equality(const DynamicNetwork& net, std::string_view param, const Edge& e,
                                std::int64_t value);

}  // namespace dynet
