#include "dynet/encoder.hpp"

#include <algorithm>

namespace dynet {

using ast::Sort;
using ast::Term;

namespace {

std::string str(std::string_view s) { return std::string(s); }

Term edges_array() {
    return Term::var(str(vocab::kEdges), Sort::array(Sort::int_sort(), NetworkVocabulary::edge_sort()));
}

Term nodes_array() {
    return Term::var(str(vocab::kNodes), Sort::array(Sort::int_sort(), Sort::int_sort()));
}

Term edges_size() { return Term::var(str(vocab::kEdgesSize), Sort::int_sort()); }
Term nodes_size() { return Term::var(str(vocab::kNodesSize), Sort::int_sort()); }

Term int_var(std::string_view name) { return Term::var(str(name), Sort::int_sort()); }

Term mk_edge(const Edge& e) {
    return Term::constructor(str(vocab::kMkEdge),
                             {Term::int_lit(e.src.value), Term::int_lit(e.dst.value)});
}

Term edge_at(Term index) { return Term::select(edges_array(), std::move(index)); }
Term node_at(Term index) { return Term::select(nodes_array(), std::move(index)); }

Term in_range(std::string_view var, Term size) {
    return Term::and_of({Term::ge(int_var(var), Term::int_lit(1)),
                         Term::le(int_var(var), std::move(size))});
}

Term compare(CompareOp op, Term lhs, Term rhs) {
    switch (op) {
        case CompareOp::Eq: return Term::eq(std::move(lhs), std::move(rhs));
        case CompareOp::Ne: return Term::ne(std::move(lhs), std::move(rhs));
        case CompareOp::Lt: return Term::lt(std::move(lhs), std::move(rhs));
        case CompareOp::Le: return Term::le(std::move(lhs), std::move(rhs));
        case CompareOp::Gt: return Term::gt(std::move(lhs), std::move(rhs));
        case CompareOp::Ge: return Term::ge(std::move(lhs), std::move(rhs));
    }
    return Term::bool_lit(false);
}

// One guard atom over the edge at quantified index `x`.
Term compile_atom(const GuardAtom& atom, const Term& edge_term) {
    const auto selector = atom.field == EdgeField::Src ? vocab::kSrc : vocab::kDst;
    return compare(atom.op, Term::selector(str(selector), edge_term), Term::int_lit(atom.value));
}

Term compile_guard_conjunction(const EdgeGuard& guard, const Term& edge_term) {
    std::vector<Term> atoms;
    atoms.reserve(guard.atoms().size());
    for (const auto& atom : guard.atoms()) atoms.push_back(compile_atom(atom, edge_term));
    return Term::and_of(std::move(atoms));
}

// Value constraint for one domain: a disjunction over its intervals of
// lo <= f <= hi conjunctions.
Term compile_domain_bounds(const IntSet& domain, const Term& value_term) {
    std::vector<Term> alternatives;
    alternatives.reserve(domain.intervals().size());
    for (const auto& iv : domain.intervals()) {
        alternatives.push_back(Term::and_of({Term::ge(value_term, Term::int_lit(iv.lo)),
                                             Term::le(value_term, Term::int_lit(iv.hi))}));
    }
    return Term::or_of(std::move(alternatives));
}

}  // namespace

// ---------------------------------------------------------------------------
// NetworkVocabulary

NetworkVocabulary::NetworkVocabulary(const DynamicNetwork& net) {
    param_names_.reserve(net.params.size());
    for (const auto& p : net.params) param_names_.push_back(p.name);
}

Sort NetworkVocabulary::edge_sort() { return Sort::datatype(str(vocab::kEdgeDatatype)); }

ast::DatatypeDecl NetworkVocabulary::edge_datatype_decl() {
    return ast::DatatypeDecl{
        str(vocab::kEdgeDatatype),
        {ast::DatatypeConstructor{str(vocab::kMkEdge),
                                  {{str(vocab::kSrc), Sort::int_sort()},
                                   {str(vocab::kDst), Sort::int_sort()}}}}};
}

std::vector<ast::Declaration> NetworkVocabulary::declarations() const {
    std::vector<ast::Declaration> decls;
    decls.push_back(edge_datatype_decl());
    for (const auto& name : param_names_) {
        decls.push_back(ast::FunDecl{name, {edge_sort()}, Sort::int_sort()});
    }
    decls.push_back(ast::ConstDecl{str(vocab::kNodes), Sort::array(Sort::int_sort(), Sort::int_sort())});
    decls.push_back(ast::ConstDecl{str(vocab::kNodesSize), Sort::int_sort()});
    decls.push_back(ast::ConstDecl{str(vocab::kEdges), Sort::array(Sort::int_sort(), edge_sort())});
    decls.push_back(ast::ConstDecl{str(vocab::kEdgesSize), Sort::int_sort()});
    return decls;
}

bool NetworkVocabulary::has_param(std::string_view name) const noexcept {
    return std::find(param_names_.begin(), param_names_.end(), name) != param_names_.end();
}

ast::Script Fragment::to_script() const {
    ast::Script out;
    for (const auto& d : declarations) {
        if (const auto* dt = std::get_if<ast::DatatypeDecl>(&d)) {
            out.declare_datatype(*dt);
        } else if (const auto* fn = std::get_if<ast::FunDecl>(&d)) {
            out.declare_fun(fn->name, fn->params, fn->result);
        } else {
            const auto& c = std::get<ast::ConstDecl>(d);
            out.declare_const(c.name, c.sort);
        }
    }
    for (const auto& a : assertions) out.assert_term(a);
    return out;
}

// ---------------------------------------------------------------------------
// Fragments

Fragment encode_nodes(const DynamicNetwork& net) {
    Fragment frag;
    frag.declarations.push_back(
        ast::ConstDecl{str(vocab::kNodes), Sort::array(Sort::int_sort(), Sort::int_sort())});
    frag.declarations.push_back(ast::ConstDecl{str(vocab::kNodesSize), Sort::int_sort()});
    for (std::size_t j = 0; j < net.nodes.size(); ++j) {
        frag.assertions.push_back(
            Term::eq(Term::store(nodes_array(), Term::int_lit(static_cast<std::int64_t>(j + 1)),
                                 Term::int_lit(net.nodes[j].value)),
                     nodes_array()));
    }
    frag.assertions.push_back(
        Term::eq(nodes_size(), Term::int_lit(static_cast<std::int64_t>(net.nodes.size()))));
    return frag;
}

Fragment encode_edges(const DynamicNetwork& net) {
    Fragment frag;
    frag.declarations.push_back(NetworkVocabulary::edge_datatype_decl());
    frag.declarations.push_back(
        ast::ConstDecl{str(vocab::kEdges), Sort::array(Sort::int_sort(), NetworkVocabulary::edge_sort())});
    frag.declarations.push_back(ast::ConstDecl{str(vocab::kEdgesSize), Sort::int_sort()});
    for (std::size_t j = 0; j < net.edges.size(); ++j) {
        frag.assertions.push_back(
            Term::eq(Term::store(edges_array(), Term::int_lit(static_cast<std::int64_t>(j + 1)),
                                 mk_edge(net.edges[j])),
                     edges_array()));
    }
    frag.assertions.push_back(
        Term::eq(edges_size(), Term::int_lit(static_cast<std::int64_t>(net.edges.size()))));
    return frag;
}

Fragment encode_params(const DynamicNetwork& net) {
    Fragment frag;
    for (const auto& param : net.params) {
        frag.declarations.push_back(
            ast::FunDecl{param.name, {NetworkVocabulary::edge_sort()}, Sort::int_sort()});
    }
    const Term edge_term = edge_at(int_var("x"));
    for (const auto& param : net.params) {
        const Term value_term = Term::apply(param.name, {edge_term});
        std::vector<Term> rule_terms;
        for (std::size_t j = 0; j < param.rules.size(); ++j) {
            const auto& rule = param.rules[j];
            // first-match: this rule applies iff its own guard holds and
            // no earlier guard matched
            std::vector<Term> condition;
            for (std::size_t i = 0; i < j; ++i) {
                condition.push_back(
                    Term::not_of(compile_guard_conjunction(param.rules[i].when, edge_term)));
            }
            for (const auto& atom : rule.when.atoms()) {
                condition.push_back(compile_atom(atom, edge_term));
            }
            const Term bounds = compile_domain_bounds(rule.domain, value_term);
            if (condition.empty()) {
                rule_terms.push_back(bounds);
            } else {
                rule_terms.push_back(Term::implies(Term::and_of(std::move(condition)), bounds));
            }
        }
        frag.assertions.push_back(Term::forall(
            {{"x", Sort::int_sort()}},
            Term::implies(in_range("x", edges_size()), Term::and_of(std::move(rule_terms)))));
    }
    return frag;
}

ast::Script encode_network(const DynamicNetwork& net) {
    ast::Script script;
    const NetworkVocabulary vocab(net);
    for (const auto& d : vocab.declarations()) {
        if (const auto* dt = std::get_if<ast::DatatypeDecl>(&d)) {
            script.declare_datatype(*dt);
        } else if (const auto* fn = std::get_if<ast::FunDecl>(&d)) {
            script.declare_fun(fn->name, fn->params, fn->result);
        } else {
            const auto& c = std::get<ast::ConstDecl>(d);
            script.declare_const(c.name, c.sort);
        }
    }
    for (const auto& t : encode_nodes(net).assertions) script.assert_term(t);
    for (const auto& t : encode_edges(net).assertions) script.assert_term(t);
    for (const auto& t : encode_params(net).assertions) script.assert_term(t);
    return script;
}

// ---------------------------------------------------------------------------
// Properties and run-time formulas

namespace {

Term encode_non_negative(const DynamicNetwork& net) {
    const Term edge_term = edge_at(int_var("x"));
    std::vector<Term> bounds;
    bounds.reserve(net.params.size());
    for (const auto& param : net.params) {
        bounds.push_back(Term::ge(Term::apply(param.name, {edge_term}), Term::int_lit(0)));
    }
    return Term::forall({{"x", Sort::int_sort()}},
                        Term::implies(in_range("x", edges_size()), Term::and_of(std::move(bounds))));
}

Term encode_degree_at_least_one() {
    const Term node_term = node_at(int_var("x"));
    const Term body = Term::exists(
        {{"y", Sort::int_sort()}, {"z", Sort::int_sort()}},
        Term::and_of({Term::ge(int_var("y"), Term::int_lit(1)),
                      Term::le(int_var("y"), edges_size()),
                      Term::ge(int_var("z"), Term::int_lit(1)),
                      Term::le(int_var("z"), edges_size()),
                      Term::eq(Term::selector(str(vocab::kSrc), edge_at(int_var("y"))), node_term),
                      Term::eq(Term::selector(str(vocab::kDst), edge_at(int_var("z"))), node_term)}));
    return Term::forall({{"x", Sort::int_sort()}},
                        Term::implies(in_range("x", nodes_size()), body));
}

Term encode_param_bound(const Property::ParamBound& bound, const DynamicNetwork& net) {
    if (net.find_param(bound.param) == nullptr) {
        throw UnknownParam("property references unknown parameter '" + bound.param + "'");
    }
    const Term value_term = Term::apply(bound.param, {edge_at(int_var("x"))});
    return Term::forall(
        {{"x", Sort::int_sort()}},
        Term::implies(in_range("x", edges_size()),
                      compare(bound.op, value_term, Term::int_lit(bound.value))));
}

}  // namespace

Term encode_property(const Property& prop, const DynamicNetwork& net) {
    return std::visit(
        [&](const auto& body) -> Term {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, Property::NonNegative>) {
                return encode_non_negative(net);
            } else if constexpr (std::is_same_v<T, Property::DegreeAtLeastOne>) {
                return encode_degree_at_least_one();
            } else if constexpr (std::is_same_v<T, Property::ParamBound>) {
                return encode_param_bound(body, net);
            } else {
                return body.term;
            }
        },
        prop.body);
}

Term encode_link_presence(const Edge& e) {
    return Term::exists({{"x", Sort::int_sort()}},
                        Term::and_of({Term::ge(int_var("x"), Term::int_lit(1)),
                                      Term::le(int_var("x"), edges_size()),
                                      Term::eq(edge_at(int_var("x")), mk_edge(e))}));
}

Term encode_param_equality(const DynamicNetwork& net, std::string_view param, const Edge& e,
                           std::int64_t value) {
    if (net.find_param(param) == nullptr) {
        throw UnknownParam("unknown parameter '" + std::string(param) + "'");
    }
    return Term::eq(Term::apply(std::string(param), {mk_edge(e)}), Term::int_lit(value));
}

}  // namespace dynet
