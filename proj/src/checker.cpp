#include "dynet/checker.hpp"

#include <json.hpp>

namespace dynet {

using nlohmann::json;

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::ModelInconsistent: return "ModelInconsistent";
        case Classification::PropertiesInconsistent: return "PropertiesInconsistent";
        case Classification::Holds: return "Holds";
        case Classification::Conflict: return "Conflict";
        case Classification::Inconclusive: return "Inconclusive";
    }
    return "?";
}

Classification classify(const SatResult& model, const SatResult& properties,
                        const SatResult& joint) {
    if (model.is_unsat()) return Classification::ModelInconsistent;
    if (!model.decided()) return Classification::Inconclusive;
    if (properties.is_unsat()) return Classification::PropertiesInconsistent;
    if (!properties.decided()) return Classification::Inconclusive;
    if (joint.is_sat()) return Classification::Holds;
    if (joint.is_unsat()) return Classification::Conflict;
    return Classification::Inconclusive;
}

SatResult check_consistency(const DynamicNetwork& net, const SolverConfig& cfg) {
    SolverSession session = SolverSession::open(cfg);
    session.assert_script(encode_network(net));
    return session.check_sat();
}

CheckReport check_properties(const DynamicNetwork& net, const std::vector<Property>& props,
                             const SolverConfig& cfg, const CheckOptions& options) {
    const ast::Script model = encode_network(net);
    std::vector<ast::Term> property_terms;
    property_terms.reserve(props.size());
    for (const auto& prop : props) property_terms.push_back(encode_property(prop, net));
    // the property conjunction; empty property sets collapse to `true`
    const ast::Term properties_formula = ast::Term::and_of(property_terms);

    SolverSession session = SolverSession::open(cfg);
    // declarations stay for the whole session; scopes carry assertions
    ast::Script declarations_only;
    for (const auto& d : model.declarations()) {
        if (const auto* dt = std::get_if<ast::DatatypeDecl>(&d)) {
            declarations_only.declare_datatype(*dt);
        } else if (const auto* fn = std::get_if<ast::FunDecl>(&d)) {
            declarations_only.declare_fun(fn->name, fn->params, fn->result);
        } else {
            const auto& c = std::get<ast::ConstDecl>(d);
            declarations_only.declare_const(c.name, c.sort);
        }
    }
    session.assert_script(declarations_only);

    CheckReport report;

    session.push();
    for (const auto& t : model.assertions()) session.assert_term(t);
    report.model_verdict = session.check_sat();
    session.pop();

    session.push();
    if (options.properties_alone_scope == PropertiesAloneScope::FullModelDecls) {
        // concrete structure visible, parameter constraints absent
        for (const auto& t : encode_nodes(net).assertions) session.assert_term(t);
        for (const auto& t : encode_edges(net).assertions) session.assert_term(t);
    }
    session.assert_term(properties_formula);
    report.properties_verdict = session.check_sat();
    session.pop();

    session.push();
    for (const auto& t : model.assertions()) session.assert_term(t);
    session.assert_term(properties_formula);
    report.joint_verdict = session.check_sat();
    session.pop();

    report.classification =
        classify(report.model_verdict, report.properties_verdict, report.joint_verdict);
    return report;
}

std::vector<Property> parse_properties(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("property file: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError("property file: top level must be a list");

    std::vector<Property> props;
    std::vector<std::string> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& pj = doc[i];
        const std::string where = "property[" + std::to_string(i) + "]";
        if (!pj.is_object()) throw ParseError(where + ": expected an object");
        if (!pj.contains("name") || !pj.at("name").is_string()) {
            throw ParseError(where + ": needs a name");
        }
        if (!pj.contains("template") || !pj.at("template").is_string()) {
            throw ParseError(where + ": needs a template");
        }
        Property prop;
        prop.name = pj.at("name").get<std::string>();
        for (const auto& name : seen) {
            if (name == prop.name) {
                throw ParseError(where + ": duplicate property name '" + prop.name + "'");
            }
        }
        seen.push_back(prop.name);

        const auto tmpl = pj.at("template").get<std::string>();
        if (tmpl == "non_negative") {
            prop.body = Property::NonNegative{};
        } else if (tmpl == "degree_at_least_one") {
            prop.body = Property::DegreeAtLeastOne{};
        } else if (tmpl == "param_bound") {
            if (!pj.contains("param") || !pj.at("param").is_string()) {
                throw ParseError(where + ": param_bound needs a param");
            }
            if (!pj.contains("op") || !pj.at("op").is_string()) {
                throw ParseError(where + ": param_bound needs an op");
            }
            if (!pj.contains("value") || !pj.at("value").is_number_integer()) {
                throw ParseError(where + ": param_bound needs an integer value");
            }
            const auto op = compare_op_from_string(pj.at("op").get<std::string>());
            if (!op) {
                throw ParseError(where + ": unknown op \"" + pj.at("op").get<std::string>() +
                                 "\"");
            }
            prop.body = Property::ParamBound{pj.at("param").get<std::string>(), *op,
                                             pj.at("value").get<std::int64_t>()};
        } else if (tmpl == "raw_smtlib") {
            if (!pj.contains("term") || !pj.at("term").is_string()) {
                throw ParseError(where + ": raw_smtlib needs a term");
            }
            prop.body = Property::Raw{ast::Term::raw_bool(pj.at("term").get<std::string>())};
        } else {
            throw ParseError(where + ": unknown template \"" + tmpl + "\"");
        }
        props.push_back(std::move(prop));
    }
    return props;
}

}  // namespace dynet
