#include "dynet/core_model.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dynet {

using nlohmann::json;

IntSet IntSet::from_intervals(std::vector<Interval> intervals) {
    for (const auto& iv : intervals) {
        if (iv.lo > iv.hi) {
            throw ParseError("interval with lo > hi: [" + std::to_string(iv.lo) + ", " +
                             std::to_string(iv.hi) + "]");
        }
    }
    std::sort(intervals.begin(), intervals.end());
    IntSet result;
    for (const auto& iv : intervals) {
        if (!result.intervals_.empty()) {
            auto& last = result.intervals_.back();
            if (iv.lo <= last.hi + 1) {  // overlapping or adjacent
                last.hi = std::max(last.hi, iv.hi);
                continue;
            }
        }
        result.intervals_.push_back(iv);
    }
    return result;
}

bool IntSet::contains(std::int64_t v) const noexcept {
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), v,
                               [](std::int64_t x, const Interval& iv) { return x < iv.lo; });
    if (it == intervals_.begin()) return false;
    --it;
    return v <= it->hi;
}

std::uint64_t IntSet::size() const noexcept {
    std::uint64_t total = 0;
    for (const auto& iv : intervals_) {
        total += static_cast<std::uint64_t>(iv.hi - iv.lo) + 1;
    }
    return total;
}

std::int64_t IntSet::value_at(std::uint64_t index) const {
    for (const auto& iv : intervals_) {
        const auto count = static_cast<std::uint64_t>(iv.hi - iv.lo) + 1;
        if (index < count) return iv.lo + static_cast<std::int64_t>(index);
        index -= count;
    }
    throw std::out_of_range("IntSet::value_at index past end");
}

std::int64_t IntSet::min() const {
    if (intervals_.empty()) throw std::out_of_range("IntSet::min on empty set");
    return intervals_.front().lo;
}

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "!=";
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
    }
    return "?";
}

std::string_view to_string(EdgeField field) {
    return field == EdgeField::Src ? "src" : "dst";
}

std::optional<CompareOp> compare_op_from_string(std::string_view s) {
    if (s == "=" || s == "==") return CompareOp::Eq;
    if (s == "!=") return CompareOp::Ne;
    if (s == "<") return CompareOp::Lt;
    if (s == "<=") return CompareOp::Le;
    if (s == ">") return CompareOp::Gt;
    if (s == ">=") return CompareOp::Ge;
    return std::nullopt;
}

bool GuardAtom::matches(const Edge& e) const noexcept {
    const std::int64_t lhs = field == EdgeField::Src ? e.src.value : e.dst.value;
    switch (op) {
        case CompareOp::Eq: return lhs == value;
        case CompareOp::Ne: return lhs != value;
        case CompareOp::Lt: return lhs < value;
        case CompareOp::Le: return lhs <= value;
        case CompareOp::Gt: return lhs > value;
        case CompareOp::Ge: return lhs >= value;
    }
    return false;
}

bool EdgeGuard::matches(const Edge& e) const noexcept {
    return std::all_of(atoms_.begin(), atoms_.end(),
                       [&](const GuardAtom& a) { return a.matches(e); });
}

const IntSet* ParamSpec::domain_for(const Edge& e) const noexcept {
    for (const auto& rule : rules) {
        if (rule.when.matches(e)) return &rule.domain;
    }
    return nullptr;
}

bool DynamicNetwork::has_node(NodeId id) const noexcept {
    return std::find(nodes.begin(), nodes.end(), id) != nodes.end();
}

bool DynamicNetwork::has_edge(const Edge& e) const noexcept {
    return std::find(edges.begin(), edges.end(), e) != edges.end();
}

const ParamSpec* DynamicNetwork::find_param(std::string_view name) const noexcept {
    for (const auto& p : params) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

const StaticSnapshot::Link* StaticSnapshot::find_link(const Edge& e) const noexcept {
    for (const auto& link : links) {
        if (link.edge == e) return &link;
    }
    return nullptr;
}

std::string_view to_string(ValidationIssue::Kind kind) {
    using Kind = ValidationIssue::Kind;
    switch (kind) {
        case Kind::BadNodeId: return "bad node id";
        case Kind::DuplicateNode: return "duplicate node";
        case Kind::DuplicateEdge: return "duplicate edge";
        case Kind::SelfLoop: return "self-loop";
        case Kind::DanglingEndpoint: return "dangling endpoint";
        case Kind::DuplicateParam: return "duplicate parameter";
        case Kind::ParamNotTotal: return "parameter not total";
        case Kind::EmptyDomain: return "empty domain";
    }
    return "unknown issue";
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
}

std::int64_t require_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<std::int64_t>();
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            fail(where, "unknown field '" + key + "'");
        }
    }
}

GuardAtom parse_guard_atom(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "guard atom must be an object");
    reject_unknown_keys(j, {"field", "op", "value"}, where);
    if (!j.contains("field") || !j.contains("op") || !j.contains("value")) {
        fail(where, "guard atom needs field, op, value");
    }
    GuardAtom atom;
    const auto field = j.at("field").get<std::string>();
    if (field == "src") {
        atom.field = EdgeField::Src;
    } else if (field == "dst") {
        atom.field = EdgeField::Dst;
    } else {
        fail(where, "field must be \"src\" or \"dst\", got \"" + field + "\"");
    }
    const auto op = compare_op_from_string(j.at("op").get<std::string>());
    if (!op) fail(where, "unknown comparison op \"" + j.at("op").get<std::string>() + "\"");
    atom.op = *op;
    atom.value = require_int(j.at("value"), where + ".value");
    return atom;
}

IntSet parse_domain(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "domain must be a list of [lo, hi] pairs");
    std::vector<IntSet::Interval> intervals;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& pair = j[i];
        const std::string at = where + "[" + std::to_string(i) + "]";
        if (!pair.is_array() || pair.size() != 2) fail(at, "expected [lo, hi]");
        intervals.push_back({require_int(pair[0], at), require_int(pair[1], at)});
    }
    return IntSet::from_intervals(std::move(intervals));
}

// Parameter names become SMT function symbols, so restrict them to
// plain identifiers.
bool is_identifier(std::string_view s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

ParamSpec parse_param(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "parameter must be an object");
    reject_unknown_keys(j, {"name", "rules", "units"}, where);
    if (!j.contains("name") || !j.at("name").is_string()) fail(where, "parameter needs a name");
    ParamSpec spec;
    spec.name = j.at("name").get<std::string>();
    if (!is_identifier(spec.name)) {
        fail(where, "parameter name must be an identifier, got \"" + spec.name + "\"");
    }
    if (j.contains("units")) spec.units = j.at("units").get<std::string>();
    if (!j.contains("rules") || !j.at("rules").is_array()) {
        fail(where, "parameter needs a rules list");
    }
    for (std::size_t i = 0; i < j.at("rules").size(); ++i) {
        const auto& rj = j.at("rules")[i];
        const std::string at = where + ".rules[" + std::to_string(i) + "]";
        if (!rj.is_object()) fail(at, "rule must be an object");
        reject_unknown_keys(rj, {"when", "domain"}, at);
        ParamRule rule;
        if (rj.contains("when")) {
            if (!rj.at("when").is_array()) fail(at, "when must be a list of atoms");
            std::vector<GuardAtom> atoms;
            for (std::size_t k = 0; k < rj.at("when").size(); ++k) {
                atoms.push_back(parse_guard_atom(rj.at("when")[k],
                                                 at + ".when[" + std::to_string(k) + "]"));
            }
            rule.when = EdgeGuard(std::move(atoms));
        }
        if (!rj.contains("domain")) fail(at, "rule needs a domain");
        rule.domain = parse_domain(rj.at("domain"), at + ".domain");
        spec.rules.push_back(std::move(rule));
    }
    return spec;
}

}  // namespace

DynamicNetwork parse_network(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("network document: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("network document: top level must be an object");
    reject_unknown_keys(doc, {"nodes", "edges", "params"}, "network document");
    if (!doc.contains("nodes") || !doc.at("nodes").is_array()) {
        throw ParseError("network document: missing 'nodes' list");
    }

    DynamicNetwork net;
    std::set<std::int64_t> seen_nodes;
    for (std::size_t i = 0; i < doc.at("nodes").size(); ++i) {
        const auto id = require_int(doc.at("nodes")[i], "nodes[" + std::to_string(i) + "]");
        if (!seen_nodes.insert(id).second) {
            fail("nodes[" + std::to_string(i) + "]", "duplicate node " + std::to_string(id));
        }
        net.nodes.push_back(NodeId{id});
    }

    if (doc.contains("edges")) {
        if (!doc.at("edges").is_array()) throw ParseError("network document: edges must be a list");
        std::set<std::pair<std::int64_t, std::int64_t>> seen_edges;
        for (std::size_t i = 0; i < doc.at("edges").size(); ++i) {
            const auto& ej = doc.at("edges")[i];
            const std::string at = "edges[" + std::to_string(i) + "]";
            if (!ej.is_array() || ej.size() != 2) fail(at, "expected [src, dst]");
            const Edge e{NodeId{require_int(ej[0], at)}, NodeId{require_int(ej[1], at)}};
            if (!seen_edges.insert({e.src.value, e.dst.value}).second) {
                fail(at, "duplicate edge (" + std::to_string(e.src.value) + ", " +
                             std::to_string(e.dst.value) + ")");
            }
            net.edges.push_back(e);
        }
    }

    if (doc.contains("params")) {
        if (!doc.at("params").is_array()) {
            throw ParseError("network document: params must be a list");
        }
        for (std::size_t i = 0; i < doc.at("params").size(); ++i) {
            net.params.push_back(
                parse_param(doc.at("params")[i], "params[" + std::to_string(i) + "]"));
        }
    }
    return net;
}

std::string serialize_network(const DynamicNetwork& net) {
    json doc;
    doc["nodes"] = json::array();
    for (const auto& n : net.nodes) doc["nodes"].push_back(n.value);
    doc["edges"] = json::array();
    for (const auto& e : net.edges) doc["edges"].push_back({e.src.value, e.dst.value});
    doc["params"] = json::array();
    for (const auto& p : net.params) {
        json pj;
        pj["name"] = p.name;
        if (!p.units.empty()) pj["units"] = p.units;
        pj["rules"] = json::array();
        for (const auto& rule : p.rules) {
            json rj;
            if (!rule.when.is_catch_all()) {
                rj["when"] = json::array();
                for (const auto& atom : rule.when.atoms()) {
                    rj["when"].push_back({{"field", std::string(to_string(atom.field))},
                                          {"op", std::string(to_string(atom.op))},
                                          {"value", atom.value}});
                }
            }
            rj["domain"] = json::array();
            for (const auto& iv : rule.domain.intervals()) {
                rj["domain"].push_back({iv.lo, iv.hi});
            }
            pj["rules"].push_back(std::move(rj));
        }
        doc["params"].push_back(std::move(pj));
    }
    return doc.dump(2) + "\n";
}

std::vector<ValidationIssue> validate_network(const DynamicNetwork& net) {
    using Kind = ValidationIssue::Kind;
    std::vector<ValidationIssue> issues;
    auto report = [&](Kind kind, std::string where, std::string message) {
        issues.push_back({kind, std::move(where), std::move(message)});
    };

    std::set<std::int64_t> node_ids;
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const auto id = net.nodes[i].value;
        const std::string where = "nodes[" + std::to_string(i) + "]";
        if (id < 1) report(Kind::BadNodeId, where, "node id must be >= 1, got " + std::to_string(id));
        if (!node_ids.insert(id).second) {
            report(Kind::DuplicateNode, where, "node " + std::to_string(id) + " listed twice");
        }
    }

    std::set<std::pair<std::int64_t, std::int64_t>> edge_pairs;
    for (std::size_t i = 0; i < net.edges.size(); ++i) {
        const auto& e = net.edges[i];
        const std::string where = "edges[" + std::to_string(i) + "]";
        const std::string label =
            "(" + std::to_string(e.src.value) + ", " + std::to_string(e.dst.value) + ")";
        if (e.src == e.dst) report(Kind::SelfLoop, where, "self-loop " + label);
        if (!edge_pairs.insert({e.src.value, e.dst.value}).second) {
            report(Kind::DuplicateEdge, where, "edge " + label + " listed twice");
        }
        if (!net.has_node(e.src)) {
            report(Kind::DanglingEndpoint, where,
                   "edge " + label + " references missing node " + std::to_string(e.src.value));
        }
        if (!net.has_node(e.dst)) {
            report(Kind::DanglingEndpoint, where,
                   "edge " + label + " references missing node " + std::to_string(e.dst.value));
        }
    }

    std::set<std::string> param_names;
    for (std::size_t i = 0; i < net.params.size(); ++i) {
        const auto& p = net.params[i];
        const std::string where = "params[" + std::to_string(i) + "] (" + p.name + ")";
        if (!param_names.insert(p.name).second) {
            report(Kind::DuplicateParam, where, "parameter '" + p.name + "' declared twice");
        }
        if (p.rules.empty() || !p.rules.back().when.is_catch_all()) {
            report(Kind::ParamNotTotal, where,
                   "last rule must be a catch-all so every edge has a domain");
        }
        for (std::size_t r = 0; r < p.rules.size(); ++r) {
            if (p.rules[r].domain.empty()) {
                report(Kind::EmptyDomain, where + ".rules[" + std::to_string(r) + "]",
                       "rule domain is empty");
            }
        }
    }
    return issues;
}

const IntSet& param_domain(const DynamicNetwork& net, std::string_view param, const Edge& e) {
    const ParamSpec* spec = net.find_param(param);
    if (spec == nullptr) throw UnknownParam("unknown parameter '" + std::string(param) + "'");
    if (!net.has_edge(e)) {
        throw UnknownEdge("edge (" + std::to_string(e.src.value) + ", " +
                          std::to_string(e.dst.value) + ") is not part of the network");
    }
    const IntSet* domain = spec->domain_for(e);
    if (domain == nullptr) {
        // Only reachable for non-total specs, which validate_network flags.
        throw UnknownParam("parameter '" + std::string(param) + "' has no matching rule");
    }
    return *domain;
}

}  // namespace dynet
