#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dynet {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownParam : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownEdge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NodeId {
    std::int64_t value{0};

    friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

/// Directed link between two nodes. Selector names follow the generated
/// SMT vocabulary (src/dst).
struct Edge {
    NodeId src;
    NodeId dst;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Set of integers stored as sorted, disjoint, non-adjacent closed
/// intervals. Built through from_intervals, which normalizes any input.
class IntSet {
public:
    struct Interval {
        std::int64_t lo{0};
        std::int64_t hi{0};

        friend auto operator<=>(const Interval&, const Interval&) = default;
    };

    IntSet() = default;

    // Sorts and merges overlapping or adjacent intervals. Throws
    // ParseError if some interval has lo > hi.
    static IntSet from_intervals(std::vector<Interval> intervals);

    bool empty() const noexcept { return intervals_.empty(); }
    bool contains(std::int64_t v) const noexcept;  // O(log #intervals)
    std::uint64_t size() const noexcept;           // total count of members
    std::int64_t value_at(std::uint64_t index) const;  // index in [0, size)
    std::int64_t min() const;

    const std::vector<Interval>& intervals() const noexcept { return intervals_; }

    friend bool operator==(const IntSet&, const IntSet&) = default;

private:
    std::vector<Interval> intervals_;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class EdgeField { Src, Dst };

std::string_view to_string(CompareOp op);
std::string_view to_string(EdgeField field);
std::optional<CompareOp> compare_op_from_string(std::string_view s);

struct GuardAtom {
    EdgeField field{EdgeField::Src};
    CompareOp op{CompareOp::Eq};
    std::int64_t value{0};

    bool matches(const Edge& e) const noexcept;

    friend bool operator==(const GuardAtom&, const GuardAtom&) = default;
};

/// Conjunction of comparisons over an edge's endpoints. The empty
/// conjunction is the catch-all ("otherwise") guard and matches any edge.
class EdgeGuard {
public:
    EdgeGuard() = default;
    explicit EdgeGuard(std::vector<GuardAtom> atoms) : atoms_(std::move(atoms)) {}

    bool matches(const Edge& e) const noexcept;
    bool is_catch_all() const noexcept { return atoms_.empty(); }
    const std::vector<GuardAtom>& atoms() const noexcept { return atoms_; }

    friend bool operator==(const EdgeGuard&, const EdgeGuard&) = default;

private:
    std::vector<GuardAtom> atoms_;
};

struct ParamRule {
    EdgeGuard when;
    IntSet domain;

    friend bool operator==(const ParamRule&, const ParamRule&) = default;
};

/// Piecewise parameter domain function. Rules use first-match semantics;
/// a total spec ends with a catch-all rule.
struct ParamSpec {
    std::string name;
    std::vector<ParamRule> rules;
    std::string units;  // informational only

    // First-match evaluation over an arbitrary edge (no membership
    // requirement). Returns nullptr when no rule matches.
    const IntSet* domain_for(const Edge& e) const noexcept;

    friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

struct DynamicNetwork {
    std::vector<NodeId> nodes;
    std::vector<Edge> edges;
    std::vector<ParamSpec> params;

    bool has_node(NodeId id) const noexcept;
    bool has_edge(const Edge& e) const noexcept;
    const ParamSpec* find_param(std::string_view name) const noexcept;

    friend bool operator==(const DynamicNetwork&, const DynamicNetwork&) = default;
};

/// One concrete instance of a dynamic network: every link carries a
/// single observed value per parameter.
struct StaticSnapshot {
    struct Link {
        Edge edge;
        std::map<std::string, std::int64_t> values;

        friend bool operator==(const Link&, const Link&) = default;
    };

    std::int64_t seq{0};
    std::vector<Link> links;

    const Link* find_link(const Edge& e) const noexcept;

    friend bool operator==(const StaticSnapshot&, const StaticSnapshot&) = default;
};

struct ValidationIssue {
    enum class Kind {
        BadNodeId,
        DuplicateNode,
        DuplicateEdge,
        SelfLoop,
        DanglingEndpoint,
        DuplicateParam,
        ParamNotTotal,
        EmptyDomain,
    };

    Kind kind;
    std::string where;
    std::string message;
};

std::string_view to_string(ValidationIssue::Kind kind);

DynamicNetwork parse_network(std::string_view text);  // throws ParseError
std::string serialize_network(const DynamicNetwork& net);
std::vector<ValidationIssue> validate_network(const DynamicNetwork& net);

// Domain of `param` on edge `e` under first-match rule semantics.
// Throws UnknownParam / UnknownEdge.
const IntSet& param_domain(const DynamicNetwork& net, std::string_view param, const Edge& e);

}  // namespace dynet
