#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dynet/core_model.hpp"
#include "dynet/encoder.hpp"
#include "dynet/solver_backend.hpp"

namespace dynet {

enum class Classification {
    ModelInconsistent,       // the network formula alone is unsatisfiable
    PropertiesInconsistent,  // the property conjunction alone is unsatisfiable
    Holds,                   // network and properties are jointly satisfiable
    Conflict,                // both consistent, joint formula unsatisfiable
    Inconclusive,            // an unknown/timeout verdict in a deciding position
};

std::string_view to_string(Classification c);

/// Which scope the properties-alone consistency check runs in:
/// Vocabulary sends only the declarations; FullModelDecls additionally
/// asserts the concrete node/edge structure (but no parameter
/// constraints).
enum class PropertiesAloneScope { Vocabulary, FullModelDecls };

struct CheckOptions {
    PropertiesAloneScope properties_alone_scope{PropertiesAloneScope::Vocabulary};
};

struct CheckReport {
    SatResult model_verdict;       // network formula alone
    SatResult properties_verdict;  // property conjunction alone
    SatResult joint_verdict;       // conjunction of both
    Classification classification{Classification::Inconclusive};
};

// Pure classification table over the three verdicts.
Classification classify(const SatResult& model, const SatResult& properties,
                        const SatResult& joint);

// Satisfiability of the network formula alone.
SatResult check_consistency(const DynamicNetwork& net, const SolverConfig& cfg);

// Three scoped checks in one session: model alone, properties alone,
// then the conjunction.
CheckReport check_properties(const DynamicNetwork& net, const std::vector<Property>& props,
                             const SolverConfig& cfg, const CheckOptions& options = {});

// Property file: JSON list of {name, template, ...} records.
std::vector<Property> parse_properties(std::string_view text);  // throws ParseError

}  // namespace dynet
