#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dynet/core_model.hpp"
#include "dynet/solver_backend.hpp"

namespace dynet {

enum class AlertKind {
    LinkViolation,      // link implemented but not part of the description
    ParamViolation,     // observed value outside the declared domain
    MissingLink,        // described link absent from the snapshot (strict mode)
    MissingParamValue,  // declared parameter without a value, or a value
                        // for a parameter the description does not know
};

std::string_view to_string(AlertKind kind);

struct Alert {
    AlertKind kind{AlertKind::LinkViolation};
    Edge edge;
    std::optional<std::string> param;
    std::optional<std::int64_t> observed;
    std::int64_t snapshot_seq{0};

    friend bool operator==(const Alert&, const Alert&) = default;
};

std::string serialize_alert(const Alert& alert);

enum class ScopeMode {
    PerSnapshotScopes,  // retained link facts live in a per-snapshot scope
    Accumulate,         // retained link facts stay asserted for the session
};

struct MonitorOptions {
    bool strict_topology{true};
    std::optional<std::uint64_t> stop_after;
    ScopeMode scope_mode{ScopeMode::PerSnapshotScopes};
};

struct MonitorSummary {
    std::uint64_t snapshots_processed{0};
    std::uint64_t alerts_emitted{0};
    std::uint64_t solver_checks_issued{0};
    std::uint64_t unknown_verdicts{0};
    bool aborted{false};
    std::string abort_reason;
};

// One round of Algorithm 1 against a session that already holds the
// network formula at base scope. Undecided verdicts produce no alert.
std::vector<Alert> verify_snapshot(SolverSession& session, const DynamicNetwork& net,
                                   const StaticSnapshot& snap, const MonitorOptions& opts);

// Solver-free evaluation of the conformance relation; the reference
// oracle for verify_snapshot.
std::vector<Alert> conformance_oracle(const DynamicNetwork& net, const StaticSnapshot& snap,
                                      const MonitorOptions& opts);

// Reads newline-delimited snapshots from `source`, writes alert records
// to `sink` as they are found, and returns the run counters. A dying
// solver session is restarted once. `stop_flag` is observed between
// snapshots.
MonitorSummary run_monitor(const DynamicNetwork& net, std::istream& source, std::ostream& sink,
                           const SolverConfig& cfg, const MonitorOptions& opts,
                           const std::atomic<bool>* stop_flag = nullptr);

}  // namespace dynet
