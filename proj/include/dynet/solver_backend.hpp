#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynet/formula_ast.hpp"

namespace dynet {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SpawnError : public SolverError {
public:
    using SolverError::SolverError;
};

class HandshakeError : public SolverError {
public:
    using SolverError::SolverError;
};

class SolverSyntaxError : public SolverError {
public:
    using SolverError::SolverError;
};

class SessionClosed : public SolverError {
public:
    using SolverError::SolverError;
};

class PopUnderflow : public SolverError {
public:
    using SolverError::SolverError;
};

class ProtocolError : public SolverError {
public:
    using SolverError::SolverError;
};

struct SolverConfig {
    // argv of the solver process; empty means: use DYNET_SOLVER_CMD from
    // the environment, falling back to "z3 -in"
    std::vector<std::string> command;
    std::chrono::milliseconds timeout_per_check{30000};
    std::string memory_note;
};

// Applies the environment/default fallback chain described above.
std::vector<std::string> resolve_solver_command(const SolverConfig& cfg);

struct SatResult {
    enum class Kind { Sat, Unsat, Unknown, Timeout };

    Kind kind{Kind::Unknown};
    std::string reason;  // populated for Unknown

    static SatResult sat() { return {Kind::Sat, {}}; }
    static SatResult unsat() { return {Kind::Unsat, {}}; }
    static SatResult unknown(std::string reason) { return {Kind::Unknown, std::move(reason)}; }
    static SatResult timeout() { return {Kind::Timeout, {}}; }

    bool is_sat() const noexcept { return kind == Kind::Sat; }
    bool is_unsat() const noexcept { return kind == Kind::Unsat; }
    bool decided() const noexcept { return kind == Kind::Sat || kind == Kind::Unsat; }

    friend bool operator==(const SatResult& a, const SatResult& b) { return a.kind == b.kind; }
};

std::string_view to_string(SatResult::Kind kind);

/// One external SMT-LIB v2 solver process driven over stdin/stdout with
/// incremental push/pop scopes. Exclusive-use: not thread-safe; may be
/// moved between threads.
class SolverSession {
public:
    static SolverSession open(const SolverConfig& cfg);

    SolverSession(SolverSession&&) noexcept;
    SolverSession& operator=(SolverSession&&) noexcept;
    SolverSession(const SolverSession&) = delete;
    SolverSession& operator=(const SolverSession&) = delete;
    ~SolverSession();

    // Sends declarations and assertions. Re-declaring a symbol already
    // sent in this session surfaces as SolverSyntaxError.
    void assert_script(const ast::Script& script);
    void assert_term(const ast::Term& term);

    SatResult check_sat();

    void push();
    void pop();
    int scope_depth() const noexcept;

    bool is_open() const noexcept;
    void close();

    struct Counters {
        std::uint64_t checks_issued{0};
        std::uint64_t unknown_verdicts{0};  // includes timeouts
    };
    const Counters& counters() const noexcept;

    // Captured solver stderr, for diagnostics.
    std::string diagnostics() const;

private:
    SolverSession();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace dynet
