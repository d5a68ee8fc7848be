#include "dynet/solver_backend.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <sstream>

namespace dynet {

std::string_view to_string(SatResult::Kind kind) {
    switch (kind) {
        case SatResult::Kind::Sat: return "sat";
        case SatResult::Kind::Unsat: return "unsat";
        case SatResult::Kind::Unknown: return "unknown";
        case SatResult::Kind::Timeout: return "timeout";
    }
    return "?";
}

std::vector<std::string> resolve_solver_command(const SolverConfig& cfg) {
    if (!cfg.command.empty()) return cfg.command;
    if (const char* env = std::getenv("DYNET_SOLVER_CMD"); env != nullptr && *env != '\0') {
        std::vector<std::string> argv;
        std::istringstream words((std::string(env)));
        std::string word;
        while (words >> word) argv.push_back(word);
        if (!argv.empty()) return argv;
    }
    return {"z3", "-in"};
}

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::chrono::milliseconds kHandshakeDeadline{60000};
constexpr std::chrono::milliseconds kReplyGrace{5000};

struct Pipe {
    int read_end{-1};
    int write_end{-1};

    void open() {
        int fds[2];
        if (::pipe(fds) != 0) {
            throw SpawnError(std::string("pipe: ") + std::strerror(errno));
        }
        read_end = fds[0];
        write_end = fds[1];
    }
};

void close_fd(int& fd) {
    if (fd >= 0) {
        ::close(fd);
        fd = -1;
    }
}

}  // namespace

struct SolverSession::Impl {
    pid_t pid{-1};
    int to_solver{-1};
    int from_solver{-1};
    int from_solver_err{-1};
    bool session_open{false};
    int depth{0};
    std::chrono::milliseconds timeout{30000};
    Counters counters;
    std::string reply_buf;   // unconsumed solver stdout
    std::string stderr_buf;  // accumulated solver stderr

    ~Impl() { shutdown(true); }

    void mark_closed() { session_open = false; }

    void shutdown(bool force) {
        if (pid > 0) {
            if (session_open) {
                // polite exit; ignore a dead pipe
                const char* bye = "(exit)\n";
                (void)!::write(to_solver, bye, std::strlen(bye));
            }
            close_fd(to_solver);
            int status = 0;
            bool reaped = false;
            for (int i = 0; i < 40; ++i) {  // ~200 ms grace
                if (::waitpid(pid, &status, WNOHANG) == pid) {
                    reaped = true;
                    break;
                }
                ::usleep(5000);
            }
            if (!reaped && force) {
                ::kill(pid, SIGKILL);
                ::waitpid(pid, &status, 0);
            }
            pid = -1;
        }
        close_fd(to_solver);
        close_fd(from_solver);
        close_fd(from_solver_err);
        session_open = false;
    }

    void drain_stderr() {
        if (from_solver_err < 0) return;
        char chunk[4096];
        while (true) {
            struct pollfd pfd{from_solver_err, POLLIN, 0};
            if (::poll(&pfd, 1, 0) <= 0 || (pfd.revents & POLLIN) == 0) break;
            const ssize_t n = ::read(from_solver_err, chunk, sizeof(chunk));
            if (n <= 0) break;
            stderr_buf.append(chunk, static_cast<std::size_t>(n));
        }
    }

    void send(std::string_view text) {
        if (!session_open) throw SessionClosed("solver session is closed");
        std::size_t written = 0;
        while (written < text.size()) {
            const ssize_t n = ::write(to_solver, text.data() + written, text.size() - written);
            if (n < 0) {
                if (errno == EINTR) continue;
                mark_closed();
                throw SessionClosed(std::string("write to solver failed: ") +
                                    std::strerror(errno));
            }
            written += static_cast<std::size_t>(n);
        }
    }

    // Pulls bytes until `reply_buf` holds at least one complete reply.
    // Returns false on deadline.
    bool fill(Clock::time_point deadline) {
        while (Clock::now() < deadline) {
            const auto remaining =
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
            struct pollfd pfds[2] = {{from_solver, POLLIN, 0}, {from_solver_err, POLLIN, 0}};
            const int rc = ::poll(pfds, 2, static_cast<int>(std::max<std::int64_t>(
                                              1, remaining.count())));
            if (rc < 0) {
                if (errno == EINTR) continue;
                mark_closed();
                throw SessionClosed(std::string("poll failed: ") + std::strerror(errno));
            }
            if (rc == 0) return false;
            if (pfds[1].revents & POLLIN) {
                char chunk[4096];
                const ssize_t n = ::read(from_solver_err, chunk, sizeof(chunk));
                if (n > 0) stderr_buf.append(chunk, static_cast<std::size_t>(n));
            }
            if (pfds[0].revents & (POLLIN | POLLHUP)) {
                char chunk[4096];
                const ssize_t n = ::read(from_solver, chunk, sizeof(chunk));
                if (n > 0) {
                    reply_buf.append(chunk, static_cast<std::size_t>(n));
                    return true;
                }
                if (n == 0) {
                    drain_stderr();
                    mark_closed();
                    throw SessionClosed("solver closed its output stream" +
                                        (stderr_buf.empty() ? std::string()
                                                            : "; stderr: " + stderr_buf));
                }
                if (errno != EINTR && errno != EAGAIN) {
                    mark_closed();
                    throw SessionClosed(std::string("read from solver failed: ") +
                                        std::strerror(errno));
                }
            } else if (pfds[0].revents & (POLLERR | POLLNVAL)) {
                mark_closed();
                throw SessionClosed("solver output stream entered an error state");
            }
        }
        return false;
    }

    // Extracts one whitespace-delimited token or balanced s-expression
    // from reply_buf. Empty optional: need more bytes.
    std::optional<std::string> take_reply() {
        std::size_t i = 0;
        while (i < reply_buf.size() &&
               std::isspace(static_cast<unsigned char>(reply_buf[i]))) {
            ++i;
        }
        if (i >= reply_buf.size()) {
            reply_buf.clear();
            return std::nullopt;
        }
        if (reply_buf[i] != '(') {
            std::size_t end = i;
            while (end < reply_buf.size() &&
                   !std::isspace(static_cast<unsigned char>(reply_buf[end]))) {
                ++end;
            }
            if (end == reply_buf.size()) return std::nullopt;  // token may continue
            std::string token = reply_buf.substr(i, end - i);
            reply_buf.erase(0, end);
            return token;
        }
        int nesting = 0;
        bool in_string = false;
        for (std::size_t j = i; j < reply_buf.size(); ++j) {
            const char c = reply_buf[j];
            if (in_string) {
                if (c == '"') in_string = false;
            } else if (c == '"') {
                in_string = true;
            } else if (c == '(') {
                ++nesting;
            } else if (c == ')') {
                --nesting;
                if (nesting == 0) {
                    std::string sexpr = reply_buf.substr(i, j - i + 1);
                    reply_buf.erase(0, j + 1);
                    return sexpr;
                }
            }
        }
        return std::nullopt;
    }

    std::string read_reply(Clock::time_point deadline, std::string_view context) {
        while (true) {
            if (auto reply = take_reply()) return *reply;
            if (!fill(deadline)) {
                throw ProtocolError("timed out waiting for solver reply to " +
                                    std::string(context));
            }
        }
    }

    void expect_success(const std::string& reply, std::string_view context) {
        if (reply == "success") return;
        if (reply.rfind("(error", 0) == 0) {
            drain_stderr();
            throw SolverSyntaxError("solver rejected " + std::string(context) + ": " + reply);
        }
        throw ProtocolError("unexpected solver reply to " + std::string(context) + ": " + reply);
    }

    // Sends `count` commands worth of text and checks their acks.
    void run_commands(std::string_view text, std::size_t count, std::string_view context) {
        send(text);
        const auto deadline = Clock::now() + timeout + kReplyGrace;
        for (std::size_t i = 0; i < count; ++i) {
            expect_success(read_reply(deadline, context), context);
        }
    }
};

SolverSession::SolverSession() : impl_(std::make_unique<Impl>()) {}
SolverSession::SolverSession(SolverSession&&) noexcept = default;
SolverSession& SolverSession::operator=(SolverSession&&) noexcept = default;

SolverSession::~SolverSession() = default;

SolverSession SolverSession::open(const SolverConfig& cfg) {
    if (cfg.timeout_per_check.count() <= 0) {
        throw std::invalid_argument("SolverConfig.timeout_per_check must be positive");
    }
    const std::vector<std::string> argv = resolve_solver_command(cfg);
    if (argv.empty()) throw SpawnError("solver command is empty");

    Pipe to_child, from_child, err_child, exec_report;
    to_child.open();
    from_child.open();
    err_child.open();
    exec_report.open();
    ::fcntl(exec_report.write_end, F_SETFD, FD_CLOEXEC);

    const pid_t pid = ::fork();
    if (pid < 0) {
        throw SpawnError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::dup2(to_child.read_end, STDIN_FILENO);
        ::dup2(from_child.write_end, STDOUT_FILENO);
        ::dup2(err_child.write_end, STDERR_FILENO);
        for (int fd : {to_child.read_end, to_child.write_end, from_child.read_end,
                       from_child.write_end, err_child.read_end, err_child.write_end,
                       exec_report.read_end}) {
            ::close(fd);
        }
        std::vector<char*> raw;
        raw.reserve(argv.size() + 1);
        for (const auto& arg : argv) raw.push_back(const_cast<char*>(arg.c_str()));
        raw.push_back(nullptr);
        ::execvp(raw[0], raw.data());
        const int err = errno;
        (void)!::write(exec_report.write_end, &err, sizeof(err));
        ::_exit(127);
    }

    SolverSession session;
    Impl& impl = *session.impl_;
    impl.pid = pid;
    impl.to_solver = to_child.write_end;
    impl.from_solver = from_child.read_end;
    impl.from_solver_err = err_child.read_end;
    impl.timeout = cfg.timeout_per_check;
    impl.session_open = true;
    close_fd(to_child.read_end);
    close_fd(from_child.write_end);
    close_fd(err_child.write_end);
    close_fd(exec_report.write_end);

    // exec failure is reported through the close-on-exec pipe
    int exec_errno = 0;
    const ssize_t reported = ::read(exec_report.read_end, &exec_errno, sizeof(exec_errno));
    close_fd(exec_report.read_end);
    if (reported > 0) {
        impl.session_open = false;
        impl.shutdown(true);
        throw SpawnError("cannot execute solver '" + argv[0] + "': " +
                         std::strerror(exec_errno));
    }

    const auto deadline = Clock::now() + kHandshakeDeadline;
    try {
        impl.send("(set-option :print-success true)\n");
        impl.expect_success(impl.read_reply(deadline, "print-success handshake"),
                            "print-success handshake");
        impl.send("(set-option :timeout " + std::to_string(cfg.timeout_per_check.count()) +
                  ")\n");
        impl.expect_success(impl.read_reply(deadline, "timeout option"), "timeout option");
        impl.send("(echo \"ok\")\n");
        const std::string echoed = impl.read_reply(deadline, "echo handshake");
        if (echoed != "ok" && echoed != "\"ok\"") {
            throw HandshakeError("solver did not echo the handshake, got: " + echoed);
        }
    } catch (const SolverSyntaxError& e) {
        throw HandshakeError(std::string("solver rejected option setup: ") + e.what());
    } catch (const ProtocolError& e) {
        throw HandshakeError(std::string("solver handshake failed: ") + e.what());
    }
    return session;
}

void SolverSession::assert_script(const ast::Script& script) {
    if (!impl_ || !impl_->session_open) throw SessionClosed("solver session is closed");
    const std::string text = ast::render_smtlib(script);
    const std::size_t commands = script.declarations().size() + script.assertions().size();
    impl_->run_commands(text, commands, "script");
}

void SolverSession::assert_term(const ast::Term& term) {
    if (!impl_ || !impl_->session_open) throw SessionClosed("solver session is closed");
    impl_->run_commands("(assert " + ast::render_term(term) + ")\n", 1, "assert");
}

SatResult SolverSession::check_sat() {
    if (!impl_ || !impl_->session_open) throw SessionClosed("solver session is closed");
    Impl& impl = *impl_;
    impl.counters.checks_issued += 1;
    impl.send("(check-sat)\n");
    const auto deadline = Clock::now() + impl.timeout + kReplyGrace + impl.timeout;
    std::string reply;
    try {
        reply = impl.read_reply(deadline, "check-sat");
    } catch (const ProtocolError&) {
        // solver ignored its soft deadline; hard-kill and surface Timeout
        impl.counters.unknown_verdicts += 1;
        impl.shutdown(true);
        return SatResult::timeout();
    }
    if (reply == "sat") return SatResult::sat();
    if (reply == "unsat") return SatResult::unsat();
    if (reply == "unknown") {
        impl.counters.unknown_verdicts += 1;
        std::string reason;
        try {
            impl.send("(get-info :reason-unknown)\n");
            reason = impl.read_reply(Clock::now() + kReplyGrace, "reason-unknown");
        } catch (const SolverError&) {
            reason.clear();
        }
        if (reason.find("timeout") != std::string::npos ||
            reason.find("canceled") != std::string::npos ||
            reason.find("cancelled") != std::string::npos ||
            reason.find("resource") != std::string::npos) {
            return SatResult::timeout();
        }
        return SatResult::unknown(reason);
    }
    if (reply.rfind("(error", 0) == 0) {
        throw SolverSyntaxError("check-sat failed: " + reply);
    }
    throw ProtocolError("unparsable check-sat reply: " + reply);
}

void SolverSession::push() {
    if (!impl_ || !impl_->session_open) throw SessionClosed("solver session is closed");
    impl_->run_commands("(push 1)\n", 1, "push");
    impl_->depth += 1;
}

void SolverSession::pop() {
    if (!impl_ || !impl_->session_open) throw SessionClosed("solver session is closed");
    if (impl_->depth < 1) throw PopUnderflow("pop with no open scope");
    impl_->run_commands("(pop 1)\n", 1, "pop");
    impl_->depth -= 1;
}

int SolverSession::scope_depth() const noexcept { return impl_ ? impl_->depth : 0; }

bool SolverSession::is_open() const noexcept { return impl_ && impl_->session_open; }

void SolverSession::close() {
    if (impl_) impl_->shutdown(true);
}

const SolverSession::Counters& SolverSession::counters() const noexcept {
    return impl_->counters;
}

std::string SolverSession::diagnostics() const {
    if (!impl_) return {};
    impl_->drain_stderr();
    return impl_->stderr_buf;
}

}  // namespace dynet
