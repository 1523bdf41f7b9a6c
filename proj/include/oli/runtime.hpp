#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "oli/ast.hpp"
#include "oli/console.hpp"
#include "oli/net.hpp"
#include "oli/types.hpp"

namespace oli::runtime {

/// How a process finished: normally, or with a named fault.
struct Completion {
    std::optional<std::string> fault;
    std::string detail;

    bool ok() const noexcept { return !fault; }
    static Completion normal() { return {}; }
    static Completion faulted(std::string name, std::string detail = {}) {
        return {std::move(name), std::move(detail)};
    }
};

// Fault names raised by the runtime itself.
inline constexpr const char* kTypeMismatch = "TypeMismatch";
inline constexpr const char* kRecursionLimit = "RecursionLimit";
inline constexpr const char* kEvalError = "EvalError";
inline constexpr const char* kChannelClosed = "ChannelClosed";
inline constexpr const char* kConnectError = "ConnectError";
inline constexpr const char* kTimeout = "Timeout";
inline constexpr const char* kUnknownOperation = "UnknownOperation";

inline constexpr int kMaxCallDepth = 10000;

/// Variable store of one session: every variable is a path into one tree.
/// Each access is atomic, so parallel branches never observe torn values.
class SessionState {
public:
    explicit SessionState(std::uint64_t id, ValueTree initial = {}) : id_(id), root_(std::move(initial)) {}

    std::uint64_t id() const noexcept { return id_; }

    /// Copy of the subtree at `path`; empty when absent.
    ValueTree read(const Path& path) const;
    BasicValue read_root(const Path& path) const;
    bool is_defined(const Path& path) const;

    /// Sets the root value at `path`, creating intermediate nodes; children kept.
    void assign_root(const Path& path, BasicValue value);
    /// Replaces the whole subtree at `path`.
    void assign_tree(const Path& path, ValueTree value);

    ValueTree snapshot() const;

private:
    std::uint64_t id_;
    mutable std::mutex mutex_;
    ValueTree root_;
};

/// An inbound request plus where to send its reply.
struct Inbound {
    comm::Message msg;
    std::shared_ptr<comm::Channel> reply_to;
};

/// Queue of validated inbound messages that receive statements draw from.
/// Either fed by push(), or pulls from a blocking source on demand.
class Inbox {
public:
    using Pull = std::function<Inbound()>;

    Inbox() = default;
    explicit Inbox(Pull pull) : pull_(std::move(pull)) {}

    void push(Inbound in);
    void push_front(Inbound in);

    /// First queued message whose operation is in `ops`, waiting as needed.
    /// @throws ChannelClosed once the source is exhausted or close() is called.
    Inbound take(const std::set<std::string>& ops);
    Inbound take_any();

    void close();

private:
    template <class Pred>
    Inbound take_if(Pred&& accept);

    Pull pull_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<Inbound> queue_;
    bool reading_ = false;
    bool closed_ = false;
    std::string close_reason_ = "input closed";
};

enum class OpKind { OneWay, RequestResponse };

struct OperationSig {
    OpKind kind;
    TypePtr request;
    TypePtr response; // null for one-way
};

/// Everything shared by all sessions of one interpreter. Immutable while
/// sessions run, apart from the counters.
struct Runtime {
    const TypeTable* types = nullptr;
    std::map<std::string, comm::Location> output_ports;
    std::map<std::string, OperationSig> input_ops;
    std::chrono::milliseconds solicit_timeout{30000};
    comm::TraceFn trace;
    Console* console = nullptr;
    std::ostream* log = nullptr;
    std::atomic<std::uint64_t> choice_branches_run{0};
};

/// Per-strand execution state. Copied for each parallel branch; the session
/// and inbox are shared.
struct ExecutionContext {
    Runtime* runtime = nullptr;
    SessionState* session = nullptr;
    Inbox* inbox = nullptr;
    int call_depth = 0;
};

/// Node of the interpretation tree. Trees are immutable after building.
class ProcessNode {
public:
    virtual ~ProcessNode() = default;
    virtual Completion run(ExecutionContext& ctx) const = 0;
    virtual std::string_view kind() const = 0;
    /// Directly nested nodes in source order; define bodies are not followed.
    virtual std::vector<const ProcessNode*> children() const { return {}; }
};

using NodePtr = std::shared_ptr<const ProcessNode>;

/// Body of a `define`, shared by every call site.
struct DefineSlot {
    std::string name;
    NodePtr body;
};

class CallDefineNode final : public ProcessNode {
public:
    explicit CallDefineNode(std::shared_ptr<const DefineSlot> slot) : slot_(std::move(slot)) {}
    Completion run(ExecutionContext& ctx) const override;
    std::string_view kind() const override { return "CallDefine"; }
    const DefineSlot* target() const { return slot_.get(); }

private:
    std::shared_ptr<const DefineSlot> slot_;
};

class MatchNode final : public ProcessNode {
public:
    struct Arm {
        std::string type_name;
        TypePtr type;
        NodePtr body;
    };

    MatchNode(Path subject, std::vector<Arm> arms);
    Completion run(ExecutionContext& ctx) const override;
    std::string_view kind() const override { return "Match"; }
    std::vector<const ProcessNode*> children() const override;
    const std::vector<Arm>& arms() const { return arms_; }

private:
    Path subject_;
    std::vector<Arm> arms_;
    std::vector<TypePtr> arm_types_;
};

struct ProcessTree {
    NodePtr init;
    NodePtr main;
    std::map<std::string, std::shared_ptr<DefineSlot>> defines;
};

/// Builds the interpretation tree of a verified program.
/// @throws BuildError on inconsistencies verification should have caught.
ProcessTree build_process_tree(const AstProgram& program, const TypeTable& types);
NodePtr build_process(const Process& process, const TypeTable& types,
                      const std::map<std::string, std::shared_ptr<DefineSlot>>& defines = {});

Completion exec(const ProcessNode& node, ExecutionContext& ctx);

/// @throws EvalError
BasicValue eval_expr(const Expr& expr, const SessionState& session);

/// Value sent for an output argument: a bare path sends its whole subtree,
/// any other expression sends its basic value.
ValueTree eval_argument(const Expr& expr, const SessionState& session);

/// Ops of the receive statements that can start a session of `main`.
std::set<std::string> session_starters(const AstProgram& program);

struct RuntimeOptions {
    /// Port name to location URI, replacing the declared Location.
    std::map<std::string, std::string> location_overrides;
    std::chrono::milliseconds solicit_timeout{30000};
    comm::TraceFn trace;
    /// Defaults to a console on standard output.
    Console* console = nullptr;
    /// Warnings and session fault reports; defaults to standard error.
    std::ostream* log = nullptr;
    std::function<void(std::uint64_t session_id)> on_session_start;
    std::function<void(const std::string& port, const comm::Location& bound)> on_bound;
};

/// Runs one program: its init block once, then main as a client or as a
/// service according to the execution mode.
class Interpreter {
public:
    /// Resolves types and builds the tree; `program` must verify cleanly.
    /// @throws BuildError, LocationError
    Interpreter(const AstProgram& program, RuntimeOptions options = {});
    ~Interpreter();

    Interpreter(const Interpreter&) = delete;
    Interpreter& operator=(const Interpreter&) = delete;

    bool is_service() const { return !program_.input_ports.empty(); }

    /// Client programs: init then main, in one session.
    Completion run_client();

    /// Runs init, binds every input port and starts serving. Returns once
    /// the ports accept connections.
    /// @throws BindError
    Completion start();

    /// Blocks until single-mode main finishes or shutdown() is called.
    /// Returns main's completion in single mode.
    Completion wait();

    /// Stops accepting, ends pending receives and joins everything.
    void shutdown();

    /// start() then wait().
    Completion serve();

    std::uint16_t bound_port(const std::string& port) const;
    const ProcessTree& tree() const { return tree_; }
    const TypeTable& types() const { return types_; }
    std::uint64_t choice_branches_run() const { return runtime_.choice_branches_run.load(); }
    std::uint64_t sessions_started() const { return next_session_id_.load() - 1; }

private:
    bool validate(const Inbound& in);
    void reject(const Inbound& in, const std::string& fault, const std::string& why);
    void handle_connection(const std::shared_ptr<comm::Channel>& channel);
    void run_session(Inbox& inbox);
    std::uint64_t new_session_id();
    void log_fault(std::uint64_t session, const Completion& c);

    AstProgram program_;
    RuntimeOptions options_;
    TypeTable types_;
    ProcessTree tree_;
    Runtime runtime_;
    Console default_console_;
    std::set<std::string> starters_;
    std::map<std::string, comm::Location> input_locations_;

    ValueTree global_state_;
    std::atomic<std::uint64_t> next_session_id_{1};

    std::vector<std::unique_ptr<comm::Listener>> listeners_;
    std::map<std::string, std::uint16_t> bound_ports_;
    Inbox global_inbox_;
    StackThread single_main_;
    std::optional<Completion> single_result_;

    std::mutex seq_mutex_;
    std::condition_variable seq_cv_;
    std::uint64_t seq_next_ticket_ = 0;
    std::uint64_t seq_serving_ = 0;

    std::mutex state_mutex_;
    std::condition_variable state_cv_;
    bool finished_ = false;
    bool shut_down_ = false;
};

} // namespace oli::runtime
