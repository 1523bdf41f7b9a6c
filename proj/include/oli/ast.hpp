#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "oli/box.hpp"
#include "oli/error.hpp"
#include "oli/value.hpp"

namespace oli {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Allowed occurrence count of a named child. `max == nullopt` is unbounded.
struct Cardinality {
    std::uint32_t min = 1;
    std::optional<std::uint32_t> max = 1;

    static Cardinality exactly_one() { return {1, 1}; }
    static Cardinality optional() { return {0, 1}; }
    static Cardinality any_number() { return {0, std::nullopt}; }

    friend bool operator==(const Cardinality&, const Cardinality&) = default;
};

struct TypeDef;

struct SubTypeAst {
    std::string name;
    Cardinality cardinality;
    Box<TypeDef> def;
    SourceLoc loc;

    friend bool operator==(const SubTypeAst&, const SubTypeAst&) = default;
};

namespace typedefs {

struct Native {
    NativeType native;
    friend bool operator==(const Native&, const Native&) = default;
};

/// `NativeType { SubTypeList }`
struct Inline {
    NativeType native;
    std::vector<SubTypeAst> subtypes;
    friend bool operator==(const Inline&, const Inline&) = default;
};

/// `NativeType { ? }`
struct UntypedSubnodes {
    NativeType native;
    friend bool operator==(const UntypedSubnodes&, const UntypedSubnodes&) = default;
};

struct Link {
    std::string name;
    friend bool operator==(const Link&, const Link&) = default;
};

struct Undefined {
    friend bool operator==(const Undefined&, const Undefined&) = default;
};

/// Binary alternative; longer alternations nest to the right.
struct Choice {
    Box<TypeDef> left;
    Box<TypeDef> right;
    friend bool operator==(const Choice&, const Choice&) = default;
};

} // namespace typedefs

struct TypeDef {
    std::variant<typedefs::Native, typedefs::Inline, typedefs::UntypedSubnodes, typedefs::Link,
                 typedefs::Undefined, typedefs::Choice>
        node;
    SourceLoc loc;

    friend bool operator==(const TypeDef&, const TypeDef&) = default;
};

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class BinaryOp { Add, Sub, Eq, Ne, Lt, Le, Gt, Ge };
enum class UnaryOp { Not, Negate };

std::string_view to_string(BinaryOp op);

struct Expr;

namespace exprs {

struct Literal {
    BasicValue value;
    friend bool operator==(const Literal&, const Literal&) = default;
};

struct PathRead {
    Path path;
    friend bool operator==(const PathRead&, const PathRead&) = default;
};

struct IsDefined {
    Path path;
    friend bool operator==(const IsDefined&, const IsDefined&) = default;
};

struct Unary {
    UnaryOp op;
    Box<Expr> operand;
    friend bool operator==(const Unary&, const Unary&) = default;
};

struct Binary {
    BinaryOp op;
    Box<Expr> lhs;
    Box<Expr> rhs;
    friend bool operator==(const Binary&, const Binary&) = default;
};

} // namespace exprs

struct Expr {
    std::variant<exprs::Literal, exprs::PathRead, exprs::IsDefined, exprs::Unary, exprs::Binary> node;
    SourceLoc loc;

    friend bool operator==(const Expr&, const Expr&) = default;
};

// ---------------------------------------------------------------------------
// Processes
// ---------------------------------------------------------------------------

struct Process;

namespace procs {

struct Sequence {
    std::vector<Process> items;
    friend bool operator==(const Sequence&, const Sequence&) = default;
};

struct Parallel {
    Box<Process> left;
    Box<Process> right;
    friend bool operator==(const Parallel&, const Parallel&) = default;
};

/// `op(x)`; an empty path discards the payload.
struct OneWayRecv {
    std::string op;
    Path var;
    friend bool operator==(const OneWayRecv&, const OneWayRecv&) = default;
};

/// `op(x)(y) { body }`; replies with the tree at `out` once body completes.
struct RequestResponseRecv {
    std::string op;
    Path in;
    Path out;
    Box<Process> body;
    friend bool operator==(const RequestResponseRecv&, const RequestResponseRecv&) = default;
};

using InputGuard = std::variant<OneWayRecv, RequestResponseRecv>;

struct InputBranch {
    InputGuard guard;
    Box<Process> body;
    SourceLoc loc;
    friend bool operator==(const InputBranch&, const InputBranch&) = default;
};

/// `[guard] { body } [guard] { body } ...`
struct InputChoice {
    std::vector<InputBranch> branches;
    friend bool operator==(const InputChoice&, const InputChoice&) = default;
};

/// `op@Port(expr)`
struct Notification {
    std::string op;
    std::string port;
    std::optional<Expr> arg;
    friend bool operator==(const Notification&, const Notification&) = default;
};

/// `op@Port(expr)(result)`; an empty result path discards the reply.
struct SolicitResponse {
    std::string op;
    std::string port;
    std::optional<Expr> arg;
    Path result;
    friend bool operator==(const SolicitResponse&, const SolicitResponse&) = default;
};

struct Assign {
    Path path;
    Expr value;
    friend bool operator==(const Assign&, const Assign&) = default;
};

struct If {
    Expr cond;
    Box<Process> then;
    std::optional<Box<Process>> otherwise;
    friend bool operator==(const If&, const If&) = default;
};

struct MatchArm {
    std::string type_name;
    Box<Process> body;
    SourceLoc loc;
    friend bool operator==(const MatchArm&, const MatchArm&) = default;
};

/// `match( path ) { Type { ... } Type { ... } }`
struct Match {
    Path subject;
    std::vector<MatchArm> arms;
    friend bool operator==(const Match&, const Match&) = default;
};

struct CallDefine {
    std::string name;
    friend bool operator==(const CallDefine&, const CallDefine&) = default;
};

struct Nil {
    friend bool operator==(const Nil&, const Nil&) = default;
};

} // namespace procs

struct Process {
    std::variant<procs::Sequence, procs::Parallel, procs::InputChoice, procs::OneWayRecv,
                 procs::RequestResponseRecv, procs::Notification, procs::SolicitResponse,
                 procs::Assign, procs::If, procs::Match, procs::CallDefine, procs::Nil>
        node;
    SourceLoc loc;

    friend bool operator==(const Process&, const Process&) = default;
};

// ---------------------------------------------------------------------------
// Deployment and program
// ---------------------------------------------------------------------------

struct RequestResponseOp {
    std::string name;
    std::string request_type;
    std::string response_type;
    SourceLoc loc;
    friend bool operator==(const RequestResponseOp&, const RequestResponseOp&) = default;
};

struct OneWayOp {
    std::string name;
    std::string request_type;
    SourceLoc loc;
    friend bool operator==(const OneWayOp&, const OneWayOp&) = default;
};

struct InterfaceDecl {
    std::string name;
    std::vector<RequestResponseOp> request_response_ops;
    std::vector<OneWayOp> one_way_ops;
    SourceLoc loc;
    friend bool operator==(const InterfaceDecl&, const InterfaceDecl&) = default;
};

enum class PortDirection { Input, Output };

struct PortConfig {
    std::string name;
    std::string location;
    std::string protocol;
    std::vector<std::string> interfaces;
    PortDirection direction = PortDirection::Input;
    SourceLoc loc;
    friend bool operator==(const PortConfig&, const PortConfig&) = default;
};

enum class ExecutionMode { Single, Concurrent, Sequential };

std::string_view to_string(ExecutionMode mode);

struct TypeDecl {
    std::string name;
    TypeDef def;
    SourceLoc loc;
    friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

struct AstProgram {
    std::vector<std::string> includes;
    std::vector<TypeDecl> type_decls;
    std::vector<InterfaceDecl> interfaces;
    std::vector<PortConfig> input_ports;
    std::vector<PortConfig> output_ports;
    ExecutionMode execution_mode = ExecutionMode::Single;
    std::optional<Process> init_block;
    std::map<std::string, Process> defines;
    /// Absent for include-only files.
    std::optional<Process> main_block;

    friend bool operator==(const AstProgram&, const AstProgram&) = default;
};

// Shorthand constructors, mostly for tests and the optimizer.
inline Process make_process(auto node, SourceLoc loc = {}) {
    return Process{std::move(node), std::move(loc)};
}
inline TypeDef make_type(auto node, SourceLoc loc = {}) {
    return TypeDef{std::move(node), std::move(loc)};
}
inline Expr make_expr(auto node, SourceLoc loc = {}) {
    return Expr{std::move(node), std::move(loc)};
}

} // namespace oli
