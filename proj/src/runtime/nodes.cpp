#include <optional>

#include "oli/runtime.hpp"

namespace oli::runtime {
namespace {

Completion fault_from(const std::exception& e) {
    const char* name = "InternalError";
    if (dynamic_cast<const EvalError*>(&e)) name = kEvalError;
    else if (dynamic_cast<const CyclicTypeError*>(&e)) name = kTypeMismatch;
    else if (dynamic_cast<const ConnectError*>(&e)) name = kConnectError;
    else if (dynamic_cast<const TimeoutError*>(&e)) name = kTimeout;
    else if (dynamic_cast<const ChannelClosed*>(&e)) name = kChannelClosed;
    else if (dynamic_cast<const DecodeError*>(&e)) name = "DecodeError";
    else if (dynamic_cast<const EncodeError*>(&e)) name = "EncodeError";
    return Completion::faulted(name, e.what());
}

void reply(const Inbound& in, ValueTree payload, std::optional<std::string> fault = std::nullopt) {
    if (!in.reply_to) return;
    comm::Message m;
    m.resource_path = in.msg.resource_path;
    m.operation = in.msg.operation;
    m.payload = std::move(payload);
    m.fault = std::move(fault);
    in.reply_to->send(m);
}

ValueTree fault_detail(const Completion& c) {
    return c.detail.empty() ? ValueTree{} : ValueTree(c.detail);
}

// ---------------------------------------------------------------------------

class NilNode final : public ProcessNode {
public:
    Completion run(ExecutionContext&) const override { return Completion::normal(); }
    std::string_view kind() const override { return "Nil"; }
};

class SequenceNode final : public ProcessNode {
public:
    explicit SequenceNode(std::vector<NodePtr> items) : items_(std::move(items)) {}
    Completion run(ExecutionContext& ctx) const override {
        for (const auto& item : items_) {
            Completion c = exec(*item, ctx);
            if (!c.ok()) return c;
        }
        return Completion::normal();
    }
    std::string_view kind() const override { return "Sequence"; }
    std::vector<const ProcessNode*> children() const override {
        std::vector<const ProcessNode*> out;
        for (const auto& item : items_) out.push_back(item.get());
        return out;
    }

private:
    std::vector<NodePtr> items_;
};

class ParallelNode final : public ProcessNode {
public:
    ParallelNode(NodePtr left, NodePtr right) : left_(std::move(left)), right_(std::move(right)) {}
    Completion run(ExecutionContext& ctx) const override {
        Completion left_result;
        ExecutionContext left_ctx = ctx;
        {
            StackThread t([&] { left_result = exec(*left_, left_ctx); });
            Completion right_result = exec(*right_, ctx);
            t.join();
            if (!left_result.ok()) return left_result;
            return right_result;
        }
    }
    std::string_view kind() const override { return "Parallel"; }
    std::vector<const ProcessNode*> children() const override { return {left_.get(), right_.get()}; }

private:
    NodePtr left_, right_;
};

/// Shared by plain receives and input-choice guards.
struct OneWayGuard {
    std::string op;
    Path var;

    Completion handle(const Inbound& in, ExecutionContext& ctx) const {
        if (!var.empty()) ctx.session->assign_tree(var, in.msg.payload);
        return Completion::normal();
    }
};

struct RequestResponseGuard {
    std::string op;
    Path in;
    Path out;
    NodePtr body;

    Completion handle(const Inbound& inbound, ExecutionContext& ctx) const {
        if (!in.empty()) ctx.session->assign_tree(in, inbound.msg.payload);
        Completion c = exec(*body, ctx);
        try {
            if (!c.ok()) {
                reply(inbound, fault_detail(c), c.fault);
                return c;
            }
            ValueTree response = out.empty() ? ValueTree{} : ctx.session->read(out);
            auto sig = ctx.runtime->input_ops.find(op);
            if (sig != ctx.runtime->input_ops.end() && sig->second.response) {
                bool ok = false;
                std::string why = "response of '" + op + "' does not match its declared type";
                try {
                    ok = conforms(response, *sig->second.response, *ctx.runtime->types);
                } catch (const CyclicTypeError& e) {
                    why = e.what();
                }
                if (!ok) {
                    reply(inbound, ValueTree(why), std::string(kTypeMismatch));
                    return Completion::faulted(kTypeMismatch, why);
                }
            }
            reply(inbound, std::move(response));
        } catch (const Error& e) {
            return fault_from(e);
        }
        return Completion::normal();
    }
};

using Guard = std::variant<OneWayGuard, RequestResponseGuard>;

const std::string& guard_op(const Guard& g) {
    return std::visit([](const auto& x) -> const std::string& { return x.op; }, g);
}

Completion handle_guard(const Guard& g, const Inbound& in, ExecutionContext& ctx) {
    return std::visit([&](const auto& x) { return x.handle(in, ctx); }, g);
}

class ReceiveNode final : public ProcessNode {
public:
    explicit ReceiveNode(Guard guard) : guard_(std::move(guard)), ops_{guard_op(guard_)} {}
    Completion run(ExecutionContext& ctx) const override {
        if (!ctx.inbox) return Completion::faulted(kChannelClosed, "no input available");
        Inbound in = ctx.inbox->take(ops_);
        return handle_guard(guard_, in, ctx);
    }
    std::string_view kind() const override {
        return std::holds_alternative<OneWayGuard>(guard_) ? "OneWayRecv" : "RequestResponseRecv";
    }
    std::vector<const ProcessNode*> children() const override {
        if (auto* rr = std::get_if<RequestResponseGuard>(&guard_)) return {rr->body.get()};
        return {};
    }

private:
    Guard guard_;
    std::set<std::string> ops_;
};

class InputChoiceNode final : public ProcessNode {
public:
    struct Branch {
        Guard guard;
        NodePtr body;
    };

    explicit InputChoiceNode(std::vector<Branch> branches) : branches_(std::move(branches)) {
        for (const auto& b : branches_) ops_.insert(guard_op(b.guard));
    }

    Completion run(ExecutionContext& ctx) const override {
        if (!ctx.inbox) return Completion::faulted(kChannelClosed, "no input available");
        Inbound in = ctx.inbox->take(ops_);
        for (const auto& b : branches_) {
            if (guard_op(b.guard) != in.msg.operation) continue;
            ctx.runtime->choice_branches_run.fetch_add(1);
            Completion c = handle_guard(b.guard, in, ctx);
            if (!c.ok()) return c;
            return exec(*b.body, ctx);
        }
        return Completion::faulted(kUnknownOperation, "no branch for '" + in.msg.operation + "'");
    }
    std::string_view kind() const override { return "InputChoice"; }
    std::vector<const ProcessNode*> children() const override {
        std::vector<const ProcessNode*> out;
        for (const auto& b : branches_) {
            if (auto* rr = std::get_if<RequestResponseGuard>(&b.guard)) out.push_back(rr->body.get());
            out.push_back(b.body.get());
        }
        return out;
    }

private:
    std::vector<Branch> branches_;
    std::set<std::string> ops_;
};

class SendNode final : public ProcessNode {
public:
    SendNode(std::string op, std::string port, std::optional<Expr> arg, std::optional<Path> result)
        : op_(std::move(op)), port_(std::move(port)), arg_(std::move(arg)), result_(std::move(result)) {}

    Completion run(ExecutionContext& ctx) const override {
        auto it = ctx.runtime->output_ports.find(port_);
        if (it == ctx.runtime->output_ports.end())
            return Completion::faulted(kConnectError, "no output port '" + port_ + "'");
        const comm::Location& where = it->second;
        ValueTree payload = arg_ ? eval_argument(*arg_, *ctx.session) : ValueTree{};

        ValueTree answer;
        if (where.is_local()) {
            if (where.host != "console" || op_ != "println" || !ctx.runtime->console)
                return Completion::faulted(kConnectError, "no local service for " + op_ + "@" + port_);
            answer = ctx.runtime->console->println(payload);
        } else {
            comm::Message msg;
            msg.operation = op_;
            msg.payload = std::move(payload);
            if (!result_) {
                comm::notify(where, msg, ctx.runtime->trace);
                return Completion::normal();
            }
            comm::Message got = comm::solicit(where, msg, ctx.runtime->solicit_timeout, ctx.runtime->trace);
            if (got.fault) return Completion::faulted(*got.fault, render(got.payload.root()));
            answer = std::move(got.payload);
        }
        if (result_ && !result_->empty()) ctx.session->assign_tree(*result_, std::move(answer));
        return Completion::normal();
    }
    std::string_view kind() const override { return result_ ? "SolicitResponse" : "Notification"; }

private:
    std::string op_;
    std::string port_;
    std::optional<Expr> arg_;
    std::optional<Path> result_;
};

class AssignNode final : public ProcessNode {
public:
    AssignNode(Path path, Expr value) : path_(std::move(path)), value_(std::move(value)) {}
    Completion run(ExecutionContext& ctx) const override {
        ctx.session->assign_root(path_, eval_expr(value_, *ctx.session));
        return Completion::normal();
    }
    std::string_view kind() const override { return "Assign"; }

private:
    Path path_;
    Expr value_;
};

class IfNode final : public ProcessNode {
public:
    IfNode(Expr cond, NodePtr then, NodePtr otherwise)
        : cond_(std::move(cond)), then_(std::move(then)), otherwise_(std::move(otherwise)) {}
    Completion run(ExecutionContext& ctx) const override {
        BasicValue v = eval_expr(cond_, *ctx.session);
        auto* b = std::get_if<bool>(&v);
        if (!b) throw EvalError("if condition is " + std::string(kind_name(v)) + ", not bool");
        if (*b) return exec(*then_, ctx);
        return otherwise_ ? exec(*otherwise_, ctx) : Completion::normal();
    }
    std::string_view kind() const override { return "If"; }
    std::vector<const ProcessNode*> children() const override {
        if (otherwise_) return {then_.get(), otherwise_.get()};
        return {then_.get()};
    }

private:
    Expr cond_;
    NodePtr then_, otherwise_;
};

// ---------------------------------------------------------------------------

class Builder {
public:
    Builder(const TypeTable& types, const std::map<std::string, std::shared_ptr<DefineSlot>>& defines)
        : types_(types), defines_(defines) {}

    NodePtr build(const Process& p) {
        return std::visit([&](const auto& n) { return build_node(n); }, p.node);
    }

private:
    NodePtr build_node(const procs::Sequence& s) {
        std::vector<NodePtr> items;
        for (const auto& item : s.items) items.push_back(build(item));
        return std::make_shared<SequenceNode>(std::move(items));
    }
    NodePtr build_node(const procs::Parallel& p) {
        return std::make_shared<ParallelNode>(build(*p.left), build(*p.right));
    }
    NodePtr build_node(const procs::OneWayRecv& r) { return std::make_shared<ReceiveNode>(guard(r)); }
    NodePtr build_node(const procs::RequestResponseRecv& r) { return std::make_shared<ReceiveNode>(guard(r)); }
    NodePtr build_node(const procs::InputChoice& c) {
        std::vector<InputChoiceNode::Branch> branches;
        for (const auto& b : c.branches)
            branches.push_back({std::visit([&](const auto& g) { return guard(g); }, b.guard), build(*b.body)});
        return std::make_shared<InputChoiceNode>(std::move(branches));
    }
    NodePtr build_node(const procs::Notification& n) {
        return std::make_shared<SendNode>(n.op, n.port, n.arg, std::nullopt);
    }
    NodePtr build_node(const procs::SolicitResponse& s) {
        return std::make_shared<SendNode>(s.op, s.port, s.arg, s.result);
    }
    NodePtr build_node(const procs::Assign& a) { return std::make_shared<AssignNode>(a.path, a.value); }
    NodePtr build_node(const procs::If& i) {
        return std::make_shared<IfNode>(i.cond, build(*i.then), i.otherwise ? build(**i.otherwise) : nullptr);
    }
    NodePtr build_node(const procs::Match& m) {
        std::vector<MatchNode::Arm> arms;
        for (const auto& arm : m.arms) {
            TypePtr t;
            try {
                t = types_.lookup(arm.type_name);
            } catch (const UnresolvedLink& e) {
                throw BuildError(std::string("match arm: ") + e.what());
            }
            arms.push_back({arm.type_name, std::move(t), build(*arm.body)});
        }
        return std::make_shared<MatchNode>(m.subject, std::move(arms));
    }
    NodePtr build_node(const procs::CallDefine& c) {
        auto it = defines_.find(c.name);
        if (it == defines_.end()) throw BuildError("call of undefined procedure '" + c.name + "'");
        return std::make_shared<CallDefineNode>(it->second);
    }
    NodePtr build_node(const procs::Nil&) { return std::make_shared<NilNode>(); }

    Guard guard(const procs::OneWayRecv& r) { return OneWayGuard{r.op, r.var}; }
    Guard guard(const procs::RequestResponseRecv& r) {
        return RequestResponseGuard{r.op, r.in, r.out, build(*r.body)};
    }

    const TypeTable& types_;
    const std::map<std::string, std::shared_ptr<DefineSlot>>& defines_;
};

void collect_starters(const Process& p, const AstProgram& program, std::set<std::string>& out,
                      std::set<std::string>& visiting) {
    std::visit(Overloaded{
                   [&](const procs::Sequence& s) {
                       if (!s.items.empty()) collect_starters(s.items.front(), program, out, visiting);
                   },
                   [&](const procs::Parallel& par) {
                       collect_starters(*par.left, program, out, visiting);
                       collect_starters(*par.right, program, out, visiting);
                   },
                   [&](const procs::InputChoice& c) {
                       for (const auto& b : c.branches)
                           out.insert(std::visit([](const auto& g) { return g.op; }, b.guard));
                   },
                   [&](const procs::OneWayRecv& r) { out.insert(r.op); },
                   [&](const procs::RequestResponseRecv& r) { out.insert(r.op); },
                   [&](const procs::CallDefine& c) {
                       auto it = program.defines.find(c.name);
                       if (it == program.defines.end() || !visiting.insert(c.name).second) return;
                       collect_starters(it->second, program, out, visiting);
                       visiting.erase(c.name);
                   },
                   [](const auto&) {},
               },
               p.node);
}

} // namespace

Completion exec(const ProcessNode& node, ExecutionContext& ctx) {
    try {
        return node.run(ctx);
    } catch (const std::exception& e) {
        return fault_from(e);
    }
}

Completion CallDefineNode::run(ExecutionContext& ctx) const {
    if (ctx.call_depth >= kMaxCallDepth)
        return Completion::faulted(kRecursionLimit, "more than " + std::to_string(kMaxCallDepth) +
                                                        " nested calls of '" + slot_->name + "'");
    if (!slot_->body) throw BuildError("procedure '" + slot_->name + "' has no body");
    ++ctx.call_depth;
    Completion c = exec(*slot_->body, ctx);
    --ctx.call_depth;
    return c;
}

MatchNode::MatchNode(Path subject, std::vector<Arm> arms) : subject_(std::move(subject)), arms_(std::move(arms)) {
    for (const auto& arm : arms_) arm_types_.push_back(arm.type);
}

Completion MatchNode::run(ExecutionContext& ctx) const {
    ValueTree value = ctx.session->read(subject_);
    std::optional<std::size_t> pick;
    try {
        pick = select_arm(value, arm_types_, *ctx.runtime->types);
    } catch (const CyclicTypeError& e) {
        return Completion::faulted(kTypeMismatch, e.what());
    }
    if (!pick)
        return Completion::faulted(kTypeMismatch, "no arm of match(" + path_string(subject_) + ") accepts the value");
    return exec(*arms_[*pick].body, ctx);
}

std::vector<const ProcessNode*> MatchNode::children() const {
    std::vector<const ProcessNode*> out;
    for (const auto& arm : arms_) out.push_back(arm.body.get());
    return out;
}

NodePtr build_process(const Process& process, const TypeTable& types,
                      const std::map<std::string, std::shared_ptr<DefineSlot>>& defines) {
    return Builder(types, defines).build(process);
}

ProcessTree build_process_tree(const AstProgram& program, const TypeTable& types) {
    ProcessTree tree;
    for (const auto& [name, body] : program.defines) tree.defines[name] = std::make_shared<DefineSlot>(DefineSlot{name, nullptr});
    Builder builder(types, tree.defines);
    for (const auto& [name, body] : program.defines) tree.defines[name]->body = builder.build(body);
    tree.init = program.init_block ? builder.build(*program.init_block) : std::make_shared<NilNode>();
    tree.main = program.main_block ? builder.build(*program.main_block) : std::make_shared<NilNode>();
    return tree;
}

std::set<std::string> session_starters(const AstProgram& program) {
    std::set<std::string> out;
    std::set<std::string> visiting;
    if (program.main_block) collect_starters(*program.main_block, program, out, visiting);
    return out;
}

} // namespace oli::runtime
