#include <iostream>

#include "oli/runtime.hpp"

namespace oli::runtime {
namespace {

comm::Location port_location(const PortConfig& port, const std::map<std::string, std::string>& overrides) {
    auto it = overrides.find(port.name);
    return comm::Location::parse(it != overrides.end() ? it->second : port.location);
}

} // namespace

Interpreter::Interpreter(const AstProgram& program, RuntimeOptions options)
    : program_(program), options_(std::move(options)) {
    try {
        types_ = resolve(program_.type_decls);
    } catch (const UnresolvedLink& e) {
        throw BuildError(e.what());
    }
    tree_ = build_process_tree(program_, types_);
    starters_ = session_starters(program_);

    std::ostream& log = options_.log ? *options_.log : std::cerr;
    runtime_.types = &types_;
    runtime_.solicit_timeout = options_.solicit_timeout;
    runtime_.trace = options_.trace;
    runtime_.console = options_.console ? options_.console : &default_console_;
    runtime_.log = &log;

    std::map<std::string, const InterfaceDecl*> interfaces;
    for (const auto& i : program_.interfaces) interfaces[i.name] = &i;

    auto warn_protocol = [&](const PortConfig& port) {
        if (!port.protocol.empty() && port.protocol != "mop")
            log << "warning: " << port.loc.str() << ": port " << port.name << ": protocol '" << port.protocol
                << "' is served as mop\n";
    };

    for (const auto& port : program_.output_ports) {
        warn_protocol(port);
        runtime_.output_ports[port.name] = port_location(port, options_.location_overrides);
    }
    for (const auto& port : program_.input_ports) {
        warn_protocol(port);
        input_locations_[port.name] = port_location(port, options_.location_overrides);
        for (const auto& iname : port.interfaces) {
            auto it = interfaces.find(iname);
            if (it == interfaces.end()) throw BuildError("port " + port.name + ": unknown interface '" + iname + "'");
            try {
                for (const auto& op : it->second->one_way_ops)
                    runtime_.input_ops[op.name] = {OpKind::OneWay, types_.lookup(op.request_type), nullptr};
                for (const auto& op : it->second->request_response_ops)
                    runtime_.input_ops[op.name] = {OpKind::RequestResponse, types_.lookup(op.request_type),
                                                   types_.lookup(op.response_type)};
            } catch (const UnresolvedLink& e) {
                throw BuildError(e.what());
            }
        }
    }
}

Interpreter::~Interpreter() { shutdown(); }

std::uint64_t Interpreter::new_session_id() {
    std::uint64_t id = next_session_id_.fetch_add(1);
    if (options_.on_session_start) options_.on_session_start(id);
    return id;
}

void Interpreter::log_fault(std::uint64_t session, const Completion& c) {
    if (c.ok()) return;
    *runtime_.log << "session " << session << ": fault " << *c.fault;
    if (!c.detail.empty()) *runtime_.log << ": " << c.detail;
    *runtime_.log << "\n";
}

Completion Interpreter::run_client() {
    Completion result;
    StackThread t([&] {
        Inbox inbox;
        inbox.close();
        SessionState session(new_session_id());
        ExecutionContext ctx{&runtime_, &session, &inbox, 0};
        result = exec(*tree_.init, ctx);
        if (result.ok()) result = exec(*tree_.main, ctx);
    });
    t.join();
    return result;
}

void Interpreter::reject(const Inbound& in, const std::string& fault, const std::string& why) {
    auto sig = runtime_.input_ops.find(in.msg.operation);
    bool one_way = sig != runtime_.input_ops.end() && sig->second.kind == OpKind::OneWay;
    *runtime_.log << "rejected " << in.msg.operation << ": " << fault << ": " << why << "\n";
    if (one_way || !in.reply_to) return;
    try {
        comm::Message m;
        m.resource_path = in.msg.resource_path;
        m.operation = in.msg.operation;
        m.payload = ValueTree(why);
        m.fault = fault;
        in.reply_to->send(m);
    } catch (const Error&) {
        // The sender may already be gone.
    }
}

bool Interpreter::validate(const Inbound& in) {
    auto sig = runtime_.input_ops.find(in.msg.operation);
    if (sig == runtime_.input_ops.end()) {
        reject(in, kUnknownOperation, "operation '" + in.msg.operation + "' is not offered");
        return false;
    }
    bool ok = false;
    std::string why = "payload of '" + in.msg.operation + "' does not match its declared type";
    try {
        ok = conforms(in.msg.payload, *sig->second.request, types_);
    } catch (const CyclicTypeError& e) {
        why = e.what();
    }
    if (!ok) reject(in, kTypeMismatch, why);
    return ok;
}

void Interpreter::run_session(Inbox& inbox) {
    Inbound first = inbox.take_any();
    if (!starters_.count(first.msg.operation)) {
        reject(first, kUnknownOperation, "operation '" + first.msg.operation + "' cannot start a session");
        return;
    }
    inbox.push_front(std::move(first));

    std::optional<std::uint64_t> ticket;
    if (program_.execution_mode == ExecutionMode::Sequential) {
        std::unique_lock lock(seq_mutex_);
        ticket = seq_next_ticket_++;
        seq_cv_.wait(lock, [&] { return seq_serving_ == *ticket; });
    }

    SessionState session(new_session_id(), global_state_);
    ExecutionContext ctx{&runtime_, &session, &inbox, 0};
    Completion c = exec(*tree_.main, ctx);
    log_fault(session.id(), c);

    if (ticket) {
        {
            std::lock_guard lock(seq_mutex_);
            ++seq_serving_;
        }
        seq_cv_.notify_all();
    }
}

void Interpreter::handle_connection(const std::shared_ptr<comm::Channel>& channel) {
    auto pull = [this, channel]() -> Inbound {
        for (;;) {
            Inbound in{channel->receive(), channel};
            if (validate(in)) return in;
        }
    };

    if (program_.execution_mode == ExecutionMode::Single) {
        try {
            for (;;) global_inbox_.push(pull());
        } catch (const Error&) {
        }
        return;
    }

    Inbox inbox(pull);
    try {
        for (;;) run_session(inbox);
    } catch (const ChannelClosed&) {
        // Connection ended between sessions.
    }
}

Completion Interpreter::start() {
    Completion init_result;
    {
        StackThread t([&] {
            Inbox inbox;
            inbox.close();
            SessionState session(0);
            ExecutionContext ctx{&runtime_, &session, &inbox, 0};
            init_result = exec(*tree_.init, ctx);
            global_state_ = session.snapshot();
        });
    }
    if (!init_result.ok()) return init_result;

    for (const auto& [name, where] : input_locations_) {
        auto listener = std::make_unique<comm::Listener>(
            where, [this](std::shared_ptr<comm::Channel> ch) { handle_connection(ch); }, runtime_.trace);
        bound_ports_[name] = listener->port();
        if (options_.on_bound) options_.on_bound(name, listener->location());
        listeners_.push_back(std::move(listener));
    }

    if (program_.execution_mode == ExecutionMode::Single) {
        single_main_ = StackThread([this] {
            SessionState session(new_session_id(), global_state_);
            ExecutionContext ctx{&runtime_, &session, &global_inbox_, 0};
            Completion c = exec(*tree_.main, ctx);
            std::lock_guard lock(state_mutex_);
            single_result_ = c;
            finished_ = true;
            state_cv_.notify_all();
        });
    }
    return Completion::normal();
}

Completion Interpreter::wait() {
    std::unique_lock lock(state_mutex_);
    state_cv_.wait(lock, [&] { return finished_ || shut_down_; });
    return single_result_.value_or(Completion::normal());
}

void Interpreter::shutdown() {
    {
        std::lock_guard lock(state_mutex_);
        if (shut_down_) return;
        shut_down_ = true;
    }
    state_cv_.notify_all();
    for (auto& l : listeners_) l->shutdown();
    global_inbox_.close();
    single_main_.join();
    listeners_.clear();
}

Completion Interpreter::serve() {
    Completion c = start();
    if (!c.ok()) return c;
    return wait();
}

std::uint16_t Interpreter::bound_port(const std::string& port) const {
    auto it = bound_ports_.find(port);
    return it == bound_ports_.end() ? 0 : it->second;
}

} // namespace oli::runtime
