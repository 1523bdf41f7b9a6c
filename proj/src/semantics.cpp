#include "oli/semantics.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace oli {
namespace {

enum class OpKind { OneWay, RequestResponse };

class Verifier {
public:
    explicit Verifier(const AstProgram& prog) : prog_(prog) {}

    std::vector<Diagnostic> run() {
        collect_types();
        for (const auto& decl : prog_.type_decls) type_def(decl.def);
        collect_interfaces();
        collect_ports();
        if (prog_.init_block) process(*prog_.init_block);
        for (const auto& [name, body] : prog_.defines) process(body);
        if (prog_.main_block) process(*prog_.main_block);
        return std::move(diags_);
    }

private:
    void error(std::string msg, const SourceLoc& loc) {
        diags_.push_back({Severity::Error, std::move(msg), loc});
    }
    void warning(std::string msg, const SourceLoc& loc) {
        diags_.push_back({Severity::Warning, std::move(msg), loc});
    }

    // -- deployment ---------------------------------------------------------

    void collect_types() {
        for (const auto& decl : prog_.type_decls) {
            if (!types_.insert(decl.name).second)
                error("type '" + decl.name + "' is already defined", decl.loc);
        }
    }

    bool type_name_known(const std::string& name) const {
        return native_from_name(name) || name == "undefined" || types_.count(name);
    }

    void type_def(const TypeDef& def) {
        std::visit(Overloaded{
                       [&](const typedefs::Link& l) {
                           if (!types_.count(l.name))
                               error("link to undeclared type '" + l.name + "'", def.loc);
                       },
                       [&](const typedefs::Choice& c) {
                           type_def(*c.left);
                           type_def(*c.right);
                       },
                       [&](const typedefs::Inline& inl) {
                           std::set<std::string> names;
                           for (const auto& st : inl.subtypes) {
                               if (!names.insert(st.name).second)
                                   error("subtype '" + st.name + "' is declared twice", st.loc);
                               const auto& c = st.cardinality;
                               if (c.max && c.min > *c.max)
                                   error("cardinality of '" + st.name + "' has minimum " + std::to_string(c.min) +
                                             " above maximum " + std::to_string(*c.max),
                                         st.loc);
                               type_def(*st.def);
                           }
                       },
                       [](const auto&) {},
                   },
                   def.node);
    }

    void collect_interfaces() {
        for (const auto& iface : prog_.interfaces) {
            if (interfaces_.count(iface.name)) {
                error("interface '" + iface.name + "' is already defined", iface.loc);
                continue;
            }
            auto& ops = interfaces_[iface.name];
            auto add = [&](const std::string& op, OpKind kind, const SourceLoc& loc) {
                if (!ops.emplace(op, kind).second)
                    error("operation '" + op + "' is declared twice in interface '" + iface.name + "'", loc);
            };
            for (const auto& op : iface.request_response_ops) {
                add(op.name, OpKind::RequestResponse, op.loc);
                if (!type_name_known(op.request_type))
                    error("operation '" + op.name + "' uses unknown type '" + op.request_type + "'", op.loc);
                if (!type_name_known(op.response_type))
                    error("operation '" + op.name + "' uses unknown type '" + op.response_type + "'", op.loc);
            }
            for (const auto& op : iface.one_way_ops) {
                add(op.name, OpKind::OneWay, op.loc);
                if (!type_name_known(op.request_type))
                    error("operation '" + op.name + "' uses unknown type '" + op.request_type + "'", op.loc);
            }
        }
    }

    void collect_ports() {
        std::set<std::string> names;
        auto bind = [&](const PortConfig& port, std::map<std::string, OpKind>& ops) {
            if (!names.insert(port.name).second) error("port '" + port.name + "' is already defined", port.loc);
            for (const auto& iname : port.interfaces) {
                auto it = interfaces_.find(iname);
                if (it == interfaces_.end()) {
                    error("port '" + port.name + "' uses undeclared interface '" + iname + "'", port.loc);
                    continue;
                }
                for (const auto& [op, kind] : it->second) ops.insert_or_assign(op, kind);
            }
        };
        for (const auto& port : prog_.input_ports) {
            if (port.location.empty()) error("input port '" + port.name + "' has no Location", port.loc);
            bind(port, input_ops_);
        }
        for (const auto& port : prog_.output_ports) bind(port, output_ops_[port.name]);
    }

    // -- behavior -----------------------------------------------------------

    void receive(const std::string& op, OpKind kind, const SourceLoc& loc) {
        auto it = input_ops_.find(op);
        if (it == input_ops_.end()) {
            error("operation '" + op + "' is not offered by any input port", loc);
        } else if (it->second != kind) {
            error("operation '" + op + "' is declared as " +
                      (it->second == OpKind::OneWay ? "OneWay" : "RequestResponse") +
                      " but received as " + (kind == OpKind::OneWay ? "OneWay" : "RequestResponse"),
                  loc);
        }
    }

    void send(const std::string& op, const std::string& port, OpKind kind, const SourceLoc& loc) {
        auto pit = output_ops_.find(port);
        if (pit == output_ops_.end()) {
            error("'" + port + "' is not a declared output port", loc);
            return;
        }
        auto it = pit->second.find(op);
        if (it == pit->second.end()) {
            error("operation '" + op + "' is not offered by output port '" + port + "'", loc);
        } else if (it->second != kind) {
            error("operation '" + op + "' is declared as " +
                      (it->second == OpKind::OneWay ? "OneWay" : "RequestResponse") + " but invoked as " +
                      (kind == OpKind::OneWay ? "a notification" : "a solicit-response"),
                  loc);
        }
    }

    void guard(const procs::InputGuard& g, const SourceLoc& loc) {
        std::visit(Overloaded{
                       [&](const procs::OneWayRecv& r) { receive(r.op, OpKind::OneWay, loc); },
                       [&](const procs::RequestResponseRecv& r) {
                           receive(r.op, OpKind::RequestResponse, loc);
                           process(*r.body);
                       },
                   },
                   g);
    }

    void process(const Process& p) {
        std::visit(Overloaded{
                       [&](const procs::Sequence& s) {
                           for (const auto& item : s.items) process(item);
                       },
                       [&](const procs::Parallel& par) {
                           process(*par.left);
                           process(*par.right);
                       },
                       [&](const procs::InputChoice& c) {
                           for (const auto& br : c.branches) {
                               guard(br.guard, br.loc);
                               process(*br.body);
                           }
                       },
                       [&](const procs::OneWayRecv& r) { guard(r, p.loc); },
                       [&](const procs::RequestResponseRecv& r) { guard(r, p.loc); },
                       [&](const procs::Notification& n) { send(n.op, n.port, OpKind::OneWay, p.loc); },
                       [&](const procs::SolicitResponse& s) {
                           send(s.op, s.port, OpKind::RequestResponse, p.loc);
                       },
                       [&](const procs::If& i) {
                           process(*i.then);
                           if (i.otherwise) process(**i.otherwise);
                       },
                       [&](const procs::Match& m) {
                           for (const auto& arm : m.arms) {
                               if (!type_name_known(arm.type_name))
                                   error("match arm names unknown type '" + arm.type_name + "'", arm.loc);
                               process(*arm.body);
                           }
                       },
                       [&](const procs::CallDefine& c) {
                           if (!prog_.defines.count(c.name))
                               error("call to undefined procedure '" + c.name + "'", p.loc);
                       },
                       [](const auto&) {},
                   },
                   p.node);
    }

    const AstProgram& prog_;
    std::vector<Diagnostic> diags_;
    std::set<std::string> types_;
    std::map<std::string, std::map<std::string, OpKind>> interfaces_;
    std::map<std::string, OpKind> input_ops_;
    std::map<std::string, std::map<std::string, OpKind>> output_ops_;
};

} // namespace

std::string format_diagnostic(const Diagnostic& d) {
    return std::string(d.severity == Severity::Error ? "error" : "warning") + ": " + d.loc.str() + ": " + d.message;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::vector<Diagnostic> verify_program(const AstProgram& program) { return Verifier(program).run(); }

} // namespace oli
