#include "oli/printer.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace oli {
namespace {

std::string cardinality_suffix(const Cardinality& c) {
    if (c == Cardinality::exactly_one()) return "";
    if (c == Cardinality::optional()) return "?";
    if (c == Cardinality::any_number()) return "*";
    return "[" + std::to_string(c.min) + "," + (c.max ? std::to_string(*c.max) : "*") + "]";
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

class ProcessPrinter {
public:
    std::string str() const { return out_.str(); }

    void block(const Process& p, int indent) {
        out_ << "{\n";
        line_start(indent + 1);
        process(p, indent + 1);
        out_ << "\n";
        line_start(indent);
        out_ << "}";
    }

    void process(const Process& p, int indent) {
        std::visit(Overloaded{
                       [&](const procs::Sequence& s) { sequence(s, indent); },
                       [&](const procs::Parallel& par) {
                           process(*par.left, indent);
                           out_ << " | ";
                           if (std::holds_alternative<procs::Parallel>(par.right->node))
                               block(*par.right, indent);
                           else
                               process(*par.right, indent);
                       },
                       [&](const procs::InputChoice& c) {
                           for (std::size_t i = 0; i < c.branches.size(); ++i) {
                               if (i) {
                                   out_ << "\n";
                                   line_start(indent);
                               }
                               out_ << "[ ";
                               std::visit([&](const auto& g) { guard(g, indent); }, c.branches[i].guard);
                               out_ << " ] ";
                               block(*c.branches[i].body, indent);
                           }
                       },
                       [&](const procs::OneWayRecv& r) { guard(r, indent); },
                       [&](const procs::RequestResponseRecv& r) { guard(r, indent); },
                       [&](const procs::Notification& n) {
                           out_ << n.op << "@" << n.port << "(" << (n.arg ? print_expr(*n.arg) : "") << ")";
                       },
                       [&](const procs::SolicitResponse& s) {
                           out_ << s.op << "@" << s.port << "(" << (s.arg ? print_expr(*s.arg) : "") << ")("
                                << path_string(s.result) << ")";
                       },
                       [&](const procs::Assign& a) { out_ << path_string(a.path) << " = " << print_expr(a.value); },
                       [&](const procs::If& i) {
                           out_ << "if (" << print_expr(i.cond) << ") ";
                           block(*i.then, indent);
                           if (i.otherwise) {
                               out_ << " else ";
                               block(**i.otherwise, indent);
                           }
                       },
                       [&](const procs::Match& m) {
                           out_ << "match(" << path_string(m.subject) << ") {";
                           for (const auto& arm : m.arms) {
                               out_ << "\n";
                               line_start(indent + 1);
                               out_ << arm.type_name << " ";
                               block(*arm.body, indent + 1);
                           }
                           out_ << "\n";
                           line_start(indent);
                           out_ << "}";
                       },
                       [&](const procs::CallDefine& c) { out_ << c.name; },
                       [&](const procs::Nil&) { out_ << "nullProcess"; },
                   },
                   p.node);
    }

private:
    void sequence(const procs::Sequence& s, int indent) {
        if (s.items.empty()) {
            out_ << "nullProcess";
            return;
        }
        if (s.items.size() == 1) {
            block(s.items.front(), indent);
            return;
        }
        for (std::size_t i = 0; i < s.items.size(); ++i) {
            if (i) {
                out_ << ";\n";
                line_start(indent);
            }
            const auto& item = s.items[i];
            if (std::holds_alternative<procs::Sequence>(item.node) ||
                std::holds_alternative<procs::Parallel>(item.node))
                block(item, indent);
            else
                process(item, indent);
        }
    }

    void guard(const procs::OneWayRecv& r, int) { out_ << r.op << "(" << path_string(r.var) << ")"; }

    void guard(const procs::RequestResponseRecv& r, int indent) {
        out_ << r.op << "(" << path_string(r.in) << ")(" << path_string(r.out) << ") ";
        block(*r.body, indent);
    }

    void line_start(int indent) {
        for (int i = 0; i < indent; ++i) out_ << "  ";
    }

    std::ostringstream out_;
};

std::string escape_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out + "\"";
}

} // namespace

std::string print_literal(const BasicValue& value) {
    return std::visit(
        Overloaded{
            [](std::monostate) -> std::string { throw Error("the empty value has no literal form"); },
            [](std::int32_t i) { return std::to_string(i); },
            [](std::int64_t l) { return std::to_string(l) + "L"; },
            [](double d) -> std::string {
                if (!std::isfinite(d)) throw Error("non-finite double has no literal form");
                char buf[64];
                auto res = std::to_chars(buf, buf + sizeof buf, d);
                std::string s(buf, res.ptr);
                if (s.find_first_of(".e") == std::string::npos) s += ".0";
                return s;
            },
            [](const std::string& s) { return escape_string(s); },
            [](bool b) { return std::string(b ? "true" : "false"); },
            [](const Bytes&) -> std::string { throw Error("raw values have no literal form"); },
        },
        value);
}

std::string print_expr(const Expr& expr) {
    return std::visit(
        Overloaded{
            [](const exprs::Literal& l) { return print_literal(l.value); },
            [](const exprs::PathRead& p) { return path_string(p.path); },
            [](const exprs::IsDefined& d) { return "is_defined(" + path_string(d.path) + ")"; },
            [](const exprs::Unary& u) {
                return std::string(u.op == UnaryOp::Not ? "!" : "-") + print_expr(*u.operand);
            },
            [](const exprs::Binary& b) {
                return "(" + print_expr(*b.lhs) + " " + std::string(to_string(b.op)) + " " +
                       print_expr(*b.rhs) + ")";
            },
        },
        expr.node);
}

std::string print_type(const TypeDef& def) {
    return std::visit(
        Overloaded{
            [](const typedefs::Native& n) { return std::string(to_string(n.native)); },
            [](const typedefs::Inline& inl) {
                std::string out = std::string(to_string(inl.native)) + " {";
                for (const auto& st : inl.subtypes)
                    out += " ." + st.name + cardinality_suffix(st.cardinality) + ": " + print_type(*st.def);
                return out + " }";
            },
            [](const typedefs::UntypedSubnodes& u) { return std::string(to_string(u.native)) + " { ? }"; },
            [](const typedefs::Link& l) { return l.name; },
            [](const typedefs::Undefined&) { return std::string("undefined"); },
            [](const typedefs::Choice& c) { return print_type(*c.left) + " | " + print_type(*c.right); },
        },
        def.node);
}

std::string print_process(const Process& process) {
    ProcessPrinter pp;
    pp.process(process, 0);
    return pp.str();
}

std::string print_program(const AstProgram& program) {
    std::ostringstream out;
    for (const auto& t : program.type_decls) out << "type " << t.name << ": " << print_type(t.def) << "\n";
    if (!program.type_decls.empty()) out << "\n";

    for (const auto& iface : program.interfaces) {
        out << "interface " << iface.name << " {\n";
        if (!iface.request_response_ops.empty()) {
            std::vector<std::string> ops;
            for (const auto& op : iface.request_response_ops)
                ops.push_back(op.name + "(" + op.request_type + ")(" + op.response_type + ")");
            out << "  RequestResponse:\n    " << join(ops, ",\n    ") << "\n";
        }
        if (!iface.one_way_ops.empty()) {
            std::vector<std::string> ops;
            for (const auto& op : iface.one_way_ops) ops.push_back(op.name + "(" + op.request_type + ")");
            out << "  OneWay:\n    " << join(ops, ",\n    ") << "\n";
        }
        out << "}\n\n";
    }

    auto port = [&](const PortConfig& p) {
        out << (p.direction == PortDirection::Input ? "inputPort " : "outputPort ") << p.name << " {\n";
        if (!p.location.empty()) out << "  Location: " << escape_string(p.location) << "\n";
        if (!p.protocol.empty()) out << "  Protocol: " << escape_string(p.protocol) << "\n";
        if (!p.interfaces.empty()) out << "  Interfaces: " << join(p.interfaces, ", ") << "\n";
        out << "}\n\n";
    };
    for (const auto& p : program.input_ports) port(p);
    for (const auto& p : program.output_ports) port(p);

    out << "execution { " << to_string(program.execution_mode) << " }\n\n";

    auto behavior = [&](const std::string& head, const Process& body) {
        ProcessPrinter pp;
        pp.block(body, 0);
        out << head << " " << pp.str() << "\n\n";
    };
    if (program.init_block) behavior("init", *program.init_block);
    for (const auto& [name, body] : program.defines) behavior("define " + name, body);
    if (program.main_block) behavior("main", *program.main_block);
    return out.str();
}

} // namespace oli
