#include <cmath>
#include <limits>

#include "oli/runtime.hpp"

namespace oli::runtime {
namespace {

bool is_numeric(const BasicValue& v) {
    return std::holds_alternative<std::int32_t>(v) || std::holds_alternative<std::int64_t>(v) ||
           std::holds_alternative<double>(v);
}

std::int64_t as_int64(const BasicValue& v) {
    if (auto* i = std::get_if<std::int32_t>(&v)) return *i;
    if (auto* l = std::get_if<std::int64_t>(&v)) return *l;
    return 0;
}

double as_double(const BasicValue& v) {
    if (auto* d = std::get_if<double>(&v)) return *d;
    return static_cast<double>(as_int64(v));
}

/// int op int stays int while it fits, otherwise widens to long.
BasicValue narrow(std::int64_t v, bool both_int) {
    if (both_int && v >= std::numeric_limits<std::int32_t>::min() && v <= std::numeric_limits<std::int32_t>::max())
        return static_cast<std::int32_t>(v);
    return v;
}

[[noreturn]] void incompatible(std::string_view op, const BasicValue& a, const BasicValue& b) {
    throw EvalError("cannot apply '" + std::string(op) + "' to " + std::string(kind_name(a)) + " and " +
                    std::string(kind_name(b)));
}

BasicValue arithmetic(BinaryOp op, BasicValue a, BasicValue b) {
    // The empty value is the additive identity.
    if (is_empty(a) && is_empty(b)) return a;
    if (is_empty(a)) a = std::int32_t{0};
    if (is_empty(b)) b = std::int32_t{0};
    if (!is_numeric(a) || !is_numeric(b)) incompatible(to_string(op), a, b);

    if (std::holds_alternative<double>(a) || std::holds_alternative<double>(b)) {
        double x = as_double(a), y = as_double(b);
        return op == BinaryOp::Add ? x + y : x - y;
    }
    bool both_int = std::holds_alternative<std::int32_t>(a) && std::holds_alternative<std::int32_t>(b);
    std::int64_t x = as_int64(a), y = as_int64(b), r = 0;
    bool overflow = op == BinaryOp::Add ? __builtin_add_overflow(x, y, &r) : __builtin_sub_overflow(x, y, &r);
    if (overflow) throw EvalError("long overflow in '" + std::string(to_string(op)) + "'");
    return narrow(r, both_int);
}

bool equal_values(const BasicValue& a, const BasicValue& b) {
    if (is_numeric(a) && is_numeric(b)) {
        if (std::holds_alternative<double>(a) || std::holds_alternative<double>(b))
            return as_double(a) == as_double(b);
        return as_int64(a) == as_int64(b);
    }
    return a == b;
}

int compare_values(BinaryOp op, const BasicValue& a, const BasicValue& b) {
    if (is_numeric(a) && is_numeric(b)) {
        if (std::holds_alternative<double>(a) || std::holds_alternative<double>(b)) {
            double x = as_double(a), y = as_double(b);
            return x < y ? -1 : (x > y ? 1 : 0);
        }
        auto x = as_int64(a), y = as_int64(b);
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    auto* x = std::get_if<std::string>(&a);
    auto* y = std::get_if<std::string>(&b);
    if (x && y) return x->compare(*y) < 0 ? -1 : (x->compare(*y) > 0 ? 1 : 0);
    incompatible(to_string(op), a, b);
}

} // namespace

BasicValue eval_expr(const Expr& expr, const SessionState& session) {
    return std::visit(
        Overloaded{
            [](const exprs::Literal& l) { return l.value; },
            [&](const exprs::PathRead& p) { return session.read_root(p.path); },
            [&](const exprs::IsDefined& d) { return BasicValue{session.is_defined(d.path)}; },
            [&](const exprs::Unary& u) -> BasicValue {
                BasicValue v = eval_expr(*u.operand, session);
                if (u.op == UnaryOp::Not) {
                    if (auto* b = std::get_if<bool>(&v)) return !*b;
                    throw EvalError("'!' needs a bool, got " + std::string(kind_name(v)));
                }
                if (auto* i = std::get_if<std::int32_t>(&v)) return narrow(-static_cast<std::int64_t>(*i), true);
                if (auto* l = std::get_if<std::int64_t>(&v)) {
                    if (*l == std::numeric_limits<std::int64_t>::min()) throw EvalError("long overflow in '-'");
                    return -*l;
                }
                if (auto* d = std::get_if<double>(&v)) return -*d;
                throw EvalError("'-' needs a number, got " + std::string(kind_name(v)));
            },
            [&](const exprs::Binary& b) -> BasicValue {
                BasicValue lhs = eval_expr(*b.lhs, session);
                BasicValue rhs = eval_expr(*b.rhs, session);
                switch (b.op) {
                case BinaryOp::Add:
                    if (std::holds_alternative<std::string>(lhs) || std::holds_alternative<std::string>(rhs))
                        return render(lhs) + render(rhs);
                    return arithmetic(b.op, std::move(lhs), std::move(rhs));
                case BinaryOp::Sub: return arithmetic(b.op, std::move(lhs), std::move(rhs));
                case BinaryOp::Eq: return equal_values(lhs, rhs);
                case BinaryOp::Ne: return !equal_values(lhs, rhs);
                case BinaryOp::Lt: return compare_values(b.op, lhs, rhs) < 0;
                case BinaryOp::Le: return compare_values(b.op, lhs, rhs) <= 0;
                case BinaryOp::Gt: return compare_values(b.op, lhs, rhs) > 0;
                case BinaryOp::Ge: return compare_values(b.op, lhs, rhs) >= 0;
                }
                throw EvalError("unknown operator");
            },
        },
        expr.node);
}

ValueTree eval_argument(const Expr& expr, const SessionState& session) {
    if (auto* p = std::get_if<exprs::PathRead>(&expr.node)) return session.read(p->path);
    return ValueTree(eval_expr(expr, session));
}

} // namespace oli::runtime
