#include "generators.hpp"

#include <algorithm>
#include <limits>

namespace oli::testgen {
namespace {

template <class T>
const T& pick(Rng& rng, const std::vector<T>& items) {
    return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng)];
}

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

const std::vector<std::string> kChildNames = {"a", "b", "c", "name", "id"};
const std::vector<std::string> kIdents = {"x", "y", "req", "res", "person", "car_id", "n2", "Data"};
const std::vector<std::string> kTypeNames = {"customer", "car_return", "T1", "Old-Software-Corp", "pt"};
const std::vector<NativeType> kNatives = {NativeType::Int,  NativeType::Long, NativeType::Double, NativeType::String,
                                          NativeType::Raw,  NativeType::Void, NativeType::Any};

std::string random_text(Rng& rng) {
    static const std::vector<std::string> pieces = {"a", "Z", " ", "0", "\"", "\\", "\n", "\t", "é", "字", "🚗", "{", "$"};
    std::string s;
    int n = uniform(rng, 0, 6);
    for (int i = 0; i < n; ++i) s += pick(rng, pieces);
    return s;
}

Bytes random_bytes(Rng& rng) {
    Bytes b(static_cast<std::size_t>(uniform(rng, 0, 9)));
    for (auto& x : b) x = static_cast<std::uint8_t>(uniform(rng, 0, 255));
    return b;
}

double random_double(Rng& rng) {
    switch (uniform(rng, 0, 3)) {
    case 0: return 0.1 * uniform(rng, -1000, 1000);
    case 1: return std::numeric_limits<double>::max() * (coin(rng) ? 1 : -1);
    case 2: return std::numeric_limits<double>::denorm_min();
    default: return std::uniform_real_distribution<double>(-1e12, 1e12)(rng);
    }
}

std::int32_t random_int(Rng& rng) {
    switch (uniform(rng, 0, 3)) {
    case 0: return std::numeric_limits<std::int32_t>::min();
    case 1: return std::numeric_limits<std::int32_t>::max();
    default: return uniform(rng, -1000, 1000);
    }
}

std::int64_t random_long(Rng& rng) {
    switch (uniform(rng, 0, 3)) {
    case 0: return std::numeric_limits<std::int64_t>::min();
    case 1: return std::numeric_limits<std::int64_t>::max();
    default: return std::uniform_int_distribution<std::int64_t>(-5'000'000'000, 5'000'000'000)(rng);
    }
}

Cardinality random_cardinality(Rng& rng) {
    switch (uniform(rng, 0, 4)) {
    case 0: return Cardinality::exactly_one();
    case 1: return Cardinality::optional();
    case 2: return Cardinality::any_number();
    case 3: return {2, 3};
    default: return {1, std::nullopt};
    }
}

} // namespace

BasicValue random_root(Rng& rng, NativeType native) {
    switch (native) {
    case NativeType::Int: return random_int(rng);
    case NativeType::Long: return random_long(rng);
    case NativeType::Double: return random_double(rng);
    case NativeType::String: return random_text(rng);
    case NativeType::Raw: return random_bytes(rng);
    case NativeType::Void: return std::monostate{};
    case NativeType::Any: {
        NativeType n = pick(rng, std::vector{NativeType::Int, NativeType::Long, NativeType::Double, NativeType::String,
                                             NativeType::Raw});
        if (coin(rng, 0.15)) return coin(rng);
        return random_root(rng, n);
    }
    }
    return std::monostate{};
}

BasicValue random_basic(Rng& rng) {
    if (coin(rng, 0.2)) return std::monostate{};
    if (coin(rng, 0.1)) return coin(rng);
    return random_root(rng, NativeType::Any);
}

ValueTree random_tree(Rng& rng, int depth) {
    ValueTree v(random_basic(rng));
    if (depth <= 0) return v;
    int kids = uniform(rng, 0, 3);
    for (int i = 0; i < kids; ++i) v.add_child(pick(rng, kChildNames), random_tree(rng, depth - 1));
    return v;
}

comm::Message random_message(Rng& rng) {
    comm::Message m;
    m.operation = pick(rng, kIdents) + (coin(rng, 0.2) ? random_text(rng) : "");
    m.resource_path = coin(rng, 0.8) ? "/" : "/" + random_text(rng);
    if (coin(rng, 0.2)) m.fault = pick(rng, std::vector<std::string>{"TypeMismatch", "Timeout", random_text(rng)});
    m.payload = random_tree(rng, uniform(rng, 0, 4));
    return m;
}

TypePtr random_type(Rng& rng, int depth, double choice_bias) {
    if (depth <= 1 || coin(rng, 0.25)) {
        NativeType n = pick(rng, kNatives);
        return coin(rng, 0.8) ? make_basic(n) : make_open(n);
    }
    if (coin(rng, choice_bias))
        return make_choice(random_type(rng, depth - 1, choice_bias), random_type(rng, depth - 1, choice_bias));
    std::map<std::string, rtypes::Field> fields;
    int n = uniform(rng, 0, 3);
    for (int i = 0; i < n; ++i)
        fields[pick(rng, kChildNames)] = {random_cardinality(rng), random_type(rng, depth - 1, choice_bias)};
    NativeType root = coin(rng, 0.6) ? NativeType::Void : pick(rng, kNatives);
    return make_tree(root, std::move(fields));
}

ValueTree sample_value(Rng& rng, const ResolvedType& type, int depth) {
    return std::visit(
        Overloaded{
            [&](const rtypes::Basic& b) { return ValueTree(random_root(rng, b.native)); },
            [&](const rtypes::OpenTree& o) {
                ValueTree v(random_root(rng, o.native));
                if (depth > 0 && coin(rng)) v.add_child(pick(rng, kChildNames), random_tree(rng, 1));
                return v;
            },
            [&](const rtypes::Choice& c) { return sample_value(rng, coin(rng) ? *c.left : *c.right, depth); },
            [&](const rtypes::Ref&) { return ValueTree{}; },
            [&](const rtypes::Tree& t) {
                ValueTree v(random_root(rng, t.native));
                for (const auto& [name, field] : t.fields) {
                    std::uint32_t hi = field.cardinality.max.value_or(field.cardinality.min + 2);
                    hi = std::min(hi, field.cardinality.min + 2);
                    int count = uniform(rng, static_cast<int>(field.cardinality.min), static_cast<int>(hi));
                    for (int i = 0; i < count; ++i) v.add_child(name, sample_value(rng, *field.type, depth - 1));
                }
                return v;
            },
        },
        type.node);
}

ValueTree mutate(Rng& rng, ValueTree value) {
    switch (uniform(rng, 0, 4)) {
    case 0: value.set_root(random_basic(rng)); break;
    case 1: value.add_child(pick(rng, kChildNames), random_tree(rng, 1)); break;
    case 2:
        if (!value.children().empty()) {
            auto it = value.children().begin();
            std::advance(it, uniform(rng, 0, static_cast<int>(value.children().size()) - 1));
            value.remove_child(it->first);
        }
        break;
    case 3:
        if (!value.children().empty()) {
            const auto& [name, list] = *value.children().begin();
            ValueTree copy = list.front();
            value.add_child(name, std::move(copy));
        }
        break;
    default:
        if (!value.children().empty()) {
            std::string name = value.children().begin()->first;
            ValueTree inner = mutate(rng, value.children().begin()->second.front());
            value.set_child(name, std::move(inner));
        }
    }
    return value;
}

ValueTree value_for(Rng& rng, const ResolvedType& type) {
    switch (uniform(rng, 0, 2)) {
    case 0: return sample_value(rng, type);
    case 1: return mutate(rng, sample_value(rng, type));
    default: return random_tree(rng, uniform(rng, 0, 3));
    }
}

namespace {

bool root_ok(NativeType n, const BasicValue& r) {
    switch (n) {
    case NativeType::Int: return r.index() == 1;
    case NativeType::Long: return r.index() == 2;
    case NativeType::Double: return r.index() == 3;
    case NativeType::String: return r.index() == 4;
    case NativeType::Raw: return r.index() == 6;
    case NativeType::Void: return r.index() == 0;
    case NativeType::Any: return r.index() != 0;
    }
    return false;
}

} // namespace

bool reference_conforms(const ValueTree& value, const ResolvedType& type) {
    if (auto* b = std::get_if<rtypes::Basic>(&type.node))
        return value.children().empty() && root_ok(b->native, value.root());
    if (auto* o = std::get_if<rtypes::OpenTree>(&type.node)) return root_ok(o->native, value.root());
    if (auto* c = std::get_if<rtypes::Choice>(&type.node))
        return reference_conforms(value, *c->left) || reference_conforms(value, *c->right);
    if (auto* t = std::get_if<rtypes::Tree>(&type.node)) {
        if (!root_ok(t->native, value.root())) return false;
        for (const auto& [name, list] : value.children())
            if (!t->fields.count(name)) return false;
        for (const auto& [name, field] : t->fields) {
            const auto* list = value.find_children(name);
            std::size_t n = list ? list->size() : 0;
            if (n < field.cardinality.min) return false;
            if (field.cardinality.max && n > *field.cardinality.max) return false;
            for (std::size_t i = 0; i < n; ++i)
                if (!reference_conforms((*list)[i], *field.type)) return false;
        }
        return true;
    }
    throw std::logic_error("reference_conforms does not follow links");
}

// ---------------------------------------------------------------------------
// Syntax trees
// ---------------------------------------------------------------------------

namespace {

Path random_path(Rng& rng) {
    Path p{pick(rng, kIdents)};
    int extra = uniform(rng, 0, 2);
    for (int i = 0; i < extra; ++i) p.push_back(pick(rng, kChildNames));
    return p;
}

TypeDef random_typedef_no_choice(Rng& rng, int depth) {
    int k = depth <= 0 ? uniform(rng, 0, 3) : uniform(rng, 0, 4);
    switch (k) {
    case 0: return make_type(typedefs::Native{pick(rng, kNatives)});
    case 1: return make_type(typedefs::UntypedSubnodes{pick(rng, kNatives)});
    case 2: return make_type(typedefs::Link{pick(rng, kTypeNames)});
    case 3: return make_type(typedefs::Undefined{});
    default: {
        typedefs::Inline inl{pick(rng, kNatives), {}};
        int n = uniform(rng, 0, 3);
        for (int i = 0; i < n; ++i)
            inl.subtypes.push_back(
                SubTypeAst{pick(rng, kChildNames), random_cardinality(rng), random_typedef(rng, depth - 1), {}});
        return make_type(std::move(inl));
    }
    }
}

BasicValue random_literal(Rng& rng) {
    switch (uniform(rng, 0, 4)) {
    case 0: return uniform(rng, -50000, 50000);
    case 1: return static_cast<std::int64_t>(uniform(rng, -50000, 50000)) * 100000;
    case 2: return uniform(rng, -80000, 80000) / 8.0;
    case 3: return coin(rng);
    default: return random_text(rng);
    }
}

} // namespace

TypeDef random_typedef(Rng& rng, int depth) {
    TypeDef left = random_typedef_no_choice(rng, depth);
    if (depth > 0 && coin(rng, 0.3)) return make_type(typedefs::Choice{std::move(left), random_typedef(rng, depth - 1)});
    return left;
}

Expr random_expr(Rng& rng, int depth) {
    int k = depth <= 0 ? uniform(rng, 0, 2) : uniform(rng, 0, 4);
    switch (k) {
    case 0: return make_expr(exprs::Literal{random_literal(rng)});
    case 1: return make_expr(exprs::PathRead{random_path(rng)});
    case 2: return make_expr(exprs::IsDefined{random_path(rng)});
    case 3: {
        // A negated literal would fold into a negative literal on re-parse.
        Expr operand = coin(rng) ? make_expr(exprs::PathRead{random_path(rng)}) : random_expr(rng, depth - 1);
        if (std::holds_alternative<exprs::Literal>(operand.node)) operand = make_expr(exprs::PathRead{random_path(rng)});
        return make_expr(exprs::Unary{coin(rng) ? UnaryOp::Not : UnaryOp::Negate, std::move(operand)});
    }
    default: {
        auto op = pick(rng, std::vector{BinaryOp::Add, BinaryOp::Sub, BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt,
                                        BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge});
        return make_expr(exprs::Binary{op, random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
    }
    }
}

namespace {

procs::InputGuard random_guard(Rng& rng, int depth) {
    if (coin(rng)) return procs::OneWayRecv{pick(rng, kIdents), random_path(rng)};
    return procs::RequestResponseRecv{pick(rng, kIdents), random_path(rng), random_path(rng),
                                      random_process(rng, depth - 1)};
}

Process random_simple(Rng& rng) {
    switch (uniform(rng, 0, 5)) {
    case 0: return make_process(procs::Assign{random_path(rng), random_expr(rng, 2)});
    case 1:
        return make_process(procs::Notification{pick(rng, kIdents), "Port",
                                                coin(rng) ? std::optional(random_expr(rng, 1)) : std::nullopt});
    case 2:
        return make_process(procs::SolicitResponse{pick(rng, kIdents), "Console",
                                                   coin(rng) ? std::optional(random_expr(rng, 1)) : std::nullopt,
                                                   random_path(rng)});
    case 3: return make_process(procs::CallDefine{pick(rng, kIdents)});
    case 4: return make_process(procs::OneWayRecv{pick(rng, kIdents), random_path(rng)});
    default: return make_process(procs::Nil{});
    }
}

} // namespace

Process random_process(Rng& rng, int depth) {
    if (depth <= 0) return random_simple(rng);
    switch (uniform(rng, 0, 7)) {
    case 0: {
        procs::Sequence s;
        int n = uniform(rng, 2, 4);
        for (int i = 0; i < n; ++i) s.items.push_back(random_process(rng, depth - 1));
        return make_process(std::move(s));
    }
    case 1: {
        Process right = random_process(rng, depth - 1);
        return make_process(procs::Parallel{random_process(rng, depth - 1), std::move(right)});
    }
    case 2: {
        procs::InputChoice c;
        int n = uniform(rng, 1, 3);
        for (int i = 0; i < n; ++i) c.branches.push_back({random_guard(rng, depth), random_process(rng, depth - 1), {}});
        return make_process(std::move(c));
    }
    case 3:
        return make_process(procs::RequestResponseRecv{pick(rng, kIdents), random_path(rng), random_path(rng),
                                                       random_process(rng, depth - 1)});
    case 4: {
        procs::If i{random_expr(rng, 2), random_process(rng, depth - 1), std::nullopt};
        if (coin(rng)) i.otherwise = Box<Process>(random_process(rng, depth - 1));
        return make_process(std::move(i));
    }
    case 5: {
        procs::Match m{random_path(rng), {}};
        int n = uniform(rng, 1, 3);
        for (int i = 0; i < n; ++i) m.arms.push_back({pick(rng, kTypeNames), random_process(rng, depth - 1), {}});
        return make_process(std::move(m));
    }
    default: return random_simple(rng);
    }
}

AstProgram random_program(Rng& rng) {
    AstProgram p;
    int types = uniform(rng, 0, 3);
    for (int i = 0; i < types; ++i) p.type_decls.push_back({pick(rng, kTypeNames), random_typedef(rng, 3), {}});
    InterfaceDecl iface{"Iface", {}, {}, {}};
    iface.request_response_ops.push_back({"get_car", "customer", "string", {}});
    if (coin(rng)) iface.one_way_ops.push_back({"notify_me", "undefined", {}});
    p.interfaces.push_back(iface);
    if (coin(rng))
        p.input_ports.push_back({"In", "socket://localhost:2001", "mop", {"Iface"}, PortDirection::Input, {}});
    if (coin(rng))
        p.output_ports.push_back({"Out", "socket://localhost:2002", "sodep", {"Iface"}, PortDirection::Output, {}});
    p.execution_mode = pick(rng, std::vector{ExecutionMode::Single, ExecutionMode::Concurrent, ExecutionMode::Sequential});
    if (coin(rng, 0.3)) p.init_block = random_process(rng, 2);
    if (coin(rng, 0.4)) p.defines["helper"] = random_process(rng, 2);
    p.main_block = random_process(rng, 3);
    return p;
}

} // namespace oli::testgen
