#include "oli/types.hpp"

#include <algorithm>

namespace oli {

TypePtr make_basic(NativeType native) {
    return std::make_shared<const ResolvedType>(ResolvedType{rtypes::Basic{native}});
}
TypePtr make_open(NativeType native) {
    return std::make_shared<const ResolvedType>(ResolvedType{rtypes::OpenTree{native}});
}
TypePtr make_tree(NativeType native, std::map<std::string, rtypes::Field> fields) {
    return std::make_shared<const ResolvedType>(ResolvedType{rtypes::Tree{native, std::move(fields)}});
}
TypePtr make_choice(TypePtr left, TypePtr right) {
    return std::make_shared<const ResolvedType>(ResolvedType{rtypes::Choice{std::move(left), std::move(right)}});
}
TypePtr make_ref(std::string name) {
    return std::make_shared<const ResolvedType>(ResolvedType{rtypes::Ref{std::move(name)}});
}

bool operator==(const ResolvedType& a, const ResolvedType& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        Overloaded{
            [&](const rtypes::Basic& x) { return x.native == std::get<rtypes::Basic>(b.node).native; },
            [&](const rtypes::OpenTree& x) { return x.native == std::get<rtypes::OpenTree>(b.node).native; },
            [&](const rtypes::Ref& x) { return x.name == std::get<rtypes::Ref>(b.node).name; },
            [&](const rtypes::Choice& x) {
                const auto& y = std::get<rtypes::Choice>(b.node);
                return *x.left == *y.left && *x.right == *y.right;
            },
            [&](const rtypes::Tree& x) {
                const auto& y = std::get<rtypes::Tree>(b.node);
                if (x.native != y.native || x.fields.size() != y.fields.size()) return false;
                return std::equal(x.fields.begin(), x.fields.end(), y.fields.begin(), [](auto& f, auto& g) {
                    return f.first == g.first && f.second.cardinality == g.second.cardinality &&
                           *f.second.type == *g.second.type;
                });
            },
        },
        a.node);
}

TypePtr TypeTable::find(const std::string& name) const {
    auto it = types_.find(name);
    return it == types_.end() ? nullptr : it->second;
}

TypePtr TypeTable::lookup(const std::string& name) const {
    if (auto native = native_from_name(name)) return make_basic(*native);
    if (name == "undefined") return make_open(NativeType::Any);
    if (auto t = find(name)) return t;
    throw UnresolvedLink("unknown type '" + name + "'");
}

namespace {

class Resolver {
public:
    explicit Resolver(const std::vector<TypeDecl>& decls) {
        for (const auto& d : decls) defs_.emplace(d.name, &d.def);
    }

    std::map<std::string, TypePtr> run() {
        for (const auto& [name, def] : defs_) resolve_name(name);
        return std::move(done_);
    }

    TypePtr resolve_def(const TypeDef& def) {
        return std::visit(
            Overloaded{
                [](const typedefs::Native& n) { return make_basic(n.native); },
                [](const typedefs::UntypedSubnodes& u) { return make_open(u.native); },
                [](const typedefs::Undefined&) { return make_open(NativeType::Any); },
                [&](const typedefs::Link& l) { return resolve_name(l.name); },
                [&](const typedefs::Choice& c) {
                    auto left = resolve_def(*c.left);
                    return make_choice(std::move(left), resolve_def(*c.right));
                },
                [&](const typedefs::Inline& inl) {
                    std::map<std::string, rtypes::Field> fields;
                    for (const auto& st : inl.subtypes)
                        fields.insert_or_assign(st.name, rtypes::Field{st.cardinality, resolve_def(*st.def)});
                    return make_tree(inl.native, std::move(fields));
                },
            },
            def.node);
    }

private:
    TypePtr resolve_name(const std::string& name) {
        if (auto it = done_.find(name); it != done_.end()) return it->second;
        if (std::find(stack_.begin(), stack_.end(), name) != stack_.end()) return make_ref(name);
        auto it = defs_.find(name);
        if (it == defs_.end()) throw UnresolvedLink("link to undeclared type '" + name + "'");
        stack_.push_back(name);
        TypePtr t = resolve_def(*it->second);
        stack_.pop_back();
        done_.emplace(name, t);
        return t;
    }

    std::map<std::string, const TypeDef*> defs_;
    std::map<std::string, TypePtr> done_;
    std::vector<std::string> stack_;
};

bool productive_now(const ResolvedType& t, const std::set<std::string>& known) {
    return std::visit(Overloaded{
                          [&](const rtypes::Choice& c) {
                              return productive_now(*c.left, known) || productive_now(*c.right, known);
                          },
                          [&](const rtypes::Ref& r) { return known.count(r.name) != 0; },
                          [](const auto&) { return true; },
                      },
                      t.node);
}

class Checker {
public:
    explicit Checker(const TypeTable& table) : table_(table) {}

    bool check(const ValueTree& v, const ResolvedType& t) {
        return std::visit(
            Overloaded{
                [&](const rtypes::Basic& b) { return root_matches(b.native, v.root()) && v.children().empty(); },
                [&](const rtypes::OpenTree& o) { return root_matches(o.native, v.root()); },
                [&](const rtypes::Tree& tree) { return check_tree(v, tree); },
                [&](const rtypes::Choice& c) {
                    // Both arms are always evaluated so errors do not depend on arm order.
                    bool left = check(v, *c.left);
                    bool right = check(v, *c.right);
                    return left || right;
                },
                [&](const rtypes::Ref& r) { return check_ref(v, r); },
            },
            t.node);
    }

private:
    bool check_tree(const ValueTree& v, const rtypes::Tree& tree) {
        if (!root_matches(tree.native, v.root())) return false;
        for (const auto& [name, list] : v.children())
            if (!tree.fields.count(name)) return false;
        for (const auto& [name, field] : tree.fields) {
            const auto* list = v.find_children(name);
            std::size_t n = list ? list->size() : 0;
            if (!check_cardinality(n, field.cardinality)) return false;
            if (!list) continue;
            for (const auto& child : *list) {
                // Descending into a child ends the current chain of references.
                std::vector<std::string> saved;
                saved.swap(followed_);
                bool ok = check(child, *field.type);
                followed_.swap(saved);
                if (!ok) return false;
            }
        }
        return true;
    }

    bool check_ref(const ValueTree& v, const rtypes::Ref& r) {
        if (!table_.productive(r.name))
            throw CyclicTypeError("type '" + r.name + "' is a cycle of links with no native type");
        // Revisiting a reference at the same node adds nothing (least fixed point).
        if (std::find(followed_.begin(), followed_.end(), r.name) != followed_.end()) return false;
        auto target = table_.find(r.name);
        if (!target) throw UnresolvedLink("dangling reference to type '" + r.name + "'");
        followed_.push_back(r.name);
        bool ok = check(v, *target);
        followed_.pop_back();
        return ok;
    }

    const TypeTable& table_;
    std::vector<std::string> followed_;
};

std::string cardinality_text(const Cardinality& c) {
    return "[" + std::to_string(c.min) + "," + (c.max ? std::to_string(*c.max) : "*") + "]";
}

} // namespace

TypeTable resolve(const std::vector<TypeDecl>& decls) {
    TypeTable table;
    table.types_ = Resolver(decls).run();
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& [name, t] : table.types_) {
            if (!table.productive_.count(name) && productive_now(*t, table.productive_)) {
                table.productive_.insert(name);
                changed = true;
            }
        }
    }
    return table;
}

TypePtr resolve_type(const TypeDef& def, const TypeTable& table) {
    return std::visit(
        Overloaded{
            [](const typedefs::Native& n) { return make_basic(n.native); },
            [](const typedefs::UntypedSubnodes& u) { return make_open(u.native); },
            [](const typedefs::Undefined&) { return make_open(NativeType::Any); },
            [&](const typedefs::Link& l) {
                if (auto t = table.find(l.name)) return t;
                throw UnresolvedLink("link to undeclared type '" + l.name + "'");
            },
            [&](const typedefs::Choice& c) {
                return make_choice(resolve_type(*c.left, table), resolve_type(*c.right, table));
            },
            [&](const typedefs::Inline& inl) {
                std::map<std::string, rtypes::Field> fields;
                for (const auto& st : inl.subtypes)
                    fields.insert_or_assign(st.name, rtypes::Field{st.cardinality, resolve_type(*st.def, table)});
                return make_tree(inl.native, std::move(fields));
            },
        },
        def.node);
}

bool check_cardinality(std::size_t count, const Cardinality& card) {
    return count >= card.min && (!card.max || count <= *card.max);
}

bool conforms(const ValueTree& value, const ResolvedType& type, const TypeTable& table) {
    return Checker(table).check(value, type);
}

bool conforms(const ValueTree& value, const ResolvedType& type) {
    static const TypeTable empty;
    return conforms(value, type, empty);
}

std::optional<std::size_t> select_arm(const ValueTree& value, std::span<const TypePtr> arms,
                                      const TypeTable& table) {
    for (std::size_t i = 0; i < arms.size(); ++i)
        if (conforms(value, *arms[i], table)) return i;
    return std::nullopt;
}

std::string describe(const ResolvedType& type) {
    return std::visit(
        Overloaded{
            [](const rtypes::Basic& b) { return std::string(to_string(b.native)); },
            [](const rtypes::OpenTree& o) { return std::string(to_string(o.native)) + " { ? }"; },
            [](const rtypes::Ref& r) { return "&" + r.name; },
            [](const rtypes::Choice& c) { return "(" + describe(*c.left) + " | " + describe(*c.right) + ")"; },
            [](const rtypes::Tree& t) {
                std::string out = std::string(to_string(t.native)) + " {";
                for (const auto& [name, f] : t.fields)
                    out += " ." + name + cardinality_text(f.cardinality) + ": " + describe(*f.type);
                return out + " }";
            },
        },
        type.node);
}

} // namespace oli
