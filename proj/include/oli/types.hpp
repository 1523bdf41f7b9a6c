#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "oli/ast.hpp"
#include "oli/value.hpp"

namespace oli {

struct ResolvedType;
using TypePtr = std::shared_ptr<const ResolvedType>;

namespace rtypes {

/// A bare native type. Accepts only childless nodes.
struct Basic {
    NativeType native;
};

struct Field {
    Cardinality cardinality;
    TypePtr type;
};

/// Native root plus declared children; undeclared children are rejected.
struct Tree {
    NativeType native;
    std::map<std::string, Field> fields;
};

/// `NativeType { ? }`: any children at all.
struct OpenTree {
    NativeType native;
};

struct Choice {
    TypePtr left;
    TypePtr right;
};

/// Back-reference into the owning TypeTable. Only produced where a link
/// would otherwise expand forever.
struct Ref {
    std::string name;
};

} // namespace rtypes

struct ResolvedType {
    std::variant<rtypes::Basic, rtypes::Tree, rtypes::OpenTree, rtypes::Choice, rtypes::Ref> node;
};

/// Deep structural comparison.
bool operator==(const ResolvedType& a, const ResolvedType& b);

TypePtr make_basic(NativeType native);
TypePtr make_open(NativeType native);
TypePtr make_tree(NativeType native, std::map<std::string, rtypes::Field> fields);
TypePtr make_choice(TypePtr left, TypePtr right);
TypePtr make_ref(std::string name);

/// Named resolved types. Immutable once built by resolve(); safe to share
/// across threads.
class TypeTable {
public:
    TypeTable() = default;

    /// nullptr when `name` is not a declared type.
    TypePtr find(const std::string& name) const;

    /// Resolves a type name as used in interfaces and match arms: a native
    /// type keyword, `undefined`, or a declared type.
    /// @throws UnresolvedLink
    TypePtr lookup(const std::string& name) const;

    /// False when checking against `name` can never reach a native root
    /// (e.g. `type a: b` with `type b: a`).
    bool productive(const std::string& name) const { return productive_.count(name) != 0; }

    const std::map<std::string, TypePtr>& entries() const { return types_; }

private:
    friend TypeTable resolve(const std::vector<TypeDecl>& decls);

    std::map<std::string, TypePtr> types_;
    std::set<std::string> productive_;
};

/// Resolves every declaration, expanding links inline except where that
/// would recurse; those become rtypes::Ref back into the table.
/// @throws UnresolvedLink when a link names no declaration.
TypeTable resolve(const std::vector<TypeDecl>& decls);

/// Resolves an anonymous definition against an already built table.
TypePtr resolve_type(const TypeDef& def, const TypeTable& table);

bool check_cardinality(std::size_t count, const Cardinality& card);

/// Structural run-time conformance of a value to a type.
/// @throws CyclicTypeError when the check reaches an unproductive type.
bool conforms(const ValueTree& value, const ResolvedType& type, const TypeTable& table);
bool conforms(const ValueTree& value, const ResolvedType& type);

/// Index of the first arm the value conforms to.
std::optional<std::size_t> select_arm(const ValueTree& value, std::span<const TypePtr> arms,
                                      const TypeTable& table);

/// Human-readable rendering, for diagnostics and test failure output.
std::string describe(const ResolvedType& type);

} // namespace oli
