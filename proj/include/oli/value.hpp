#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oli {

using Bytes = std::vector<std::uint8_t>;

/// Root value of a tree node. `std::monostate` is the empty root; `int32_t`
/// is `int`, `int64_t` is `long`, `Bytes` is `raw`.
using BasicValue =
    std::variant<std::monostate, std::int32_t, std::int64_t, double, std::string, bool, Bytes>;

enum class NativeType { Int, Long, Double, String, Raw, Void, Any };

std::string_view to_string(NativeType native);
std::optional<NativeType> native_from_name(std::string_view name);

/// Whether a root value has the given native type. `void` accepts only the
/// empty root; `any` accepts every non-empty root. Numbers never coerce.
bool root_matches(NativeType native, const BasicValue& root);

inline bool is_empty(const BasicValue& v) { return std::holds_alternative<std::monostate>(v); }

/// Text rendering used by string concatenation and the console: integers in
/// decimal, doubles in shortest round-trip form, raw bytes as base64, empty
/// as "".
std::string render(const BasicValue& v);

std::string_view kind_name(const BasicValue& v);

/// Message/variable value: a root plus named, ordered child lists.
/// A child list is never stored empty; absent and empty are the same state.
class ValueTree {
public:
    using Children = std::map<std::string, std::vector<ValueTree>>;

    ValueTree() = default;
    explicit ValueTree(BasicValue root) : root_(std::move(root)) {}

    const BasicValue& root() const noexcept { return root_; }
    void set_root(BasicValue v) { root_ = std::move(v); }

    const Children& children() const noexcept { return children_; }

    std::size_t child_count(const std::string& name) const;
    const std::vector<ValueTree>* find_children(const std::string& name) const;
    const ValueTree* find_child(const std::string& name) const;

    /// First child under `name`, created empty when absent.
    ValueTree& child(const std::string& name);
    void add_child(const std::string& name, ValueTree node);
    /// Replaces the whole list under `name` with a single node.
    void set_child(const std::string& name, ValueTree node);
    void remove_child(const std::string& name);

    /// No root and no children.
    bool empty() const { return is_empty(root_) && children_.empty(); }

    friend bool operator==(const ValueTree&, const ValueTree&) = default;

private:
    BasicValue root_;
    Children children_;
};

using Path = std::vector<std::string>;

std::string path_string(const Path& path);

/// Follows the first element of each named list. Returns nullptr when any
/// segment is absent.
const ValueTree* find_path(const ValueTree& tree, const Path& path);

/// Like find_path but creates missing nodes along the way.
ValueTree& ensure_path(ValueTree& tree, const Path& path);

} // namespace oli
