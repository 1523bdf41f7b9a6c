#include "oli/value.hpp"

#include <charconv>
#include <cmath>

#include "oli/base64.hpp"
#include "oli/box.hpp"

namespace oli {

std::string_view to_string(NativeType native) {
    switch (native) {
    case NativeType::Int: return "int";
    case NativeType::Long: return "long";
    case NativeType::Double: return "double";
    case NativeType::String: return "string";
    case NativeType::Raw: return "raw";
    case NativeType::Void: return "void";
    case NativeType::Any: return "any";
    }
    return "?";
}

std::optional<NativeType> native_from_name(std::string_view name) {
    if (name == "int") return NativeType::Int;
    if (name == "long") return NativeType::Long;
    if (name == "double") return NativeType::Double;
    if (name == "string") return NativeType::String;
    if (name == "raw") return NativeType::Raw;
    if (name == "void") return NativeType::Void;
    if (name == "any") return NativeType::Any;
    return std::nullopt;
}

bool root_matches(NativeType native, const BasicValue& root) {
    switch (native) {
    case NativeType::Int: return std::holds_alternative<std::int32_t>(root);
    case NativeType::Long: return std::holds_alternative<std::int64_t>(root);
    case NativeType::Double: return std::holds_alternative<double>(root);
    case NativeType::String: return std::holds_alternative<std::string>(root);
    case NativeType::Raw: return std::holds_alternative<Bytes>(root);
    case NativeType::Void: return is_empty(root);
    case NativeType::Any: return !is_empty(root);
    }
    return false;
}

std::string render(const BasicValue& v) {
    return std::visit(
        Overloaded{
            [](std::monostate) { return std::string(); },
            [](std::int32_t i) { return std::to_string(i); },
            [](std::int64_t l) { return std::to_string(l); },
            [](double d) {
                if (std::isnan(d)) return std::string("NaN");
                if (std::isinf(d)) return std::string(d < 0 ? "-Infinity" : "Infinity");
                char buf[64];
                auto res = std::to_chars(buf, buf + sizeof buf, d);
                return std::string(buf, res.ptr);
            },
            [](const std::string& s) { return s; },
            [](bool b) { return std::string(b ? "true" : "false"); },
            [](const Bytes& b) { return base64_encode(b); },
        },
        v);
}

std::string_view kind_name(const BasicValue& v) {
    static constexpr std::string_view names[] = {"void", "int", "long", "double", "string", "bool", "raw"};
    return names[v.index()];
}

std::size_t ValueTree::child_count(const std::string& name) const {
    auto it = children_.find(name);
    return it == children_.end() ? 0 : it->second.size();
}

const std::vector<ValueTree>* ValueTree::find_children(const std::string& name) const {
    auto it = children_.find(name);
    return it == children_.end() ? nullptr : &it->second;
}

const ValueTree* ValueTree::find_child(const std::string& name) const {
    auto* list = find_children(name);
    return list ? &list->front() : nullptr;
}

ValueTree& ValueTree::child(const std::string& name) {
    auto& list = children_[name];
    if (list.empty()) list.emplace_back();
    return list.front();
}

void ValueTree::add_child(const std::string& name, ValueTree node) {
    children_[name].push_back(std::move(node));
}

void ValueTree::set_child(const std::string& name, ValueTree node) {
    auto& list = children_[name];
    list.clear();
    list.push_back(std::move(node));
}

void ValueTree::remove_child(const std::string& name) { children_.erase(name); }

std::string path_string(const Path& path) {
    std::string out;
    for (const auto& seg : path) {
        if (!out.empty()) out += '.';
        out += seg;
    }
    return out;
}

const ValueTree* find_path(const ValueTree& tree, const Path& path) {
    const ValueTree* node = &tree;
    for (const auto& seg : path) {
        node = node->find_child(seg);
        if (!node) return nullptr;
    }
    return node;
}

ValueTree& ensure_path(ValueTree& tree, const Path& path) {
    ValueTree* node = &tree;
    for (const auto& seg : path) node = &node->child(seg);
    return *node;
}

} // namespace oli
