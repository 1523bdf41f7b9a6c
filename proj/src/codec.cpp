#include "oli/codec.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "oli/base64.hpp"
#include "oli/box.hpp"
#include "oli/error.hpp"

namespace oli::comm {
namespace {

using json = nlohmann::json;

json root_to_json(const BasicValue& v) {
    return std::visit(Overloaded{
                          [](std::monostate) { return json(nullptr); },
                          [](std::int32_t i) { return json{{"i", i}}; },
                          [](std::int64_t l) { return json{{"l", l}}; },
                          [](double d) {
                              if (!std::isfinite(d)) throw EncodeError("non-finite double has no wire form");
                              return json{{"d", d}};
                          },
                          [](const std::string& s) { return json(s); },
                          [](bool b) { return json(b); },
                          [](const Bytes& b) { return json{{"b", base64_encode(b)}}; },
                      },
                      v);
}

json node_to_json(const ValueTree& v) {
    json node = json::object();
    node["$"] = root_to_json(v.root());
    for (const auto& [name, list] : v.children()) {
        if (name == "$") throw EncodeError("child name '$' is reserved");
        json arr = json::array();
        for (const auto& child : list) arr.push_back(node_to_json(child));
        node[name] = std::move(arr);
    }
    return node;
}

std::string dump(const json& j) {
    try {
        return j.dump(-1, ' ', false, json::error_handler_t::strict);
    } catch (const json::exception& e) {
        throw EncodeError(std::string("cannot encode message: ") + e.what());
    }
}

BasicValue root_from_json(const json& j) {
    if (j.is_null()) return std::monostate{};
    if (j.is_string()) return j.get<std::string>();
    if (j.is_boolean()) return j.get<bool>();
    if (!j.is_object() || j.size() != 1) throw DecodeError("unknown value tag");
    const auto& [tag, inner] = *j.items().begin();
    if (tag == "i") {
        if (!inner.is_number_integer()) throw DecodeError("int value is not an integer");
        if (inner.is_number_unsigned()) {
            auto u = inner.get<std::uint64_t>();
            if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max()))
                throw DecodeError("int value out of range");
            return static_cast<std::int32_t>(u);
        }
        auto v = inner.get<std::int64_t>();
        if (v < std::numeric_limits<std::int32_t>::min() || v > std::numeric_limits<std::int32_t>::max())
            throw DecodeError("int value out of range");
        return static_cast<std::int32_t>(v);
    }
    if (tag == "l") {
        if (!inner.is_number_integer()) throw DecodeError("long value is not an integer");
        if (inner.is_number_unsigned() &&
            inner.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
            throw DecodeError("long value out of range");
        return inner.get<std::int64_t>();
    }
    if (tag == "d") {
        if (!inner.is_number()) throw DecodeError("double value is not a number");
        return inner.get<double>();
    }
    if (tag == "b") {
        if (!inner.is_string()) throw DecodeError("raw value is not a string");
        auto bytes = base64_decode(inner.get<std::string>());
        if (!bytes) throw DecodeError("raw value is not valid base64");
        return std::move(*bytes);
    }
    throw DecodeError("unknown value tag '" + tag + "'");
}

ValueTree node_from_json(const json& j) {
    if (!j.is_object()) throw DecodeError("value node is not an object");
    auto root = j.find("$");
    if (root == j.end()) throw DecodeError("value node has no root ('$')");
    ValueTree v(root_from_json(*root));
    for (const auto& [name, list] : j.items()) {
        if (name == "$") continue;
        if (!list.is_array() || list.empty()) throw DecodeError("child '" + name + "' is not a non-empty array");
        for (const auto& child : list) v.add_child(name, node_from_json(child));
    }
    return v;
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw DecodeError(std::string("malformed body: ") + e.what());
    }
}

} // namespace

std::vector<std::uint8_t> encode_message(const Message& msg) {
    if (msg.operation.empty()) throw EncodeError("message has no operation name");
    json body = json::object();
    body["op"] = msg.operation;
    body["res"] = msg.resource_path;
    if (msg.fault) body["fault"] = *msg.fault;
    body["val"] = node_to_json(msg.payload);
    std::string text = dump(body);
    if (text.size() > kMaxBodySize) throw EncodeError("message body exceeds 16 MiB");

    std::vector<std::uint8_t> frame(kFrameHeaderSize + text.size());
    std::copy(kFrameMagic.begin(), kFrameMagic.end(), frame.begin());
    auto n = static_cast<std::uint32_t>(text.size());
    frame[4] = static_cast<std::uint8_t>(n >> 24);
    frame[5] = static_cast<std::uint8_t>(n >> 16);
    frame[6] = static_cast<std::uint8_t>(n >> 8);
    frame[7] = static_cast<std::uint8_t>(n);
    std::copy(text.begin(), text.end(), frame.begin() + kFrameHeaderSize);
    return frame;
}

std::size_t read_frame_header(std::span<const std::uint8_t, kFrameHeaderSize> header) {
    if (!std::equal(kFrameMagic.begin(), kFrameMagic.end(), header.begin())) throw DecodeError("bad frame magic");
    std::size_t n = (std::size_t{header[4]} << 24) | (std::size_t{header[5]} << 16) |
                    (std::size_t{header[6]} << 8) | std::size_t{header[7]};
    if (n > kMaxBodySize) throw DecodeError("frame body length " + std::to_string(n) + " exceeds 16 MiB");
    return n;
}

Message decode_message(std::span<const std::uint8_t> frame) {
    if (frame.size() < kFrameHeaderSize) throw DecodeError("truncated frame header");
    std::size_t n = read_frame_header(frame.first<kFrameHeaderSize>());
    if (frame.size() - kFrameHeaderSize < n) throw DecodeError("truncated frame body");
    if (frame.size() - kFrameHeaderSize > n) throw DecodeError("trailing bytes after frame body");

    auto body = frame.subspan(kFrameHeaderSize);
    json j = parse_json(std::string_view(reinterpret_cast<const char*>(body.data()), body.size()));
    if (!j.is_object()) throw DecodeError("frame body is not an object");

    Message msg;
    for (const auto& [key, value] : j.items()) {
        if (key == "op") {
            if (!value.is_string() || value.get<std::string>().empty())
                throw DecodeError("'op' must be a non-empty string");
            msg.operation = value.get<std::string>();
        } else if (key == "res") {
            if (!value.is_string()) throw DecodeError("'res' must be a string");
            msg.resource_path = value.get<std::string>();
        } else if (key == "fault") {
            if (!value.is_string()) throw DecodeError("'fault' must be a string");
            msg.fault = value.get<std::string>();
        } else if (key == "val") {
            msg.payload = node_from_json(value);
        } else {
            throw DecodeError("unexpected key '" + key + "' in frame body");
        }
    }
    if (msg.operation.empty()) throw DecodeError("frame body has no 'op'");
    if (!j.contains("res")) throw DecodeError("frame body has no 'res'");
    if (!j.contains("val")) throw DecodeError("frame body has no 'val'");
    return msg;
}

std::string encode_value(const ValueTree& value) { return dump(node_to_json(value)); }

ValueTree decode_value(const std::string& text) { return node_from_json(parse_json(text)); }

void FrameReader::feed(std::span<const std::uint8_t> bytes) {
    if (pos_ > 0 && pos_ == buf_.size()) {
        buf_.clear();
        pos_ = 0;
    }
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Message> FrameReader::next() {
    if (buffered() < kFrameHeaderSize) return std::nullopt;
    std::span<const std::uint8_t> rest(buf_.data() + pos_, buffered());
    std::size_t n = read_frame_header(rest.first<kFrameHeaderSize>());
    if (rest.size() < kFrameHeaderSize + n) return std::nullopt;
    Message m = decode_message(rest.first(kFrameHeaderSize + n));
    pos_ += kFrameHeaderSize + n;
    return m;
}

} // namespace oli::comm
