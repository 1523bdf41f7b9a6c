#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oli/value.hpp"

namespace oli::comm {

struct Message {
    std::string resource_path = "/";
    std::string operation;
    /// For a fault, the fault's detail tree (possibly empty).
    ValueTree payload;
    std::optional<std::string> fault;

    friend bool operator==(const Message&, const Message&) = default;
};

// MOP/1 frame: "MOP1", u32 big-endian body length, UTF-8 JSON body
// {"fault"?: string, "op": string, "res": string, "val": node}.
inline constexpr std::array<std::uint8_t, 4> kFrameMagic = {0x4D, 0x4F, 0x50, 0x31};
inline constexpr std::size_t kFrameHeaderSize = 8;
inline constexpr std::size_t kMaxBodySize = 16u * 1024 * 1024;

/// @throws EncodeError for non-finite doubles, invalid UTF-8 strings, an
/// empty operation name, or an oversized body.
std::vector<std::uint8_t> encode_message(const Message& msg);

/// Decodes exactly one complete frame.
/// @throws DecodeError
Message decode_message(std::span<const std::uint8_t> frame);

/// JSON text of a value node, keys in lexicographic order.
std::string encode_value(const ValueTree& value);
ValueTree decode_value(const std::string& json);

/// Validates a frame header and returns the body length.
/// @throws DecodeError on bad magic or an oversized length.
std::size_t read_frame_header(std::span<const std::uint8_t, kFrameHeaderSize> header);

/// Splits a byte stream into messages.
class FrameReader {
public:
    void feed(std::span<const std::uint8_t> bytes);
    /// Next complete message, or nullopt when more bytes are needed.
    std::optional<Message> next();
    std::size_t buffered() const { return buf_.size() - pos_; }

private:
    std::vector<std::uint8_t> buf_;
    std::size_t pos_ = 0;
};

} // namespace oli::comm
