#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oli {

std::string base64_encode(const std::vector<std::uint8_t>& bytes);

/// std::nullopt on malformed input.
std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text);

} // namespace oli
