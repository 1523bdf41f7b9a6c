#pragma once

#include <iostream>
#include <mutex>
#include <string_view>

#include "oli/value.hpp"

namespace oli {

/// The built-in Console service. Writes are line-atomic.
class Console {
public:
    explicit Console(std::ostream& out = std::cout) : out_(out) {}

    /// Writes the rendered root followed by a newline; returns an empty tree.
    ValueTree println(const ValueTree& payload);

private:
    std::ostream& out_;
    std::mutex mutex_;
};

/// Location under which the console is reachable from `console.iol`.
inline constexpr std::string_view kConsoleLocation = "local://console";

/// Source text served for `include "console.iol"`.
std::string_view console_iol_source();

} // namespace oli
