#include "oli/console.hpp"

namespace oli {

ValueTree Console::println(const ValueTree& payload) {
    std::string line = render(payload.root());
    line += '\n';
    std::lock_guard lock(mutex_);
    out_ << line << std::flush;
    return ValueTree{};
}

std::string_view console_iol_source() {
    return R"(// Built-in console service.
interface ConsoleInterface {
    RequestResponse:
        println(undefined)(void)
}

outputPort Console {
    Location: "local://console"
    Protocol: mop
    Interfaces: ConsoleInterface
}
)";
}

} // namespace oli
