// Command-line driver: `oli check FILE` and `oli run FILE`.

#include <csignal>
#include <iostream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include <CLI11.hpp>

#include "oli/loader.hpp"
#include "oli/runtime.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSemantic = 1;
constexpr int kExitInput = 2;
constexpr int kExitFault = 3;
constexpr int kExitStartup = 4;

/// Loads and verifies; prints diagnostics. Returns an exit code, or -1 when
/// the program is clean enough to run.
int check(const std::string& path, oli::AstProgram& program) {
    try {
        auto checked = oli::check_program(path);
        for (const auto& d : checked.diagnostics) std::cerr << oli::format_diagnostic(d) << "\n";
        if (oli::has_errors(checked.diagnostics)) return kExitSemantic;
        program = std::move(checked.program);
        return -1;
    } catch (const oli::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}

int cmd_check(const std::string& path) {
    oli::AstProgram program;
    int rc = check(path, program);
    return rc < 0 ? kExitOk : rc;
}

struct RunFlags {
    std::vector<std::string> overrides;
    int timeout_ms = 30000;
    bool trace = false;
};

int cmd_run(const std::string& path, const RunFlags& flags) {
    oli::AstProgram program;
    if (int rc = check(path, program); rc >= 0) return rc;

    oli::runtime::RuntimeOptions options;
    for (const auto& o : flags.overrides) {
        auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "error: --location-override expects PORT=URI, got '" << o << "'\n";
            return kExitInput;
        }
        options.location_overrides[o.substr(0, eq)] = o.substr(eq + 1);
    }
    options.solicit_timeout = std::chrono::milliseconds(flags.timeout_ms);

    static std::mutex trace_mutex;
    if (flags.trace) {
        options.trace = [](oli::comm::Direction dir, const oli::comm::Message& m, std::size_t bytes) {
            std::string line = dir == oli::comm::Direction::In ? "IN" : "OUT";
            line += " op=" + m.operation;
            if (m.fault) line += " fault=" + *m.fault;
            line += " bytes=" + std::to_string(bytes) + "\n";
            std::lock_guard lock(trace_mutex);
            std::cerr << line << std::flush;
        };
    }
    options.on_bound = [](const std::string& port, const oli::comm::Location& where) {
        std::cerr << "listening " << port << " " << where.str() << std::endl;
    };

    // Servers stop on SIGINT/SIGTERM; a watcher thread turns the signal into
    // a graceful shutdown. SIGUSR1 releases the watcher once main is done.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    sigaddset(&signals, SIGUSR1);

    try {
        bool service = !program.input_ports.empty();
        if (service) pthread_sigmask(SIG_BLOCK, &signals, nullptr);
        oli::runtime::Interpreter interp(program, options);

        oli::runtime::Completion result;
        if (!service) {
            result = interp.run_client();
        } else {
            result = interp.start();
            if (result.ok()) {
                std::thread watcher([&] {
                    int sig = 0;
                    sigwait(&signals, &sig);
                    interp.shutdown();
                });
                result = interp.wait();
                pthread_kill(watcher.native_handle(), SIGUSR1);
                watcher.join();
            }
            interp.shutdown();
        }
        if (!result.ok()) {
            std::cerr << "error: fault " << *result.fault;
            if (!result.detail.empty()) std::cerr << ": " << result.detail;
            std::cerr << "\n";
            return kExitFault;
        }
        return kExitOk;
    } catch (const oli::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStartup;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interpreter for service programs with choice types"};
    app.require_subcommand(1);

    std::string check_path;
    auto* check_cmd = app.add_subcommand("check", "Parse and verify a program");
    check_cmd->add_option("file", check_path, "Program file (.ol)")->required();

    std::string run_path;
    RunFlags flags;
    auto* run_cmd = app.add_subcommand("run", "Run a program");
    run_cmd->add_option("file", run_path, "Program file (.ol)")->required();
    run_cmd->add_option("--location-override", flags.overrides, "Rebind a port: PORT=URI (repeatable)");
    run_cmd->add_option("--timeout-ms", flags.timeout_ms, "Solicit-response timeout in milliseconds")
        ->check(CLI::PositiveNumber);
    run_cmd->add_flag("--trace", flags.trace, "Log every sent and received message to stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    if (*check_cmd) return cmd_check(check_path);
    return cmd_run(run_path, flags);
}
