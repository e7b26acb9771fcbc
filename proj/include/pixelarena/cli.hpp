#pragma once

// Operator entry point: host, join, tournament, replay and bench commands.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pixelarena::cli {

struct HostCommand {
    std::string config;  // empty = built-in arena
    std::uint16_t port = 5029;
    std::optional<std::uint16_t> ws_port;
    int players = 2;
    int humans = 0;  // slots reserved for browser players on the bridge
    std::optional<std::uint32_t> duration;
    std::vector<std::string> bots;  // local slots 0..
    std::optional<std::string> record;
    std::optional<std::uint64_t> seed;
    bool async = false;
};

struct JoinCommand {
    std::string host = "127.0.0.1";
    std::uint16_t port = 5029;
    std::string bot = "fighter";
    std::string name = "joiner";
};

struct TournamentCommand {
    std::string config;
    std::vector<std::string> bots;
    int matches = 12;
    int capacity = 8;
    int worst_exclude = 2;
    std::uint32_t duration = 21000;
    std::uint64_t seed = 1;
    std::string out = "tournament_out";
};

struct ReplayCommand {
    std::string file;
    bool render = false;
    std::optional<std::string> resolution;
    std::string out = "frames";
    bool stats = false;
    int player = 0;
    int every = 1;
    std::vector<std::string> buffers{"screen"};
};

struct BenchCommand {
    std::string resolution = "320x240";
    int tics = 2000;
    std::vector<std::string> buffers{"screen"};
};

using Command = std::variant<HostCommand, JoinCommand, TournamentCommand, ReplayCommand, BenchCommand>;

// Thrown by parse_args for --help (code 0) and usage errors (code 2).
class UsageExit : public std::runtime_error {
public:
    UsageExit(int code, const std::string& text) : std::runtime_error(text), code(code) {}
    int code;
};

Command parse_args(int argc, const char* const* argv);
// 0 on success, 1 with a one-line diagnostic on `err` otherwise.
int run(const Command& command, std::ostream& out, std::ostream& err);
// parse_args + run with usage text on stderr.
int main(int argc, const char* const* argv);

// "320x240" -> {320, 240}; throws std::invalid_argument.
std::pair<int, int> parse_resolution(const std::string& text);

}  // namespace pixelarena::cli
