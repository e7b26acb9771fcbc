#pragma once

// .vzr episode recordings: seed plus per-tic actions, with a state hash every
// 35 tics and a footer holding the final counters and hash.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pixelarena/scenario.hpp"
#include "pixelarena/world.hpp"

namespace pixelarena {

inline constexpr std::uint16_t kReplayVersion = 1;
inline constexpr std::uint32_t kCheckpointInterval = kTicRate;
inline constexpr std::size_t kCountersWireSize = 12 * 4 + 8;

class ReplayError : public std::runtime_error {
public:
    enum class Kind { io, bad_header, version, truncated, checkpoint_mismatch, footer_mismatch };
    ReplayError(Kind kind, std::uint32_t tic, const std::string& msg) : std::runtime_error(msg), kind(kind), tic(tic) {}
    Kind kind;
    std::uint32_t tic;  // tic named by the error (last valid tic for truncation)
};

struct ReplayHeader {
    std::uint16_t version = kReplayVersion;
    std::uint64_t seed = 0;
    std::uint8_t players = 0;
    std::string config_text;  // serialized config without the map
    std::string map_text;

    ScenarioConfig config() const;
};

struct ReplayFooter {
    std::uint32_t final_tic = 0;
    std::vector<Counters> counters;
    std::uint64_t final_hash = 0;
};

struct ReplayData {
    ReplayHeader header;
    std::vector<std::vector<Action>> tics;
    std::vector<std::uint64_t> checkpoints;  // checkpoints[i] is the hash after tic (i+1)*35
    std::optional<ReplayFooter> footer;
};

ReplayHeader make_replay_header(const ScenarioConfig& config, int players, std::uint64_t seed);
// World at tic 0 for the recorded match.
WorldState replay_world(const ReplayHeader& header);

void encode_counters(std::vector<std::uint8_t>& out, const Counters& c);
Counters decode_counters(std::span<const std::uint8_t> in);

class ReplayWriter {
public:
    ReplayWriter(const std::filesystem::path& path, const ReplayHeader& header);
    // Appends one tic; `after` is the world once the tic has been stepped.
    void record(std::span<const Action> actions, const WorldState& after);
    void finish(const WorldState& final_world);
    bool finished() const { return finished_; }

private:
    void write(const std::vector<std::uint8_t>& bytes);

    std::filesystem::path path_;
    std::ofstream out_;
    int players_;
    bool finished_ = false;
};

// Throws ReplayError(truncated) when the footer is missing or the tail is cut,
// unless allow_partial is set.
ReplayData read_replay(const std::filesystem::path& path, bool allow_partial = false);
ReplayData parse_replay(std::span<const std::uint8_t> bytes, bool allow_partial = false);
std::vector<std::uint8_t> encode_replay(const ReplayData& data);

using ReplayTicCallback = std::function<void(const WorldState& world, std::span<const Action> actions,
                                             std::span<const Event> events)>;

// Re-simulates and verifies every checkpoint and the footer. Discovery
// tracking only feeds the automap and leaves the hashes unchanged.
WorldState play_replay(const ReplayData& data, const ReplayTicCallback& on_tic = {}, bool track_discovery = false);

}  // namespace pixelarena
