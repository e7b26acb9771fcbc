#pragma once

// Competition harness: match scheduling, match execution and the statistics
// tables.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pixelarena/bots.hpp"
#include "pixelarena/scenario.hpp"
#include "pixelarena/world.hpp"

namespace pixelarena {

inline constexpr std::uint32_t kTenMinuteMatchTics = 600 * kTicRate;

std::int64_t frags(std::uint32_t kills, std::uint32_t suicides);
// frags / max(deaths, 1), truncated toward zero to 2 decimals.
double fd_ratio(std::int64_t frags, std::uint32_t deaths);
// Unit conversion with 128 units = 3 m; 0 when alive_tics is 0.
double avg_speed_kmh(double distance_units, std::uint32_t alive_tics);

struct Precisions {
    double shooting = 0;   // percent, 1 decimal
    double detection = 0;  // percent, 1 decimal
};
Precisions precisions(const Counters& c);

struct PlayerStats {
    std::string name;
    Counters counters;
    std::int64_t frags = 0;
    double fd_ratio = 0;
    double avg_speed_kmh = 0;
    double shooting_precision = 0;
    double detection_precision = 0;
};

PlayerStats derive_stats(const std::string& name, const Counters& counters);

struct MatchStats {
    std::uint32_t final_tic = 0;
    std::vector<PlayerStats> players;  // in slot order
    std::vector<std::string> notes;    // e.g. disconnected agents
};

MatchStats match_stats(const WorldState& world, std::span<const std::string> names);

// Ranking: total frags, then fd_ratio, then name.
std::vector<PlayerStats> ranked(std::vector<PlayerStats> players);

inline constexpr const char* kCsvHeader =
    "place,bot,frags,fd_ratio,kills,suicides,deaths,avg_speed_kmh,attacks,shooting_precision,detection_precision,"
    "hits_taken,damage_taken,ammo_picked,medikits_picked,armors_picked";

std::string emit_csv(std::span<const PlayerStats> players);
// Totals table plus a per-match frags table.
std::string emit_markdown(std::span<const MatchStats> matches, std::span<const std::string> roster);
// Sums each roster member's counters over the matches they played.
std::vector<PlayerStats> total_stats(std::span<const MatchStats> matches, std::span<const std::string> roster);

struct Standing {
    std::int64_t frags = 0;
    std::uint32_t deaths = 0;
};

struct ScheduleParams {
    int players = 0;
    int capacity = 8;
    int matches = 12;
    int worst_exclude = 2;
};

struct MatchSchedule {
    int capacity = 0;
    std::size_t phase_boundary = 0;  // first match index of the worst-excluded phase
    std::vector<std::vector<int>> matches;  // participant ids, ascending
};

// Throws ConfigError when infeasible.
void check_schedule(const ScheduleParams& p);
// Participants of match `index` given cumulative standings of completed matches.
std::vector<int> match_participants(const ScheduleParams& p, int index, std::span<const Standing> standings);
// The `count` lowest-ranked ids: fewest frags, then more deaths, then higher id.
std::vector<int> worst_players(std::span<const Standing> standings, int count);
// Whole schedule with later matches using the given (fixed) standings.
MatchSchedule schedule(const ScheduleParams& p, std::span<const Standing> standings = {});

// Per-tic controller for one slot.
using Controller = std::function<Action(const WorldState& world, int slot)>;

struct MatchOutcome {
    MatchStats stats;
    std::uint64_t final_hash = 0;
};

// Runs `duration` tics with the given controllers and optionally records a replay.
MatchOutcome run_match(const ScenarioConfig& config, std::span<const std::string> names,
                       std::vector<Controller> controllers, std::uint64_t seed, std::uint32_t duration = kTenMinuteMatchTics,
                       const std::optional<std::filesystem::path>& replay_path = std::nullopt);

struct Entrant {
    std::string name;
    BotSpec bot;
};

struct TournamentOptions {
    ScenarioConfig config;
    std::vector<Entrant> entrants;
    ScheduleParams schedule;  // players is taken from entrants
    std::uint32_t duration = kTenMinuteMatchTics;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir;
};

struct TournamentResult {
    MatchSchedule schedule;
    std::vector<MatchStats> matches;
    std::vector<PlayerStats> totals;  // ranked
};

// Writes match_NN.vzr, match_NN.csv, summary.csv and summary.md into out_dir.
TournamentResult run_tournament(const TournamentOptions& options, const std::function<void(int, const MatchStats&)>& progress = {});

}  // namespace pixelarena
