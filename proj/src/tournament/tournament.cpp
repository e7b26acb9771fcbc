#include <cstdio>
#include <fstream>

#include "pixelarena/log.hpp"
#include "pixelarena/replay.hpp"
#include "pixelarena/tournament.hpp"

namespace pixelarena {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string match_file(int index, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "match_%02d.%s", index + 1, ext);
    return buf;
}

}  // namespace

MatchOutcome run_match(const ScenarioConfig& config, std::span<const std::string> names, std::vector<Controller> controllers,
                       std::uint64_t seed, std::uint32_t duration, const std::optional<std::filesystem::path>& replay_path) {
    const int n = static_cast<int>(controllers.size());
    if (n < 2 || n > kMaxPlayers) throw ConfigError("a match needs 2 to " + std::to_string(kMaxPlayers) + " participants");
    if (names.size() != controllers.size()) throw ContractViolation("run_match: names and controllers differ in length");
    if (duration == 0) throw ConfigError("match duration must be positive");

    ScenarioConfig cfg = config;
    cfg.players = n;
    cfg.bots.clear();
    cfg.seed = seed;
    auto grid = std::make_shared<const MapGrid>(parse_map(cfg.map_text));
    WorldState world = make_world(grid, n, seed, cfg.rules());
    std::optional<ReplayWriter> writer;
    if (replay_path) writer.emplace(*replay_path, make_replay_header(cfg, n, seed));

    std::vector<Action> actions(static_cast<std::size_t>(n));
    for (std::uint32_t t = 0; t < duration; ++t) {
        for (int slot = 0; slot < n; ++slot) actions[static_cast<std::size_t>(slot)] = controllers[static_cast<std::size_t>(slot)](world, slot);
        step(world, actions);
        if (writer) writer->record(actions, world);
    }
    if (writer) writer->finish(world);
    MatchOutcome out;
    out.stats = match_stats(world, names);
    out.final_hash = state_hash(world);
    return out;
}

TournamentResult run_tournament(const TournamentOptions& options, const std::function<void(int, const MatchStats&)>& progress) {
    ScheduleParams params = options.schedule;
    params.players = static_cast<int>(options.entrants.size());
    check_schedule(params);
    std::filesystem::create_directories(options.out_dir);

    std::vector<std::string> roster;
    for (const auto& e : options.entrants) roster.push_back(e.name);
    for (std::size_t i = 0; i < roster.size(); ++i)
        for (std::size_t j = i + 1; j < roster.size(); ++j)
            if (roster[i] == roster[j]) throw ConfigError("duplicate entrant name '" + roster[i] + "'");

    TournamentResult result;
    result.schedule.capacity = params.capacity;
    result.schedule.phase_boundary = params.players > params.capacity ? static_cast<std::size_t>(std::min(params.players, params.matches)) : 0;
    std::vector<Standing> standings(roster.size());

    for (int m = 0; m < params.matches; ++m) {
        const std::vector<int> ids = match_participants(params, m, standings);
        result.schedule.matches.push_back(ids);
        const std::uint64_t match_seed = options.seed + static_cast<std::uint64_t>(m);
        std::vector<std::string> names;
        std::vector<Controller> controllers;
        for (std::size_t slot = 0; slot < ids.size(); ++slot) {
            const Entrant& e = options.entrants[static_cast<std::size_t>(ids[slot])];
            names.push_back(e.name);
            auto bot = std::make_shared<Bot>(e.bot, match_seed, static_cast<int>(slot));
            controllers.push_back([bot](const WorldState& w, int s) { return bot->act(w, s); });
        }
        log::info("match {}: {} players, seed {}", m + 1, ids.size(), match_seed);
        MatchOutcome outcome = run_match(options.config, names, std::move(controllers), match_seed, options.duration,
                                         options.out_dir / match_file(m, "vzr"));
        write_text(options.out_dir / match_file(m, "csv"), emit_csv(outcome.stats.players));
        for (std::size_t slot = 0; slot < ids.size(); ++slot) {
            Standing& s = standings[static_cast<std::size_t>(ids[slot])];
            s.frags += outcome.stats.players[slot].frags;
            s.deaths += outcome.stats.players[slot].counters.deaths;
        }
        if (progress) progress(m, outcome.stats);
        result.matches.push_back(std::move(outcome.stats));
    }
    result.totals = total_stats(result.matches, roster);
    write_text(options.out_dir / "summary.csv", emit_csv(result.totals));
    write_text(options.out_dir / "summary.md", emit_markdown(result.matches, roster));
    return result;
}

}  // namespace pixelarena
