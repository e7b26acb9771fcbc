#include <algorithm>
#include <numeric>

#include "pixelarena/tournament.hpp"

namespace pixelarena {

void check_schedule(const ScheduleParams& p) {
    if (p.players < 2) throw ConfigError("schedule needs at least 2 players");
    if (p.capacity < 2) throw ConfigError("schedule needs capacity of at least 2");
    if (p.matches < 1) throw ConfigError("schedule needs at least one match");
    if (p.worst_exclude < 0) throw ConfigError("worst_exclude must not be negative");
    if (p.players > p.capacity && p.players - p.worst_exclude > p.capacity)
        throw ConfigError("infeasible schedule: " + std::to_string(p.players) + " players minus " +
                          std::to_string(p.worst_exclude) + " excluded exceeds capacity " + std::to_string(p.capacity));
    if (p.players > p.capacity && p.worst_exclude >= p.players) throw ConfigError("worst_exclude leaves nobody to play");
}

std::vector<int> worst_players(std::span<const Standing> standings, int count) {
    std::vector<int> ids(standings.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        const Standing& sa = standings[static_cast<std::size_t>(a)];
        const Standing& sb = standings[static_cast<std::size_t>(b)];
        if (sa.frags != sb.frags) return sa.frags < sb.frags;
        if (sa.deaths != sb.deaths) return sa.deaths > sb.deaths;
        return a > b;
    });
    ids.resize(std::min<std::size_t>(ids.size(), static_cast<std::size_t>(std::max(count, 0))));
    return ids;
}

std::vector<int> match_participants(const ScheduleParams& p, int index, std::span<const Standing> standings) {
    check_schedule(p);
    std::vector<int> excluded;
    if (p.players > p.capacity) {
        const int k = p.players - p.capacity;
        if (index < p.players) {
            // k players sit out per match, rotating; for k = 1 player i sits out match i.
            for (int j = 0; j < k; ++j) excluded.push_back((index * k + j) % p.players);
        } else {
            std::vector<Standing> s(standings.begin(), standings.end());
            s.resize(static_cast<std::size_t>(p.players));
            excluded = worst_players(s, p.worst_exclude);
        }
    }
    std::vector<int> in;
    for (int id = 0; id < p.players; ++id)
        if (std::find(excluded.begin(), excluded.end(), id) == excluded.end()) in.push_back(id);
    return in;
}

MatchSchedule schedule(const ScheduleParams& p, std::span<const Standing> standings) {
    check_schedule(p);
    MatchSchedule s;
    s.capacity = p.capacity;
    s.phase_boundary = p.players > p.capacity ? static_cast<std::size_t>(std::min(p.players, p.matches)) : 0;
    for (int i = 0; i < p.matches; ++i) s.matches.push_back(match_participants(p, i, standings));
    return s;
}

}  // namespace pixelarena
