#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "pixelarena/tournament.hpp"

namespace pixelarena {

namespace {

// Tenths of a percent, rounded half up.
double percent_1dp(std::uint32_t part, std::uint32_t whole) {
    if (whole == 0) return 0;
    const std::uint64_t tenths = (std::uint64_t{part} * 1000 + whole / 2) / whole;
    return static_cast<double>(tenths) / 10.0;
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

Counters& operator+=(Counters& a, const Counters& b) {
    a.kills += b.kills;
    a.suicides += b.suicides;
    a.deaths += b.deaths;
    a.attacks += b.attacks;
    a.attacks_visible += b.attacks_visible;
    a.attacks_damaging += b.attacks_damaging;
    a.hits_taken += b.hits_taken;
    a.damage_taken_hp += b.damage_taken_hp;
    a.picked_ammo += b.picked_ammo;
    a.picked_medikits += b.picked_medikits;
    a.picked_armors += b.picked_armors;
    a.alive_tics += b.alive_tics;
    a.distance_raw += b.distance_raw;
    return a;
}

}  // namespace

std::int64_t frags(std::uint32_t kills, std::uint32_t suicides) {
    return static_cast<std::int64_t>(kills) - static_cast<std::int64_t>(suicides);
}

double fd_ratio(std::int64_t frags, std::uint32_t deaths) {
    const std::int64_t d = std::max<std::int64_t>(deaths, 1);
    // Integer division truncates toward zero, as the published tables do.
    return static_cast<double>(frags * 100 / d) / 100.0;
}

double avg_speed_kmh(double distance_units, std::uint32_t alive_tics) {
    if (alive_tics == 0) return 0;
    return distance_units * kTicRate / alive_tics * (3.0 / 128.0) * 3.6;
}

Precisions precisions(const Counters& c) {
    return Precisions{percent_1dp(c.attacks_damaging, c.attacks), percent_1dp(c.attacks_visible, c.attacks)};
}

PlayerStats derive_stats(const std::string& name, const Counters& counters) {
    PlayerStats s;
    s.name = name;
    s.counters = counters;
    s.frags = frags(counters.kills, counters.suicides);
    s.fd_ratio = fd_ratio(s.frags, counters.deaths);
    s.avg_speed_kmh = avg_speed_kmh(counters.distance_units(), counters.alive_tics);
    const Precisions p = precisions(counters);
    s.shooting_precision = p.shooting;
    s.detection_precision = p.detection;
    return s;
}

MatchStats match_stats(const WorldState& world, std::span<const std::string> names) {
    MatchStats m;
    m.final_tic = world.tic;
    for (std::size_t i = 0; i < world.counters.size(); ++i)
        m.players.push_back(derive_stats(i < names.size() ? names[i] : "player" + std::to_string(i), world.counters[i]));
    return m;
}

std::vector<PlayerStats> ranked(std::vector<PlayerStats> players) {
    std::stable_sort(players.begin(), players.end(), [](const PlayerStats& a, const PlayerStats& b) {
        if (a.frags != b.frags) return a.frags > b.frags;
        if (a.fd_ratio != b.fd_ratio) return a.fd_ratio > b.fd_ratio;
        return a.name < b.name;
    });
    return players;
}

std::string emit_csv(std::span<const PlayerStats> players) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    int place = 1;
    for (const auto& p : ranked({players.begin(), players.end()})) {
        const Counters& c = p.counters;
        out << place++ << ',' << p.name << ',' << p.frags << ',' << fixed(p.fd_ratio, 2) << ',' << c.kills << ','
            << c.suicides << ',' << c.deaths << ',' << fixed(p.avg_speed_kmh, 2) << ',' << c.attacks << ','
            << fixed(p.shooting_precision, 1) << ',' << fixed(p.detection_precision, 1) << ',' << c.hits_taken << ','
            << c.damage_taken_hp << ',' << c.picked_ammo << ',' << c.picked_medikits << ',' << c.picked_armors << '\n';
    }
    return out.str();
}

std::vector<PlayerStats> total_stats(std::span<const MatchStats> matches, std::span<const std::string> roster) {
    std::vector<PlayerStats> totals;
    for (const auto& name : roster) {
        Counters sum;
        for (const auto& m : matches)
            for (const auto& p : m.players)
                if (p.name == name) sum += p.counters;
        totals.push_back(derive_stats(name, sum));
    }
    return ranked(std::move(totals));
}

std::string emit_markdown(std::span<const MatchStats> matches, std::span<const std::string> roster) {
    std::ostringstream out;
    const auto totals = total_stats(matches, roster);
    out << "## Totals\n\n";
    out << "| Place | Bot | Frags | F/D | Kills | Suicides | Deaths | Avg speed (km/h) | Attacks | Shooting % | Detection % "
           "| Hits taken | Damage taken | Ammo | Medikits | Armors |\n";
    out << "|---|---|---|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
    int place = 1;
    for (const auto& p : totals) {
        const Counters& c = p.counters;
        out << "| " << place++ << " | " << p.name << " | " << p.frags << " | " << fixed(p.fd_ratio, 2) << " | " << c.kills
            << " | " << c.suicides << " | " << c.deaths << " | " << fixed(p.avg_speed_kmh, 2) << " | " << c.attacks << " | "
            << fixed(p.shooting_precision, 1) << " | " << fixed(p.detection_precision, 1) << " | " << c.hits_taken << " | "
            << c.damage_taken_hp << " | " << c.picked_ammo << " | " << c.picked_medikits << " | " << c.picked_armors << " |\n";
    }
    out << "\n## Frags per match\n\n| Bot |";
    for (std::size_t i = 0; i < matches.size(); ++i) out << ' ' << i + 1 << " |";
    out << " Total |\n|---|";
    for (std::size_t i = 0; i <= matches.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& p : totals) {
        out << "| " << p.name << " |";
        for (const auto& m : matches) {
            const auto it = std::find_if(m.players.begin(), m.players.end(), [&](const PlayerStats& s) { return s.name == p.name; });
            if (it == m.players.end()) out << " - |";
            else out << ' ' << it->frags << " |";
        }
        out << ' ' << p.frags << " |\n";
    }
    bool any_notes = false;
    for (std::size_t i = 0; i < matches.size(); ++i)
        for (const auto& note : matches[i].notes) {
            if (!any_notes) out << "\n## Notes\n\n";
            any_notes = true;
            out << "- match " << i + 1 << ": " << note << '\n';
        }
    return out.str();
}

}  // namespace pixelarena
