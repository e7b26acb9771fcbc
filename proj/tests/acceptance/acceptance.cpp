// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any failed. Tolerances are pinned here.

#include <fcntl.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "pixelarena/bots.hpp"
#include "pixelarena/channel.hpp"
#include "pixelarena/env.hpp"
#include "pixelarena/lockstep.hpp"
#include "pixelarena/log.hpp"
#include "pixelarena/protocol.hpp"
#include "pixelarena/render.hpp"
#include "pixelarena/replay.hpp"
#include "pixelarena/tournament.hpp"

using namespace pixelarena;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kDeterminismBudgetS = 120;
constexpr double kFdTolerance = 0.005;
constexpr double kSpeedTarget = 29.53;
constexpr double kSpeedTolerance = 0.01;
constexpr double kDdaToleranceCells = 0.02;
constexpr double kFps320 = 2000;
constexpr double kFps160 = 5000;
constexpr long kRssLimitKb = 64 * 1024;
constexpr double kPerformanceBudgetS = 60;
constexpr double kPacingTolerance = 0.01;

struct Result {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

Vec2 at_units(double x, double y) {
    return Vec2{Fixed::from_raw(static_cast<std::int32_t>(x * Fixed::kOne)), Fixed::from_raw(static_cast<std::int32_t>(y * Fixed::kOne))};
}

WorldState world_of(std::string_view map, int players, std::uint64_t seed = 1, const MatchRules& rules = {},
                    const SimConstants& constants = {}) {
    return make_world(std::make_shared<const MapGrid>(parse_map(map)), players, seed, rules, constants);
}

constexpr std::string_view kCorridor =
    "##################################################\n"
    "#S..............................................S#\n"
    "##################################################\n";

// ---------------------------------------------------------------------------

Result determinism() {
    const auto t0 = Clock::now();
    const auto dir = std::filesystem::temp_directory_path() / "pa_acceptance_replays";
    std::filesystem::create_directories(dir);
    std::mt19937_64 gen(2016);
    const ScenarioConfig base = default_config();
    std::uint64_t tics = 0;
    int mismatched_hashes = 0, mismatched_stats = 0, matches = 0;
    std::uint64_t kills = 0;
    for (int m = 0; m < 50; ++m) {
        const int players = 2 + static_cast<int>(gen() % 7);
        const std::uint32_t duration = 5000 + static_cast<std::uint32_t>(gen() % 1000);
        const std::uint64_t seed = gen();
        ScenarioConfig cfg = base;
        cfg.players = players;
        cfg.seed = seed;
        WorldState world = make_world(std::make_shared<const MapGrid>(parse_map(cfg.map_text)), players, seed, cfg.rules());
        std::vector<Bot> bots;
        for (int s = 0; s < players; ++s) bots.emplace_back(gen() % 3 ? BotKind::fighter : BotKind::wanderer, gen());

        const auto path = dir / fmt("match_%02d.vzr", m);
        std::vector<std::uint64_t> hashes;
        {
            ReplayWriter writer(path, make_replay_header(cfg, players, seed));
            std::vector<Action> actions(static_cast<std::size_t>(players));
            for (std::uint32_t t = 0; t < duration; ++t) {
                for (int s = 0; s < players; ++s) actions[static_cast<std::size_t>(s)] = bots[static_cast<std::size_t>(s)].act(world, s);
                step(world, actions);
                writer.record(actions, world);
                hashes.push_back(state_hash(world));
            }
            writer.finish(world);
        }
        const std::vector<std::string> names(static_cast<std::size_t>(players), "bot");
        const MatchStats original = match_stats(world, names);

        const ReplayData data = read_replay(path);
        const WorldState replayed = play_replay(data, [&](const WorldState& w, std::span<const Action>, std::span<const Event>) {
            if (state_hash(w) != hashes[w.tic - 1]) ++mismatched_hashes;
        });
        const MatchStats again = match_stats(replayed, names);
        for (const auto& p : original.players) kills += p.counters.kills;
        for (std::size_t i = 0; i < original.players.size(); ++i)
            if (!(original.players[i].counters == again.players[i].counters)) ++mismatched_stats;
        tics += duration;
        ++matches;
        std::filesystem::remove(path);
    }
    const double s = seconds_since(t0);
    const bool pass = matches == 50 && kills > 0 && mismatched_hashes == 0 && mismatched_stats == 0 && s < kDeterminismBudgetS;
    return {pass, fmt("%d matches, %llu tics, %llu kills, %d hash mismatches, %d stat mismatches, %.1f s (limit %.0f s)", matches,
                      static_cast<unsigned long long>(tics), static_cast<unsigned long long>(kills), mismatched_hashes, mismatched_stats, s, kDeterminismBudgetS)};
}

// ---------------------------------------------------------------------------

Result frag_oracle() {
    struct Row {
        const char* bot;
        std::int64_t frags;
        double fd;
        std::uint32_t kills, suicides, deaths;
    };
    const Row rows[] = {
        {"F1", 559, 1.35, 597, 38, 413},          {"Arnold", 413, 1.90, 532, 119, 217},
        {"Clyde", 393, 0.77, 476, 83, 509},       {"TUHO", 312, 0.67, 424, 112, 465},
        {"5vision", 142, 0.28, 206, 64, 497},     {"ColbyMules", 131, 0.25, 222, 91, 516},
        {"AbyssII", 118, 0.21, 217, 99, 542},     {"WallDestroyerXxx", -130, -0.41, 13, 143, 315},
        {"Ivomi", -578, -0.68, 149, 727, 838},
    };
    int ok = 0;
    std::string bad;
    for (const auto& r : rows) {
        Counters c;
        c.kills = r.kills;
        c.suicides = r.suicides;
        c.deaths = r.deaths;
        const PlayerStats s = derive_stats(r.bot, c);
        if (s.frags == r.frags && std::abs(s.fd_ratio - r.fd) <= kFdTolerance) ++ok;
        else bad += fmt(" %s(%lld,%.2f)", r.bot, static_cast<long long>(s.frags), s.fd_ratio);
    }
    return {ok == 9, fmt("%d/9 rows match (frags exact, F/D within %.3f)", ok, kFdTolerance) + bad};
}

// ---------------------------------------------------------------------------

Result scheduler() {
    const ScheduleParams p{9, 8, 12, 2};
    std::mt19937_64 gen(9);
    int trials = 0, failures = 0;
    for (int trial = 0; trial < 1000; ++trial, ++trials) {
        // Cumulative standings evolve as the first phase is played.
        std::vector<Standing> standings(9);
        std::vector<int> excluded(9);
        bool ok = true;
        for (int m = 0; m < 12; ++m) {
            const auto in = match_participants(p, m, standings);
            std::set<int> out;
            for (int id = 0; id < 9; ++id)
                if (std::find(in.begin(), in.end(), id) == in.end()) out.insert(id);
            if (m < 9) {
                ok = ok && in.size() == 8 && out == std::set<int>{m};
                for (int id : out) ++excluded[static_cast<std::size_t>(id)];
            } else {
                // Independent oracle: sort by (frags asc, deaths desc, id desc).
                std::vector<int> ids{0, 1, 2, 3, 4, 5, 6, 7, 8};
                std::sort(ids.begin(), ids.end(), [&](int a, int b) {
                    const auto& sa = standings[static_cast<std::size_t>(a)];
                    const auto& sb = standings[static_cast<std::size_t>(b)];
                    return std::tuple(sa.frags, -static_cast<std::int64_t>(sa.deaths), -a) <
                           std::tuple(sb.frags, -static_cast<std::int64_t>(sb.deaths), -b);
                });
                ok = ok && in.size() == 7 && out == std::set<int>{ids[0], ids[1]};
            }
            for (int id : in) {
                // Small frag ranges force ties.
                standings[static_cast<std::size_t>(id)].frags += static_cast<std::int64_t>(gen() % 4) - 1;
                standings[static_cast<std::size_t>(id)].deaths += static_cast<std::uint32_t>(gen() % 3);
            }
        }
        for (int n : excluded) ok = ok && n == 1;
        if (!ok) ++failures;
    }
    const MatchSchedule s = schedule(p);
    const bool shape = s.matches.size() == 12 && s.phase_boundary == 9;
    return {failures == 0 && shape,
            fmt("%d/%d randomized standings: matches 1-9 exclude player i once, 10-12 exclude the 2 lowest-ranked", trials - failures,
                trials)};
}

// ---------------------------------------------------------------------------

Result rules_timing() {
    // Protection: probe damage at every tic after a respawn.
    WorldState w = world_of(kCorridor, 2);
    w.tic = 500;
    resolve_damage(w, DamageEvent{std::nullopt, 1, 0, 500});
    std::vector<Action> acts(2);
    acts[0].buttons = kRespawnRequestBit;
    std::uint32_t respawn_tic = 0;
    for (int i = 0; i < 5 && !w.actors[0].alive; ++i) {
        respawn_tic = w.tic;
        step(w, acts);
    }
    int blocked = 0, first_hit = -1;
    for (std::uint32_t dt = 0; dt < 100; ++dt) {
        WorldState probe = w;
        probe.tic = respawn_tic + dt;
        if (resolve_damage(probe, DamageEvent{std::nullopt, 1, 0, 5}).empty()) ++blocked;
        else if (first_hit < 0) first_hit = static_cast<int>(dt);
    }

    // 2017 delay: request a respawn every tic after dying.
    MatchRules rules2017;
    rules2017.respawn_delay = 350;
    WorldState d = world_of(kCorridor, 2, 1, rules2017);
    d.tic = 1000;
    resolve_damage(d, DamageEvent{std::nullopt, 1, 0, 500});
    const std::uint32_t death = d.tic;
    std::uint32_t revived = 0;
    while (!d.actors[0].alive && d.tic < death + 1000) {
        revived = d.tic;
        step(d, acts);
    }

    // Ten-minute match through the environment.
    ScenarioConfig cfg = default_config();
    cfg.episode_timeout = kTenMinuteMatchTics;
    cfg.available_buttons = {Button::attack};
    Env env(cfg);
    std::uint32_t finished_at = 0;
    bool early = false;
    while (!env.is_episode_finished()) {
        env.make_action({0.0});
        if (env.tic() < kTenMinuteMatchTics && env.is_episode_finished()) early = true;
    }
    finished_at = env.tic();

    const bool pass = blocked == 70 && first_hit == 70 && revived == death + 350 && finished_at == 21000 && !early;
    return {pass, fmt("protection blocks %d tics (first hit at +%d); death at %u respawns at %u (+%u); episode ends at tic %u",
                      blocked, first_hit, death, revived, revived - death, finished_at)};
}

// ---------------------------------------------------------------------------

Result statistics() {
    constexpr std::string_view kRoom =
        "##############\n"
        "#S...........#\n"
        "#............#\n"
        "#....#..#....#\n"
        "#............#\n"
        "#...........S#\n"
        "##############\n";
    WorldState w = world_of(kRoom, 2, 60);
    Bot fighter(BotKind::fighter, 60);
    std::uint32_t blind_attacks = 0, blind_visible = 0;
    std::set<std::uint32_t> blind_damaging, fighter_damaging;
    std::uint32_t fighter_attacks = 0, fighter_visible = 0;
    std::map<std::uint32_t, int> owner;
    for (std::uint32_t t = 0; t < 60 * kTicRate; ++t) {
        Action blind;
        blind.turn_delta = 700;  // spins while firing
        blind.press(ButtonBit::attack);
        if (!w.actors[1].alive) blind.buttons |= kRespawnRequestBit;
        const std::vector<Action> acts{fighter.act(w, 0), blind};
        for (const auto& ev : step(w, acts)) {
            if (const auto* a = std::get_if<AttackEvent>(&ev)) {
                owner[a->attack_id] = a->attacker;
                (a->attacker == 1 ? blind_attacks : fighter_attacks)++;
                if (a->enemy_visible) (a->attacker == 1 ? blind_visible : fighter_visible)++;
            } else if (const auto* d = std::get_if<DamageEvent>(&ev)) {
                if (d->attacker && d->attack_id && *d->attacker != d->victim)
                    (*d->attacker == 1 ? blind_damaging : fighter_damaging).insert(*d->attack_id);
            }
        }
    }
    const std::vector<std::string> names{"fighter", "blind"};
    const MatchStats ms = match_stats(w, names);
    auto pct = [](std::uint32_t part, std::uint32_t whole) { return whole ? std::round(part * 1000.0 / whole) / 10.0 : 0.0; };
    const PlayerStats& f = ms.players[0];
    const PlayerStats& b = ms.players[1];
    const bool fighter_ok = f.counters.attacks > 0 && f.detection_precision == 100.0 && f.counters.attacks == fighter_attacks &&
                            f.counters.attacks_damaging == fighter_damaging.size();
    const bool blind_ok = b.counters.attacks == blind_attacks && b.counters.attacks_visible == blind_visible &&
                          b.counters.attacks_damaging == blind_damaging.size() &&
                          b.detection_precision == pct(blind_visible, blind_attacks) &&
                          b.shooting_precision == pct(static_cast<std::uint32_t>(blind_damaging.size()), blind_attacks) &&
                          blind_visible < blind_attacks;

    // Rocket: the blast lands tics after the attack and still credits it.
    MatchRules rules;
    rules.loadout = Loadout{true, Weapon::rocket_launcher, 0, 10};
    WorldState r = world_of(kCorridor, 2, 1, rules);
    r.actors[0].pos = at_units(192, 192);
    r.actors[1].pos = at_units(992, 192);
    r.actors[0].angle = Angle{};
    std::vector<Action> acts(2);
    acts[0].press(ButtonBit::attack);
    std::uint32_t fired_id = 0, credited_id = 0, fire_tic = 0, hit_tic = 0;
    std::uint32_t damaging_at_fire = 99;
    for (int t = 0; t < 60 && !credited_id; ++t) {
        for (const auto& ev : step(r, acts)) {
            if (const auto* a = std::get_if<AttackEvent>(&ev); a && !fired_id) {
                fired_id = a->attack_id;
                fire_tic = r.tic;
            }
            if (const auto* d = std::get_if<DamageEvent>(&ev); d && d->victim == 1 && d->attack_id) {
                credited_id = *d->attack_id;
                hit_tic = r.tic;
            }
        }
        if (fire_tic == r.tic) damaging_at_fire = r.counters[0].attacks_damaging;
        acts[0] = Action{};
    }
    const double after_hit = precisions(r.counters[0]).shooting;
    // Second rocket into the far wall, with the target out of the way.
    r.actors[0].pos = at_units(1200, 192);
    r.actors[0].angle = Angle::from_degrees(180);
    r.actors[1].pos = at_units(6000, 192);
    for (int t = 0; t < 40; ++t) step(r, acts);
    acts[0].press(ButtonBit::attack);
    step(r, acts);
    acts[0] = Action{};
    for (int t = 0; t < 60; ++t) step(r, acts);
    const Precisions rp = precisions(r.counters[0]);
    const bool rocket_ok = fired_id != 0 && credited_id == fired_id && hit_tic > fire_tic && damaging_at_fire == 0 &&
                           after_hit == 100.0 && r.counters[0].attacks == 2 && r.counters[0].attacks_damaging == 1 && rp.shooting == 50.0;

    std::ostringstream d;
    d << fmt("fighter detection %.1f (%u/%u attacks); blind bot emitted %.1f/%.1f vs hand-counted %u visible, %zu damaging of %u; ",
             f.detection_precision, f.counters.attacks_visible, f.counters.attacks, b.detection_precision, b.shooting_precision,
             blind_visible, blind_damaging.size(), blind_attacks)
      << fmt("rocket fired tic %u hit tic %u credited to attack %u (shooting %.1f, then %.1f after a miss)", fire_tic, hit_tic,
             credited_id, after_hit, rp.shooting);
    return {fighter_ok && blind_ok && rocket_ok, d.str()};
}

// ---------------------------------------------------------------------------

Result speed() {
    ScenarioConfig cfg = default_config();
    cfg.map_text = std::string(kCorridor);
    std::vector<Controller> c{[](const WorldState&, int) {
                                  Action a;
                                  a.press(ButtonBit::move_forward);
                                  return a;
                              },
                              [](const WorldState&, int) { return Action{}; }};
    const std::vector<std::string> names{"runner", "idle"};
    const MatchOutcome o = run_match(cfg, names, c, 1, 140);
    const double v = o.stats.players[0].avg_speed_kmh;
    return {std::abs(v - kSpeedTarget) <= kSpeedTolerance,
            fmt("runner at 10 units/tic reports %.5f km/h (target %.2f +- %.2f)", v, kSpeedTarget, kSpeedTolerance)};
}

// ---------------------------------------------------------------------------

// Perpendicular distance in cells from brute-force marching in 0.01-cell
// steps; a step that crosses a cell corner is resampled finely.
double march_cells(const MapGrid& g, double x, double y, double angle, int column, int width) {
    const double dx = std::cos(angle), dy = std::sin(angle);
    const double cam = (2.0 * column + 1 - width) / width;
    double rx = dx - dy * cam, ry = dy + dx * cam;
    const double len = std::hypot(rx, ry);
    rx /= len;
    ry /= len;
    const double px = x / 128, py = y / 128;
    auto cell = [&](double t) {
        return std::pair{static_cast<int>(std::floor(px + rx * t)), static_cast<int>(std::floor(py + ry * t))};
    };
    auto prev = cell(0);
    for (double t = 0.01;; t += 0.01) {
        const auto c = cell(t);
        if (c.first != prev.first && c.second != prev.second)
            for (double u = t - 0.01; u < t; u += 1e-6) {
                const auto f = cell(u);
                if (g.is_wall(f.first, f.second)) return u * (rx * dx + ry * dy);
            }
        if (g.is_wall(c.first, c.second)) return t * (rx * dx + ry * dy);
        prev = c;
    }
}

Vec2 random_floor(const MapGrid& g, std::mt19937_64& gen) {
    for (;;) {
        const int x = static_cast<int>(gen() % static_cast<unsigned>(g.width));
        const int y = static_cast<int>(gen() % static_cast<unsigned>(g.height));
        if (g.is_wall(x, y)) continue;
        std::uniform_real_distribution<double> off(-40, 40);
        return at_units(x * 128 + 64 + off(gen), y * 128 + 64 + off(gen));
    }
}

Result renderer() {
    const ScenarioConfig cfg = default_config();
    const MapGrid g = parse_map(cfg.map_text);
    std::mt19937_64 gen(10000);
    constexpr int kPoses = 10000;
    constexpr int kWidth = 320;
    double worst = 0;
    long rays = 0;
    for (int i = 0; i < kPoses; ++i) {
        const Vec2 p = random_floor(g, gen);
        const double angle = std::uniform_real_distribution<double>(0, 2 * std::numbers::pi)(gen);
        // Both edges, the centre and random columns.
        for (int column : {0, kWidth - 1, kWidth / 2, static_cast<int>(gen() % kWidth), static_cast<int>(gen() % kWidth)}) {
            const double dda = cast_column(g, p.x.to_double(), p.y.to_double(), angle, column, kWidth).distance / 128;
            worst = std::max(worst, std::abs(dda - march_cells(g, p.x.to_double(), p.y.to_double(), angle, column, kWidth)));
            ++rays;
        }
    }

    // Facing a flat wall squarely from several distances. The room is 9 cells
    // tall, so the wall in front fills the view up to 4 cells away.
    const std::string room = [] {
        std::string m = std::string(12, '#') + "\n";
        for (int row = 0; row < 9; ++row) m += "#" + std::string(10, row == 4 ? 'S' : '.') + "#\n";
        return m + std::string(12, '#') + "\n";
    }();
    int asymmetric = 0;
    WorldState flat = world_of(room, 1);
    for (int cells = 1; cells <= 4; ++cells) {
        flat.actors[0].pos = at_units(11 * 128 - cells * 128 + 0.0, 5 * 128 + 64);
        flat.actors[0].angle = Angle{};
        for (int width : {160, 161, 320, 640}) {
            RenderOptions o;
            o.width = width;
            o.height = 120;
            const FrameBundle f = render_frame(flat, 0, o);
            for (int c = 0; c < width; ++c) {
                const double a = f.column_distance[static_cast<std::size_t>(c)];
                const double b = f.column_distance[static_cast<std::size_t>(width - 1 - c)];
                if (std::abs(a - b) > 1e-9 * a || a < f.column_distance[static_cast<std::size_t>(width / 2)] - 1e-9) ++asymmetric;
            }
        }
    }

    // Labels never sit behind the column's wall.
    WorldState w = make_world(std::make_shared<const MapGrid>(g), 8, 3);
    int violations = 0;
    long labelled = 0;
    for (int frame = 0; frame < 100; ++frame) {
        for (auto& a : w.actors) {
            a.pos = random_floor(g, gen);
            a.angle = Angle{static_cast<std::uint32_t>(gen())};
        }
        RenderOptions o;
        o.depth_enabled = o.labels_enabled = true;
        const FrameBundle f = render_frame(w, frame % 8, o);
        for (int y = 0; y < f.height; ++y)
            for (int x = 0; x < f.width; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * f.width + x;
                if (!(*f.labels)[i]) continue;
                ++labelled;
                if ((*f.depth)[i] >= quantize_depth(f.column_distance[static_cast<std::size_t>(x)])) ++violations;
            }
    }
    const bool pass = worst <= kDdaToleranceCells && asymmetric == 0 && violations == 0 && labelled > 0;
    return {pass, fmt("%d poses / %ld rays: worst DDA error %.4f cells (limit %.2f); %d asymmetric columns; "
                      "%d label-depth violations in %ld labelled pixels over 100 frames",
                      kPoses, rays, worst, kDdaToleranceCells, asymmetric, violations, labelled)};
}

// ---------------------------------------------------------------------------

// Peak RSS of a child process rendering every buffer, in kB.
long child_peak_rss_kb(const std::string& cli) {
    const pid_t pid = fork();
    if (pid == 0) {
        const int null = open("/dev/null", O_WRONLY);
        if (null >= 0) dup2(null, STDOUT_FILENO);
        execl(cli.c_str(), cli.c_str(), "bench", "--resolution", "320x240", "--tics", "500", "--buffers",
              "screen,depth,labels,automap", static_cast<char*>(nullptr));
        _exit(127);
    }
    if (pid < 0) return -1;
    int status = 0;
    rusage usage{};
    if (wait4(pid, &status, 0, &usage) < 0 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) return -1;
    return usage.ru_maxrss;
}

Result performance(const std::string& cli) {
    const auto t0 = Clock::now();
    RenderOptions o;
    o.width = 320;
    o.height = 240;
    const BenchReport big = bench(o, 3000);
    o.width = 160;
    o.height = 120;
    const BenchReport small = bench(o, 6000);
    const long rss = child_peak_rss_kb(cli);
    const double s = seconds_since(t0);
    const bool pass = big.fps >= kFps320 && small.fps >= kFps160 && rss > 0 && rss < kRssLimitKb && s < kPerformanceBudgetS;
    return {pass, fmt("single thread: 320x240 %.0f fps (min %.0f), 160x120 %.0f fps (min %.0f); instance peak RSS %.1f MB "
                      "(limit %ld MB); %.1f s",
                      big.fps, kFps320, small.fps, kFps160, rss / 1024.0, kRssLimitKb / 1024, s)};
}

// ---------------------------------------------------------------------------

Result async_pacing() {
    const auto path = std::filesystem::temp_directory_path() / "pa_acceptance_async.vzr";
    constexpr std::uint32_t kTics = 60 * kTicRate;
    HostOptions ho;
    ho.config = default_config();
    ho.config.players = 2;
    ho.async = true;
    ho.replay_path = path;
    std::vector<SlotConfig> slots(2);
    auto bot = std::make_shared<Bot>(BotKind::fighter, 1);
    slots[0].controller = [bot](const WorldState& w, int s) { return bot->act(w, s); };
    slots[1].kind = SlotConfig::Kind::remote;
    LockstepHost host(ho, slots);

    auto [host_end, client_end] = memory_channel_pair();
    std::thread client([ch = std::move(client_end)]() mutable {
        LockstepClient c(std::move(ch), ClientOptions{.name = "slow"});
        Action a;
        a.press(ButtonBit::turn_left);
        while (true) {
            // Every 5 s it stalls for 150 ms, about 5 tics.
            if (c.world().tic % 175 == 100) std::this_thread::sleep_for(std::chrono::milliseconds(150));
            c.submit(a);
            if (!c.advance(std::chrono::seconds(5))) break;
        }
    });
    if (!host.admit(std::move(host_end))) {
        client.join();
        return {false, "client could not join"};
    }
    for (std::uint32_t t = 0; t < kTics; ++t) host.advance();
    const double elapsed = seconds_since(host.started_at());
    host.finish();
    client.join();

    const ReplayData data = read_replay(path);
    std::uint32_t empty = 0;
    for (const auto& tic : data.tics)
        if (tic[1] == Action{}) ++empty;
    std::filesystem::remove(path);
    const double hz = kTics / elapsed;
    const std::uint32_t missed = host.missed_tics()[1];
    const bool pass = std::abs(hz - kTicRate) <= kTicRate * kPacingTolerance && missed > 0 && empty == missed;
    return {pass, fmt("%u tics in %.3f s = %.3f Hz (35 +- %.0f%%); slow client missed %u tics, %u empty actions recorded", kTics,
                      elapsed, hz, kPacingTolerance * 100, missed, empty)};
}

// ---------------------------------------------------------------------------

std::vector<std::uint8_t> random_frame(std::mt19937_64& gen) {
    const auto kind = gen() % 4;
    if (kind == 0) {
        // Arbitrary bytes.
        std::vector<std::uint8_t> b(gen() % 64);
        for (auto& x : b) x = static_cast<std::uint8_t>(gen());
        return b;
    }
    // Start from a valid frame and damage it.
    Message m;
    switch (gen() % 7) {
        case 0: m = HelloMsg{1, "player"}; break;
        case 1: m = WelcomeMsg{2, gen(), "players = 3\n", "###\n#S#\n###\n"}; break;
        case 2: m = ReadyMsg{}; break;
        case 3: m = ActionMsg{static_cast<std::uint32_t>(gen()), Action{static_cast<std::uint32_t>(gen()), 12}}; break;
        case 4: m = TicBatchMsg{static_cast<std::uint32_t>(gen()), std::vector<Action>(1 + gen() % 16)}; break;
        case 5: m = HashMsg{static_cast<std::uint32_t>(gen()), gen()}; break;
        default: m = ByeMsg{ByeReason::desync}; break;
    }
    auto f = encode(m);
    if (kind == 1) {
        for (int flips = 1 + static_cast<int>(gen() % 3); flips > 0; --flips) f[gen() % f.size()] ^= static_cast<std::uint8_t>(1u << (gen() % 8));
    } else if (kind == 2) {
        f.resize(gen() % (f.size() + 8), static_cast<std::uint8_t>(gen()));
    } else {
        f[4] = static_cast<std::uint8_t>(gen());
    }
    return f;
}

Result protocol_totality() {
    std::mt19937_64 gen(1000000);
    constexpr int kFrames = 1000000;
    std::map<ProtocolError::Code, int> codes;
    int decoded = 0, untyped = 0;
    FrameDecoder stream;
    for (int i = 0; i < kFrames; ++i) {
        const auto f = random_frame(gen);
        try {
            const Message m = decode(f);
            if (encode(m) != f) ++untyped;  // accepted frames must be canonical
            ++decoded;
        } catch (const ProtocolError& e) {
            ++codes[e.code];
        } catch (...) {
            ++untyped;
        }
        // The streaming decoder sees the same bytes; it stops at the first error.
        try {
            stream.feed(f);
            while (stream.next()) {
            }
        } catch (const ProtocolError&) {
            stream = FrameDecoder{};
        } catch (...) {
            ++untyped;
        }
    }

    // Constant perturbation on the client side.
    auto [host_end, client_end] = memory_channel_pair();
    HostOptions ho;
    ho.config = default_config();
    ho.config.players = 2;
    std::vector<SlotConfig> slots(2);
    slots[1].kind = SlotConfig::Kind::remote;
    LockstepHost host(ho, slots);
    std::thread client([ch = std::move(client_end)]() mutable {
        ClientOptions o;
        SimConstants perturbed;
        perturbed.turn_step = Angle::from_degrees(5.5);
        o.constants_override = perturbed;
        LockstepClient c(std::move(ch), o);
        Action a;
        a.press(ButtonBit::turn_left);
        while (true) {
            c.submit(a);
            if (!c.advance(std::chrono::seconds(5))) break;
        }
    });
    std::optional<Desync> caught;
    std::uint32_t at = 0;
    if (host.admit(std::move(host_end))) {
        try {
            for (int t = 0; t < 200; ++t) host.advance();
        } catch (const DesyncError& e) {
            caught = e.info;
            at = host.world().tic;
        }
    }
    client.join();
    const bool desync_ok = caught && caught->tic <= kCheckpointInterval && at <= kCheckpointInterval + 1;

    std::string dist;
    constexpr const char* kCodeNames[] = {"truncated", "bad_length", "unknown_type", "bad_payload", "order"};
    for (const auto& [code, n] : codes) dist += fmt(" %s=%d", kCodeNames[static_cast<int>(code)], n);
    return {untyped == 0 && desync_ok && decoded > 0,
            fmt("%d frames: %d decoded, %d untyped failures, typed errors:", kFrames, decoded, untyped) + dist +
                (caught ? fmt("; perturbed client caught at checkpoint tic %u (host stopped at tic %u)", caught->tic, at)
                        : std::string("; perturbed client NOT caught"))};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::vector<std::string> only;
    std::string cli = PIXELARENA_CLI_PATH;
    app.add_option("--only", only, "run only the named checks")->delimiter(',');
    app.add_option("--cli", cli, "pixelarena binary used for the memory check");
    CLI11_PARSE(app, argc, argv);
    log::logger().set_level(spdlog::level::off);

    const std::vector<std::pair<std::string, std::function<Result()>>> checks{
        {"determinism_replay", determinism},
        {"frag_oracle", frag_oracle},
        {"scheduler", scheduler},
        {"rules_timing", rules_timing},
        {"statistics_definitions", statistics},
        {"speed_conversion", speed},
        {"renderer_correctness", renderer},
        {"performance", [&] { return performance(cli); }},
        {"async_pacing", async_pacing},
        {"protocol_totality", protocol_totality},
    };
    int failed = 0;
    for (const auto& [name, check] : checks) {
        if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
        Result r;
        try {
            r = check();
        } catch (const std::exception& e) {
            r = {false, std::string("threw: ") + e.what()};
        }
        std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", name.c_str(), r.detail.c_str());
        std::fflush(stdout);
        failed += !r.pass;
    }
    return failed == 0 ? 0 : 1;
}
