#include "pixelarena/cli.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pixelarena/bots.hpp"
#include "pixelarena/lockstep.hpp"
#include "pixelarena/log.hpp"
#include "pixelarena/render.hpp"
#include "pixelarena/replay.hpp"
#include "pixelarena/tournament.hpp"
#include "pixelarena/ws_bridge.hpp"

namespace pixelarena::cli {

std::pair<int, int> parse_resolution(const std::string& text) {
    int w = 0, h = 0;
    char x = 0, extra = 0;
    std::istringstream in(text);
    if (!(in >> w >> x >> h) || (x != 'x' && x != 'X') || (in >> extra) || w < 1 || h < 1 || w > 4096 || h > 4096)
        throw std::invalid_argument("bad resolution '" + text + "', expected WxH");
    return {w, h};
}

namespace {

const std::vector<std::string> kBufferNames{"screen", "depth", "labels", "automap"};

ScenarioConfig config_from(const std::string& path) { return path.empty() ? default_config() : load_config(path); }

void apply_buffers(RenderOptions& opts, const std::vector<std::string>& buffers) {
    for (const auto& b : buffers) {
        if (b == "depth") opts.depth_enabled = true;
        else if (b == "labels") opts.labels_enabled = true;
        else if (b == "automap") opts.automap_enabled = true;
    }
}

std::vector<std::string> slot_names(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("player" + std::to_string(i));
    return names;
}

int run_host(const HostCommand& c, std::ostream& out) {
    ScenarioConfig cfg = config_from(c.config);
    if (c.players < 1 || c.players > kMaxPlayers) throw ConfigError("players must be in 1..16");
    if (static_cast<int>(c.bots.size()) + c.humans > c.players) throw ConfigError("more bots and humans than players");
    if (c.humans > 0 && !c.ws_port) throw ConfigError("--humans needs --ws-port");
    cfg.players = c.players;
    const std::uint64_t seed = c.seed.value_or(cfg.seed);

    std::unique_ptr<WsBridge> bridge;
    if (c.ws_port) {
        BridgeOptions bo;
        bo.port = *c.ws_port;
        bo.render = cfg.render;
        for (int h = 0; h < c.humans; ++h) bo.player_slots.push_back(static_cast<int>(c.bots.size()) + h);
        bridge = std::make_unique<WsBridge>(bo);
        log::info("bridge listening on port {}", bridge->port());
    }

    std::vector<SlotConfig> slots(static_cast<std::size_t>(c.players));
    std::vector<std::string> names(static_cast<std::size_t>(c.players));
    for (int s = 0; s < c.players; ++s) {
        auto& slot = slots[static_cast<std::size_t>(s)];
        if (s < static_cast<int>(c.bots.size())) {
            auto bot = std::make_shared<Bot>(parse_bot_spec(c.bots[static_cast<std::size_t>(s)]), seed, s);
            slot.controller = [bot](const WorldState& w, int id) { return bot->act(w, id); };
            slot.name = c.bots[static_cast<std::size_t>(s)] + "#" + std::to_string(s);
        } else if (s < static_cast<int>(c.bots.size()) + c.humans) {
            slot.controller = bridge->controller(s);
            slot.name = "human#" + std::to_string(s);
        } else {
            slot.kind = SlotConfig::Kind::remote;
        }
        names[static_cast<std::size_t>(s)] = slot.name;
    }

    HostOptions ho;
    ho.config = cfg;
    ho.seed = seed;
    ho.async = c.async || is_async(cfg.mode) || c.humans > 0;
    if (c.record) ho.replay_path = *c.record;
    LockstepHost host(ho, std::move(slots));

    TcpListener listener(c.port);
    std::fprintf(stderr, "listening on port %u, %d remote slot(s)\n", listener.port(), host.open_remote_slots());
    while (!host.all_joined())
        if (auto ch = listener.accept(std::chrono::seconds(1))) {
            if (auto slot = host.admit(std::move(ch))) names[static_cast<std::size_t>(*slot)] = "remote#" + std::to_string(*slot);
        }

    const std::uint32_t duration =
        c.duration.value_or(cfg.episode_timeout > 0 ? cfg.episode_timeout : kTenMinuteMatchTics);
    while (host.world().tic < duration) {
        host.advance();
        if (bridge) bridge->publish(host.world(), names);
        if (cfg.frag_limit > 0) {
            bool hit = false;
            for (const auto& k : host.world().counters) hit = hit || k.frags() >= static_cast<std::int64_t>(cfg.frag_limit);
            if (hit) break;
        }
    }
    host.finish();
    const MatchStats stats = match_stats(host.world(), names);
    out << emit_csv(ranked(stats.players));
    for (const auto& n : host.notes()) out << "# " << n << "\n";
    return 0;
}

int run_join(const JoinCommand& c, std::ostream& out) {
    ClientOptions co;
    co.name = c.name;
    LockstepClient client(tcp_connect(c.host, c.port, std::chrono::seconds(10)), co);
    const int me = client.player_id();
    const std::uint64_t seed = client.config().seed;
    Bot bot(parse_bot_spec(c.bot), seed, me);
    for (;;) {
        client.submit(bot.act(client.world(), me));
        if (!client.advance()) break;
    }
    const auto names = slot_names(static_cast<int>(client.world().actors.size()));
    const MatchStats stats = match_stats(client.world(), names);
    out << emit_csv(ranked(stats.players));
    if (client.bye() && *client.bye() != ByeReason::normal) {
        std::ostringstream msg;
        msg << "host ended the session (reason " << static_cast<int>(*client.bye()) << ")";
        throw std::runtime_error(msg.str());
    }
    return 0;
}

int run_tournament_cmd(const TournamentCommand& c, std::ostream& out) {
    if (c.bots.size() < 2) throw ConfigError("need ≥ 2 participants");
    TournamentOptions to;
    to.config = config_from(c.config);
    for (std::size_t i = 0; i < c.bots.size(); ++i) {
        const BotSpec spec = parse_bot_spec(c.bots[i]);
        to.entrants.push_back({to_string(spec.kind) + std::to_string(i + 1), spec});
    }
    to.schedule.capacity = c.capacity;
    to.schedule.matches = c.matches;
    to.schedule.worst_exclude = c.worst_exclude;
    to.duration = c.duration;
    to.seed = c.seed;
    to.out_dir = c.out;
    const auto result = run_tournament(to, [](int index, const MatchStats& m) {
        log::info("match {} finished at tic {}", index + 1, m.final_tic);
    });
    out << emit_csv(result.totals);
    return 0;
}

int run_replay(const ReplayCommand& c, std::ostream& out) {
    const ReplayData data = read_replay(c.file);
    const int players = data.header.players;
    if (c.player < 0 || c.player >= players) throw std::invalid_argument("--player out of range");
    ScenarioConfig cfg = data.header.config();
    RenderOptions opts = cfg.render;
    if (c.resolution) std::tie(opts.width, opts.height) = parse_resolution(*c.resolution);
    apply_buffers(opts, c.buffers);
    const int every = std::max(c.every, 1);

    std::filesystem::path dir(c.out);
    if (c.render) std::filesystem::create_directories(dir);
    auto file = [&](const char* kind, std::uint32_t tic, const char* ext) {
        char name[64];
        std::snprintf(name, sizeof name, "%s_%06u.%s", kind, tic, ext);
        return dir / name;
    };
    auto on_tic = [&](const WorldState& w, std::span<const Action>, std::span<const Event>) {
        if (!c.render || w.tic % static_cast<std::uint32_t>(every) != 0) return;
        const FrameBundle f = render_frame(w, c.player, opts);
        const bool rgb = f.format == ScreenFormat::rgb24;
        for (const auto& b : c.buffers) {
            if (b == "screen") write_image(file("screen", w.tic, rgb ? "ppm" : "pgm"), f.width, f.height, f.format, f.screen);
            if (b == "depth" && f.depth) write_pgm(file("depth", w.tic, "pgm"), f.width, f.height, *f.depth);
            if (b == "labels" && f.labels) write_pgm(file("labels", w.tic, "pgm"), f.width, f.height, *f.labels);
            if (b == "automap" && f.automap)
                write_image(file("automap", w.tic, rgb ? "ppm" : "pgm"), f.width, f.height, f.format, *f.automap);
        }
    };
    const bool discovery = c.render && opts.automap_enabled && !opts.automap_full;
    const WorldState final_world = play_replay(data, on_tic, discovery);
    if (c.stats) out << emit_csv(ranked(match_stats(final_world, slot_names(players)).players));
    else out << "replay ok: " << final_world.tic << " tics, final hash " << std::hex << state_hash(final_world) << std::dec << "\n";
    return 0;
}

int run_bench(const BenchCommand& c, std::ostream& out) {
    RenderOptions opts;
    std::tie(opts.width, opts.height) = parse_resolution(c.resolution);
    apply_buffers(opts, c.buffers);
    const BenchReport r = bench(opts, c.tics);
    char line[256];
    std::snprintf(line, sizeof line,
                  "resolution %dx%d frames %d fps %.1f fps_all_buffers %.1f ms_screen %.4f ms_depth %.4f ms_labels %.4f "
                  "ms_automap %.4f\n",
                  r.width, r.height, r.frames, r.fps, r.fps_all_buffers, r.ms_screen, r.ms_depth, r.ms_labels, r.ms_automap);
    out << line;
    return 0;
}

}  // namespace

Command parse_args(int argc, const char* const* argv) {
    CLI::App app{"pixelarena: headless deathmatch research platform"};
    app.require_subcommand(1);
    Command result;

    HostCommand host;
    auto* h = app.add_subcommand("host", "host a lockstep match");
    h->add_option("--config", host.config, "scenario config file");
    h->add_option("--port", host.port, "TCP port for joiners");
    h->add_option("--ws-port", host.ws_port, "websocket bridge port");
    h->add_option("--players", host.players, "player slots")->check(CLI::Range(1, 16));
    h->add_option("--humans", host.humans, "bridge player slots")->check(CLI::NonNegativeNumber);
    h->add_option("--duration", host.duration, "match length in tics");
    h->add_option("--bot", host.bots, "local bot: idle|wanderer|fighter[:seed]")->delimiter(',');
    h->add_option("--record", host.record, "replay output file");
    h->add_option("--seed", host.seed, "match seed");
    h->add_flag("--async", host.async, "real-time pacing at 35 tics/s");

    JoinCommand join;
    auto* j = app.add_subcommand("join", "join a hosted match with a built-in bot");
    j->add_option("addr", join.host, "host address[:port]")->required();
    j->add_option("--bot", join.bot, "idle|wanderer|fighter[:seed]");
    j->add_option("--name", join.name, "player name");

    TournamentCommand tour;
    auto* t = app.add_subcommand("tournament", "run a bot tournament");
    t->add_option("--config", tour.config, "scenario config file");
    t->add_option("--bots", tour.bots, "comma separated bot specs")->delimiter(',')->required();
    t->add_option("--matches", tour.matches, "number of matches")->check(CLI::PositiveNumber);
    t->add_option("--capacity", tour.capacity, "players per match")->check(CLI::PositiveNumber);
    t->add_option("--worst-exclude", tour.worst_exclude, "lowest-ranked players left out of the final matches")->check(CLI::NonNegativeNumber);
    t->add_option("--duration", tour.duration, "match length in tics")->check(CLI::PositiveNumber);
    t->add_option("--seed", tour.seed, "tournament seed");
    t->add_option("--out", tour.out, "output directory");

    ReplayCommand rep;
    auto* r = app.add_subcommand("replay", "verify, render or summarize a replay");
    r->add_option("file", rep.file, ".vzr replay file")->required();
    r->add_flag("--render", rep.render, "export frames as PPM/PGM");
    r->add_option("--resolution", rep.resolution, "WxH");
    r->add_option("--out", rep.out, "frame directory");
    r->add_flag("--stats", rep.stats, "print the summary CSV");
    r->add_option("--player", rep.player, "viewpoint slot");
    r->add_option("--every", rep.every, "export every Nth tic")->check(CLI::PositiveNumber);
    r->add_option("--buffers", rep.buffers, "screen,depth,labels,automap")
        ->delimiter(',')
        ->check(CLI::IsMember(kBufferNames));

    BenchCommand ben;
    auto* b = app.add_subcommand("bench", "single-threaded renderer benchmark");
    b->add_option("--resolution", ben.resolution, "WxH");
    b->add_option("--tics", ben.tics, "frames to render")->check(CLI::PositiveNumber);
    b->add_option("--buffers", ben.buffers, "screen,depth,labels,automap")
        ->delimiter(',')
        ->check(CLI::IsMember(kBufferNames));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw UsageExit(0, app.help());
    } catch (const CLI::CallForAllHelp&) {
        throw UsageExit(0, app.help("", CLI::AppFormatMode::All));
    } catch (const CLI::ParseError& e) {
        throw UsageExit(2, std::string(e.what()) + "\n" + app.help());
    }

    auto usage = [&](const std::string& msg) { return UsageExit(2, msg + "\n" + app.help()); };
    if (h->parsed()) return host;
    if (j->parsed()) {
        if (const auto colon = join.host.rfind(':'); colon != std::string::npos) {
            int p = 0;
            try {
                std::size_t used = 0;
                p = std::stoi(join.host.substr(colon + 1), &used);
                if (used != join.host.size() - colon - 1) p = -1;
            } catch (const std::exception&) {
                p = -1;
            }
            if (p < 1 || p > 65535) throw usage("bad port in '" + join.host + "'");
            join.port = static_cast<std::uint16_t>(p);
            join.host.resize(colon);
        }
        return join;
    }
    if (t->parsed()) return tour;
    if (r->parsed()) {
        if (rep.resolution) {
            try {
                parse_resolution(*rep.resolution);
            } catch (const std::invalid_argument& e) {
                throw usage(e.what());
            }
        }
        return rep;
    }
    try {
        parse_resolution(ben.resolution);
    } catch (const std::invalid_argument& e) {
        throw usage(e.what());
    }
    return ben;
}

int run(const Command& command, std::ostream& out, std::ostream& err) {
    try {
        return std::visit(
            [&](const auto& c) -> int {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, HostCommand>) return run_host(c, out);
                else if constexpr (std::is_same_v<T, JoinCommand>) return run_join(c, out);
                else if constexpr (std::is_same_v<T, TournamentCommand>) return run_tournament_cmd(c, out);
                else if constexpr (std::is_same_v<T, ReplayCommand>) return run_replay(c, out);
                else return run_bench(c, out);
            },
            command);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int main(int argc, const char* const* argv) {
    try {
        return run(parse_args(argc, argv), std::cout, std::cerr);
    } catch (const UsageExit& e) {
        (e.code == 0 ? std::cout : std::cerr) << e.what();
        return e.code;
    }
}

}  // namespace pixelarena::cli
