#include <filesystem>
#include <algorithm>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pixelarena/cli.hpp"

using namespace pixelarena::cli;

namespace {

Command parse(std::vector<const char*> args) {
    args.insert(args.begin(), "pixelarena");
    return parse_args(static_cast<int>(args.size()), args.data());
}

int usage_code(std::vector<const char*> args) {
    try {
        parse(std::move(args));
    } catch (const UsageExit& e) {
        return e.code;
    }
    return -1;
}

}  // namespace

TEST_CASE("subcommands parse their options") {
    const auto host = std::get<HostCommand>(parse({"host", "--players", "4", "--bot", "fighter,wanderer", "--port", "6000",
                                                   "--ws-port", "6001", "--duration", "700", "--async"}));
    CHECK(host.players == 4);
    CHECK(host.bots == std::vector<std::string>{"fighter", "wanderer"});
    CHECK(host.port == 6000);
    CHECK(host.ws_port == 6001);
    CHECK(host.duration == 700u);
    CHECK(host.async);

    const auto join = std::get<JoinCommand>(parse({"join", "10.0.0.2:6000", "--bot", "wanderer"}));
    CHECK(join.host == "10.0.0.2");
    CHECK(join.port == 6000);
    CHECK(join.bot == "wanderer");

    const auto t = std::get<TournamentCommand>(parse({"tournament", "--bots", "fighter,fighter,idle", "--matches", "3"}));
    CHECK(t.bots.size() == 3);
    CHECK(t.matches == 3);
    CHECK(t.capacity == 8);
    CHECK(t.duration == 21000u);

    const auto r = std::get<ReplayCommand>(parse({"replay", "m.vzr", "--render", "--resolution", "640x480", "--buffers",
                                                  "screen,depth"}));
    CHECK(r.file == "m.vzr");
    CHECK(r.render);
    CHECK(r.resolution == "640x480");
    CHECK(r.buffers == std::vector<std::string>{"screen", "depth"});

    const auto b = std::get<BenchCommand>(parse({"bench", "--resolution", "160x120", "--tics", "10"}));
    CHECK(b.resolution == "160x120");
    CHECK(b.tics == 10);
}

TEST_CASE("usage errors exit with 2 and help with 0") {
    CHECK(usage_code({"--help"}) == 0);
    CHECK(usage_code({}) == 2);
    CHECK(usage_code({"frobnicate"}) == 2);
    CHECK(usage_code({"bench", "--frobnicate"}) == 2);
    CHECK(usage_code({"replay"}) == 2);
}

TEST_CASE("resolution strings") {
    CHECK(parse_resolution("320x240") == std::pair{320, 240});
    CHECK_THROWS_AS(parse_resolution("320"), std::invalid_argument);
    CHECK_THROWS_AS(parse_resolution("0x10"), std::invalid_argument);
    CHECK_THROWS_AS(parse_resolution("axb"), std::invalid_argument);
}

TEST_CASE("a corrupt replay fails with a one-line diagnostic") {
    const auto path = std::filesystem::temp_directory_path() / "pa_corrupt.vzr";
    {
        std::ofstream f(path, std::ios::binary);
        f << "VZR1garbage";
    }
    std::ostringstream out, err;
    ReplayCommand cmd;
    cmd.file = path.string();
    CHECK(run(cmd, out, err) == 1);
    const std::string msg = err.str();
    CHECK(msg.rfind("error: ", 0) == 0);
    CHECK(std::count(msg.begin(), msg.end(), '\n') == 1);
}

TEST_CASE("tournament and replay commands run end to end") {
    const auto dir = std::filesystem::temp_directory_path() / "pa_cli_tournament";
    std::filesystem::remove_all(dir);
    TournamentCommand t;
    t.bots = {"fighter", "wanderer"};
    t.matches = 1;
    t.duration = 140;
    t.out = dir.string();
    std::ostringstream out, err;
    REQUIRE(run(t, out, err) == 0);
    CHECK(std::filesystem::exists(dir / "summary.csv"));

    ReplayCommand r;
    r.file = (dir / "match_01.vzr").string();
    r.stats = true;
    std::ostringstream rout, rerr;
    REQUIRE(run(r, rout, rerr) == 0);
    CHECK(rout.str().find("place,bot,frags") != std::string::npos);

    r.stats = false;
    r.render = true;
    r.every = 35;
    r.resolution = "64x48";
    r.buffers = {"screen", "depth", "labels", "automap"};
    r.out = (dir / "frames").string();
    std::ostringstream fout, ferr;
    REQUIRE(run(r, fout, ferr) == 0);
    CHECK(std::filesystem::exists(dir / "frames" / "screen_000035.ppm"));
    CHECK(std::filesystem::exists(dir / "frames" / "depth_000140.pgm"));

    TournamentCommand lonely;
    lonely.bots = {"fighter"};
    std::ostringstream lout, lerr;
    CHECK(run(lonely, lout, lerr) == 1);
}

TEST_CASE("bench prints throughput") {
    BenchCommand b;
    b.resolution = "64x48";
    b.tics = 20;
    std::ostringstream out, err;
    REQUIRE(run(b, out, err) == 0);
    CHECK(out.str().find("fps") != std::string::npos);
}
