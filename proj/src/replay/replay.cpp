#include "pixelarena/replay.hpp"

#include <iterator>

#include "pixelarena/bytes.hpp"

namespace pixelarena {

namespace {

constexpr char kMagic[4] = {'V', 'Z', 'R', '1'};
constexpr char kFooterMagic[4] = {'V', 'Z', 'R', 'E'};

std::size_t footer_size(int players) { return 4 + static_cast<std::size_t>(players) * kCountersWireSize + 8 + 4; }
std::size_t record_size(int players) { return static_cast<std::size_t>(players) * 6; }

void encode_header(ByteWriter& w, const ReplayHeader& h) {
    w.bytes(std::string_view(kMagic, 4));
    w.put(h.version);
    w.put(h.seed);
    w.put(h.players);
    w.text(h.config_text);
    w.text(h.map_text);
}

void encode_record(ByteWriter& w, std::span<const Action> actions) {
    for (const auto& a : actions) {
        w.put(a.buttons);
        w.put(a.turn_delta);
    }
}

void encode_footer(ByteWriter& w, const ReplayFooter& f) {
    w.put(f.final_tic);
    std::vector<std::uint8_t> buf;
    for (const auto& c : f.counters) encode_counters(buf, c);
    w.bytes(buf);
    w.put(f.final_hash);
    w.bytes(std::string_view(kFooterMagic, 4));
}

}  // namespace

void encode_counters(std::vector<std::uint8_t>& out, const Counters& c) {
    ByteWriter w;
    for (std::uint32_t v : {c.kills, c.suicides, c.deaths, c.attacks, c.attacks_visible, c.attacks_damaging, c.hits_taken,
                            c.damage_taken_hp, c.picked_ammo, c.picked_medikits, c.picked_armors, c.alive_tics})
        w.put(v);
    w.put(c.distance_raw);
    out.insert(out.end(), w.data().begin(), w.data().end());
}

Counters decode_counters(std::span<const std::uint8_t> in) {
    if (in.size() < kCountersWireSize) throw std::invalid_argument("counters record too short");
    ByteReader r(in);
    Counters c;
    for (std::uint32_t* f : {&c.kills, &c.suicides, &c.deaths, &c.attacks, &c.attacks_visible, &c.attacks_damaging,
                             &c.hits_taken, &c.damage_taken_hp, &c.picked_ammo, &c.picked_medikits, &c.picked_armors,
                             &c.alive_tics})
        *f = *r.get<std::uint32_t>();
    c.distance_raw = *r.get<std::int64_t>();
    return c;
}

ScenarioConfig ReplayHeader::config() const {
    ConfigParseOptions options;
    options.map_text = map_text;
    return parse_config(config_text, options);
}

ReplayHeader make_replay_header(const ScenarioConfig& config, int players, std::uint64_t seed) {
    if (players < 1 || players > kMaxPlayers) throw ContractViolation("replay: bad player count");
    ReplayHeader h;
    h.seed = seed;
    h.players = static_cast<std::uint8_t>(players);
    h.config_text = serialize_config(config, false);
    h.map_text = config.map_text;
    return h;
}

WorldState replay_world(const ReplayHeader& header) {
    const ScenarioConfig cfg = header.config();
    auto grid = std::make_shared<const MapGrid>(parse_map(header.map_text));
    return make_world(grid, header.players, header.seed, cfg.rules());
}

ReplayWriter::ReplayWriter(const std::filesystem::path& path, const ReplayHeader& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), players_(header.players) {
    if (!out_) throw ReplayError(ReplayError::Kind::io, 0, "cannot create replay file " + path.string());
    ByteWriter w;
    encode_header(w, header);
    write(w.data());
    out_.flush();
}

void ReplayWriter::write(const std::vector<std::uint8_t>& bytes) {
    out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out_) throw ReplayError(ReplayError::Kind::io, 0, "write failed for replay file " + path_.string());
}

void ReplayWriter::record(std::span<const Action> actions, const WorldState& after) {
    if (finished_) throw ContractViolation("replay already finished");
    if (static_cast<int>(actions.size()) != players_) throw ContractViolation("replay: action count does not match players");
    ByteWriter w;
    encode_record(w, actions);
    const bool checkpoint = after.tic % kCheckpointInterval == 0;
    if (checkpoint) w.put(state_hash(after));
    write(w.data());
    // Whole checkpoint blocks reach the disk even if the process dies later.
    if (checkpoint) out_.flush();
}

void ReplayWriter::finish(const WorldState& final_world) {
    if (finished_) return;
    ReplayFooter f;
    f.final_tic = final_world.tic;
    f.counters = final_world.counters;
    f.final_hash = state_hash(final_world);
    ByteWriter w;
    encode_footer(w, f);
    write(w.data());
    out_.flush();
    finished_ = true;
}

std::vector<std::uint8_t> encode_replay(const ReplayData& data) {
    ByteWriter w;
    encode_header(w, data.header);
    for (std::size_t t = 0; t < data.tics.size(); ++t) {
        encode_record(w, data.tics[t]);
        if ((t + 1) % kCheckpointInterval == 0) {
            const std::size_t k = (t + 1) / kCheckpointInterval - 1;
            w.put(k < data.checkpoints.size() ? data.checkpoints[k] : std::uint64_t{0});
        }
    }
    if (data.footer) encode_footer(w, *data.footer);
    return w.take();
}

ReplayData parse_replay(std::span<const std::uint8_t> bytes, bool allow_partial) {
    using Kind = ReplayError::Kind;
    ByteReader r(bytes);
    ReplayData d;
    const auto magic = r.bytes(4);
    if (!magic || *magic != std::string_view(kMagic, 4)) throw ReplayError(Kind::bad_header, 0, "not a .vzr replay (bad magic)");
    const auto version = r.get<std::uint16_t>();
    const auto seed = r.get<std::uint64_t>();
    const auto players = r.get<std::uint8_t>();
    if (!version || !seed || !players) throw ReplayError(Kind::bad_header, 0, "replay header truncated");
    if (*version != kReplayVersion)
        throw ReplayError(Kind::version, 0,
                          "replay version " + std::to_string(*version) + " is not supported (expected " +
                              std::to_string(kReplayVersion) + ")");
    if (*players < 1 || *players > kMaxPlayers) throw ReplayError(Kind::bad_header, 0, "replay has bad player count");
    auto config = r.text();
    auto map = r.text();
    if (!config || !map) throw ReplayError(Kind::bad_header, 0, "replay header truncated");
    d.header = ReplayHeader{*version, *seed, *players, std::move(*config), std::move(*map)};

    const int n = *players;
    const std::size_t body_start = r.position();
    const std::size_t fsize = footer_size(n);
    std::size_t body_end = bytes.size();
    bool has_footer = false;
    if (bytes.size() >= body_start + fsize &&
        std::equal(kFooterMagic, kFooterMagic + 4, bytes.end() - 4)) {
        has_footer = true;
        body_end = bytes.size() - fsize;
    }

    auto parse_body = [&](std::size_t end) {
        r.seek(body_start);
        d.tics.clear();
        d.checkpoints.clear();
        const std::size_t rec = record_size(n);
        while (end - r.position() >= rec) {
            std::vector<Action> actions(static_cast<std::size_t>(n));
            for (auto& a : actions) {
                a.buttons = *r.get<std::uint32_t>();
                a.turn_delta = *r.get<std::int16_t>();
            }
            const std::size_t tic_after = d.tics.size() + 1;
            if (tic_after % kCheckpointInterval == 0) {
                if (end - r.position() < 8) {
                    // Record without its checkpoint: treat as not written.
                    r.seek(r.position() - rec);
                    break;
                }
                d.checkpoints.push_back(*r.get<std::uint64_t>());
            }
            d.tics.push_back(std::move(actions));
        }
        return r.position() == end;
    };

    if (has_footer && parse_body(body_end)) {
        ByteReader fr(bytes.subspan(body_end));
        ReplayFooter f;
        f.final_tic = *fr.get<std::uint32_t>();
        for (int i = 0; i < n; ++i) {
            f.counters.push_back(decode_counters(bytes.subspan(body_end + fr.position(), kCountersWireSize)));
            fr.seek(fr.position() + kCountersWireSize);
        }
        f.final_hash = *fr.get<std::uint64_t>();
        if (f.final_tic != d.tics.size())
            throw ReplayError(Kind::footer_mismatch, f.final_tic,
                              "replay footer claims " + std::to_string(f.final_tic) + " tics but " +
                                  std::to_string(d.tics.size()) + " were recorded");
        d.footer = std::move(f);
        return d;
    }
    parse_body(bytes.size());
    const auto last = static_cast<std::uint32_t>(d.tics.size());
    if (!allow_partial)
        throw ReplayError(Kind::truncated, last,
                          "partial replay: file is truncated after tic " + std::to_string(last) + " (last valid record)");
    return d;
}

ReplayData read_replay(const std::filesystem::path& path, bool allow_partial) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ReplayError(ReplayError::Kind::io, 0, "cannot open replay file " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_replay(bytes, allow_partial);
}

WorldState play_replay(const ReplayData& data, const ReplayTicCallback& on_tic, bool track_discovery) {
    using Kind = ReplayError::Kind;
    WorldState world = replay_world(data.header);
    if (track_discovery) {
        world.track_discovery = true;
        for (const auto& a : world.actors) update_discovery(world, a.id);
    }
    for (const auto& actions : data.tics) {
        const auto events = step(world, actions);
        if (world.tic % kCheckpointInterval == 0) {
            const std::size_t k = world.tic / kCheckpointInterval - 1;
            if (k < data.checkpoints.size() && data.checkpoints[k] != state_hash(world))
                throw ReplayError(Kind::checkpoint_mismatch, world.tic,
                                  "replay checkpoint mismatch at tic " + std::to_string(world.tic) +
                                      " (corrupt file or incompatible build)");
        }
        if (on_tic) on_tic(world, actions, events);
    }
    if (data.footer) {
        const auto& f = *data.footer;
        if (f.final_hash != state_hash(world) || f.counters != world.counters)
            throw ReplayError(Kind::footer_mismatch, world.tic,
                              "replay final state mismatch at tic " + std::to_string(world.tic));
    }
    return world;
}

}  // namespace pixelarena
