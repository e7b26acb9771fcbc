#include "pixelarena/lockstep.hpp"

#include <thread>

#include "pixelarena/log.hpp"

namespace pixelarena {

namespace {


std::chrono::steady_clock::time_point tic_deadline(std::chrono::steady_clock::time_point t0, std::uint32_t tic) {
    // Exact rational deadline: t0 + (tic + 1) / 35 s.
    return t0 + std::chrono::nanoseconds(static_cast<std::int64_t>(tic + 1) * 1'000'000'000 / kTicRate);
}

}  // namespace

DesyncError::DesyncError(const Desync& d)
    : std::runtime_error("desync at tic " + std::to_string(d.tic) + " reported by player " + std::to_string(d.player)),
      info(d) {}

struct LockstepHost::Remote {
    std::unique_ptr<Channel> channel;
    std::string name;
    bool connected = true;
    std::optional<Action> pending;
    std::uint32_t pending_tic = 0;
};

LockstepHost::LockstepHost(HostOptions options, std::vector<SlotConfig> slots)
    : options_(std::move(options)), slots_(std::move(slots)) {
    const int n = static_cast<int>(slots_.size());
    if (n < 1 || n > kMaxPlayers) throw ConfigError("a session holds 1 to " + std::to_string(kMaxPlayers) + " players");
    config_ = options_.config;
    config_.players = n;
    config_.bots.clear();
    config_.seed = options_.seed;
    validate(config_);
    auto grid = std::make_shared<const MapGrid>(parse_map(config_.map_text));
    world_ = make_world(grid, n, options_.seed, config_.rules());
    remotes_.resize(static_cast<std::size_t>(n));
    missed_.assign(static_cast<std::size_t>(n), 0);
    if (options_.replay_path) writer_.emplace(*options_.replay_path, make_replay_header(config_, n, options_.seed));
}

LockstepHost::~LockstepHost() {
    try {
        if (!finished_) finish();
    } catch (...) {
    }
}

int LockstepHost::open_remote_slots() const {
    int open = 0;
    for (std::size_t i = 0; i < slots_.size(); ++i)
        if (slots_[i].kind == SlotConfig::Kind::remote && !remotes_[i]) ++open;
    return open;
}

bool LockstepHost::all_joined() const { return open_remote_slots() == 0; }

bool LockstepHost::connected(int slot) const {
    const auto& r = remotes_.at(static_cast<std::size_t>(slot));
    return r && r->connected;
}

std::optional<int> LockstepHost::admit(std::unique_ptr<Channel> channel) {
    auto reject = [&](ByeReason reason, const std::string& why) -> std::optional<int> {
        log::warn("rejecting {}: {}", channel->peer(), why);
        try {
            channel->send(ByeMsg{reason});
        } catch (const ChannelClosed&) {
        }
        channel->close();
        return std::nullopt;
    };
    std::optional<Message> hello;
    try {
        hello = channel->receive(options_.handshake_timeout);
    } catch (const ProtocolError& e) {
        return reject(ByeReason::protocol, e.what());
    } catch (const ChannelClosed&) {
        return std::nullopt;
    }
    if (!hello) return reject(ByeReason::timeout, "no HELLO");
    const auto* h = std::get_if<HelloMsg>(&*hello);
    if (!h) return reject(ByeReason::protocol, std::string("expected HELLO, got ") + to_string(type_of(*hello)));
    if (h->proto != kProtocolVersion) return reject(ByeReason::version, "protocol version " + std::to_string(h->proto));

    int slot = -1;
    for (std::size_t i = 0; i < slots_.size(); ++i)
        if (slots_[i].kind == SlotConfig::Kind::remote && !remotes_[i]) {
            slot = static_cast<int>(i);
            break;
        }
    if (slot < 0 || started_) return reject(ByeReason::full, "no free player slot");

    try {
        channel->send(WelcomeMsg{static_cast<std::uint8_t>(slot), options_.seed, serialize_config(config_, false), config_.map_text});
        std::optional<Message> ready = channel->receive(options_.handshake_timeout);
        if (!ready) return reject(ByeReason::timeout, "no READY");
        if (!std::holds_alternative<ReadyMsg>(*ready)) return reject(ByeReason::protocol, "expected READY");
    } catch (const ProtocolError& e) {
        return reject(ByeReason::protocol, e.what());
    } catch (const ChannelClosed&) {
        return std::nullopt;
    }
    auto remote = std::make_unique<Remote>();
    remote->name = h->name.empty() ? slots_[static_cast<std::size_t>(slot)].name : h->name;
    if (!h->name.empty()) slots_[static_cast<std::size_t>(slot)].name = h->name;
    remote->channel = std::move(channel);
    log::info("player '{}' joined as slot {}", remote->name, slot);
    remotes_[static_cast<std::size_t>(slot)] = std::move(remote);
    return slot;
}

void LockstepHost::start() {
    if (started_) return;
    started_ = true;
    t0_ = std::chrono::steady_clock::now();
}

void LockstepHost::drop(int slot, const std::string& why, ByeReason reason) {
    auto& r = remotes_[static_cast<std::size_t>(slot)];
    if (!r || !r->connected) return;
    r->connected = false;
    try {
        r->channel->send(ByeMsg{reason});
    } catch (const ChannelClosed&) {
    }
    r->channel->close();
    const std::string note = "slot " + std::to_string(slot) + " (" + r->name + ") " + why + " at tic " +
                             std::to_string(world_.tic) + "; slot frozen to empty actions";
    log::warn("{}", note);
    notes_.push_back(note);
}

void LockstepHost::broadcast(const Message& m) {
    for (std::size_t i = 0; i < remotes_.size(); ++i) {
        auto& r = remotes_[i];
        if (!r || !r->connected) continue;
        try {
            r->channel->send(m);
        } catch (const ChannelClosed&) {
            drop(static_cast<int>(i), "disconnected", ByeReason::normal);
        }
    }
}

void LockstepHost::handle(int slot, Message m, std::uint32_t collecting_tic) {
    auto& r = *remotes_[static_cast<std::size_t>(slot)];
    if (const auto* a = std::get_if<ActionMsg>(&m)) {
        if (a->tic == collecting_tic) {
            r.pending = a->action;
            r.pending_tic = a->tic;
        } else if (a->tic > collecting_tic) {
            drop(slot, "protocol-order error: ACTION for future tic " + std::to_string(a->tic), ByeReason::protocol);
        }
        // Older tics arrived after their deadline and are discarded.
        return;
    }
    if (const auto* h = std::get_if<HashMsg>(&m)) {
        if (h->tic > world_.tic) {
            drop(slot, "protocol-order error: HASH for future tic " + std::to_string(h->tic), ByeReason::protocol);
            return;
        }
        const auto it = hashes_.find(h->tic);
        if (it == hashes_.end()) {
            drop(slot, "protocol-order error: HASH for non-checkpoint tic " + std::to_string(h->tic), ByeReason::protocol);
            return;
        }
        if (it->second != h->hash) {
            const Desync d{h->tic, slot, it->second, h->hash};
            notes_.push_back("desync at tic " + std::to_string(d.tic) + " reported by slot " + std::to_string(slot) + " (" +
                             r.name + ")");
            log::error("{}", notes_.back());
            broadcast(ByeMsg{ByeReason::desync});
            finished_ = true;
            throw DesyncError(d);
        }
        return;
    }
    if (std::holds_alternative<ByeMsg>(m)) {
        drop(slot, "left", ByeReason::normal);
        return;
    }
    drop(slot, std::string("protocol-order error: unexpected ") + to_string(type_of(m)), ByeReason::protocol);
}

std::vector<Event> LockstepHost::advance(std::span<const std::optional<Action>> overrides) {
    if (finished_) throw ContractViolation("session already finished");
    start();
    const std::uint32_t tic = world_.tic;
    const int n = world_.player_count();
    std::vector<Action> actions(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        const auto& slot = slots_[static_cast<std::size_t>(s)];
        if (slot.kind != SlotConfig::Kind::local) continue;
        if (static_cast<std::size_t>(s) < overrides.size() && overrides[static_cast<std::size_t>(s)])
            actions[static_cast<std::size_t>(s)] = *overrides[static_cast<std::size_t>(s)];
        else if (slot.controller)
            actions[static_cast<std::size_t>(s)] = slot.controller(world_, s);
    }

    const auto deadline = tic_deadline(t0_, tic);
    for (int s = 0; s < n; ++s) {
        auto& r = remotes_[static_cast<std::size_t>(s)];
        if (!r || !r->connected) continue;
        const auto wait_until = options_.async ? deadline : std::chrono::steady_clock::now() + options_.sync_timeout;
        while (r->connected && !(r->pending && r->pending_tic == tic)) {
            std::optional<Message> m;
            try {
                m = r->channel->receive_until(wait_until);
            } catch (const ChannelClosed&) {
                drop(s, "disconnected", ByeReason::normal);
                break;
            } catch (const ProtocolError& e) {
                drop(s, std::string("sent a malformed frame (") + e.what() + ")", ByeReason::protocol);
                break;
            }
            if (!m) {
                if (options_.async) ++missed_[static_cast<std::size_t>(s)];
                else drop(s, "timed out", ByeReason::timeout);
                break;
            }
            handle(s, std::move(*m), tic);
        }
        if (r->connected && r->pending && r->pending_tic == tic) actions[static_cast<std::size_t>(s)] = *r->pending;
        r->pending.reset();
    }
    if (options_.async) std::this_thread::sleep_until(deadline);

    broadcast(TicBatchMsg{tic, actions});
    auto events = step(world_, actions);
    if (writer_) writer_->record(actions, world_);
    if (world_.tic % options_.hash_interval == 0) hashes_[world_.tic] = state_hash(world_);
    last_actions_ = std::move(actions);
    return events;
}

void LockstepHost::finish(ByeReason reason) {
    if (finished_ && !writer_) return;
    broadcast(ByeMsg{reason});
    for (auto& r : remotes_)
        if (r) {
            r->connected = false;
            r->channel->close();
        }
    if (writer_ && !writer_->finished()) writer_->finish(world_);
    finished_ = true;
}

LockstepClient::LockstepClient(std::unique_ptr<Channel> channel, ClientOptions options)
    : channel_(std::move(channel)), options_(std::move(options)) {
    channel_->send(HelloMsg{options_.protocol_version, options_.name});
    const auto m = channel_->receive(options_.handshake_timeout);
    if (!m) throw ChannelClosed("no WELCOME from " + channel_->peer());
    if (const auto* bye = std::get_if<ByeMsg>(&*m))
        throw HostRejected(bye->reason, std::string("host rejected the join: ") + to_string(bye->reason));
    const auto* w = std::get_if<WelcomeMsg>(&*m);
    if (!w) throw ProtocolError(ProtocolError::Code::order, std::string("expected WELCOME, got ") + to_string(type_of(*m)));
    ConfigParseOptions po;
    po.map_text = w->map_text;
    config_ = parse_config(w->config_text, po);
    config_.seed = w->seed;
    auto grid = std::make_shared<const MapGrid>(parse_map(config_.map_text));
    world_ = make_world(grid, config_.players, w->seed, config_.rules(), options_.constants_override.value_or(SimConstants{}));
    player_id_ = w->player_id;
    if (player_id_ >= config_.players) throw ProtocolError(ProtocolError::Code::bad_payload, "WELCOME slot out of range");
    channel_->send(ReadyMsg{});
}

void LockstepClient::submit(const Action& action) {
    if (bye_) return;
    try {
        channel_->send(ActionMsg{world_.tic, action});
    } catch (const ChannelClosed&) {
        bye_ = ByeReason::normal;
    }
}

bool LockstepClient::apply(Message m) {
    if (const auto* b = std::get_if<TicBatchMsg>(&m)) {
        if (b->tic != world_.tic)
            throw ProtocolError(ProtocolError::Code::order,
                                "TICBATCH for tic " + std::to_string(b->tic) + " while at tic " + std::to_string(world_.tic));
        if (static_cast<int>(b->actions.size()) != world_.player_count())
            throw ProtocolError(ProtocolError::Code::bad_payload, "TICBATCH size does not match the player count");
        last_events_ = step(world_, b->actions);
        last_actions_ = b->actions;
        if (world_.tic % options_.hash_interval == 0) {
            try {
                channel_->send(HashMsg{world_.tic, state_hash(world_)});
            } catch (const ChannelClosed&) {
            }
        }
        return true;
    }
    if (const auto* bye = std::get_if<ByeMsg>(&m)) {
        bye_ = bye->reason;
        return false;
    }
    return false;
}

bool LockstepClient::advance(std::chrono::milliseconds timeout) {
    const auto deadline = Channel::Clock::now() + timeout;
    while (!bye_) {
        std::optional<Message> m;
        try {
            m = channel_->receive_until(deadline);
        } catch (const ChannelClosed&) {
            bye_ = ByeReason::normal;
            return false;
        }
        if (!m) {
            bye_ = ByeReason::timeout;
            return false;
        }
        if (apply(std::move(*m))) return true;
    }
    return false;
}

int LockstepClient::drain() {
    int stepped = 0;
    while (!bye_) {
        std::optional<Message> m;
        try {
            m = channel_->poll();
        } catch (const ChannelClosed&) {
            bye_ = ByeReason::normal;
            break;
        }
        if (!m) break;
        if (apply(std::move(*m))) ++stepped;
    }
    return stepped;
}

void LockstepClient::close() {
    if (!bye_) {
        try {
            channel_->send(ByeMsg{ByeReason::normal});
        } catch (const ChannelClosed&) {
        }
        bye_ = ByeReason::normal;
    }
    channel_->close();
}

}  // namespace pixelarena
