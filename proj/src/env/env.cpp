#include "pixelarena/env.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "pixelarena/bots.hpp"
#include "pixelarena/lockstep.hpp"
#include "pixelarena/log.hpp"
#include "pixelarena/replay.hpp"

namespace pixelarena {

double game_variable(const WorldState& world, int player, GameVariable v) {
    const Actor& a = world.actors.at(static_cast<std::size_t>(player));
    const Counters& c = world.counters.at(static_cast<std::size_t>(player));
    switch (v) {
        case GameVariable::health: return a.health;
        case GameVariable::armor: return a.armor;
        case GameVariable::selected_weapon: return static_cast<double>(a.selected);
        case GameVariable::selected_weapon_ammo: return a.ammo_for(a.selected);
        case GameVariable::fragcount: return static_cast<double>(c.frags());
        case GameVariable::killcount: return c.kills;
        case GameVariable::deathcount: return c.deaths;
        case GameVariable::hits_taken: return c.hits_taken;
        case GameVariable::damage_taken: return c.damage_taken_hp;
        case GameVariable::itemcount: return c.picked_ammo + c.picked_medikits + c.picked_armors;
        case GameVariable::position_x: return a.pos.x.to_double();
        case GameVariable::position_y: return a.pos.y.to_double();
        case GameVariable::angle: return a.angle.to_degrees();
    }
    return 0;
}

struct Env::Driver {
    virtual ~Driver() = default;
    virtual const WorldState& world() const = 0;
    virtual std::vector<Event> tick(const Action& mine) = 0;
    // True when tick() itself waits for the wall clock or the host.
    virtual bool paced() const { return false; }
    virtual int player() const { return 0; }
    virtual bool ended() const { return false; }
    virtual void finish() {}
};

struct Env::LocalDriver : Env::Driver {
    WorldState w;
    std::vector<Bot> bots;  // slots 1..n-1
    std::optional<ReplayWriter> writer;

    LocalDriver(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& record) {
        auto grid = std::make_shared<const MapGrid>(parse_map(cfg.map_text));
        w = make_world(grid, cfg.players, cfg.seed, cfg.rules());
        if (cfg.render.automap_enabled && !cfg.render.automap_full) {
            w.track_discovery = true;
            for (const auto& a : w.actors) update_discovery(w, a.id);
        }
        for (int s = 1; s < cfg.players; ++s) {
            const std::size_t i = static_cast<std::size_t>(s - 1);
            const BotSpec spec = i < cfg.bots.size() ? parse_bot_spec(cfg.bots[i]) : BotSpec{};
            bots.emplace_back(spec, cfg.seed, s);
        }
        if (record) writer.emplace(*record, make_replay_header(cfg, cfg.players, cfg.seed));
    }
    const WorldState& world() const override { return w; }
    std::vector<Event> tick(const Action& mine) override {
        std::vector<Action> actions(w.actors.size());
        actions[0] = mine;
        for (std::size_t s = 1; s < actions.size(); ++s) actions[s] = bots[s - 1].act(w, static_cast<int>(s));
        auto events = step(w, actions);
        if (writer) writer->record(actions, w);
        return events;
    }
    void finish() override {
        if (writer && !writer->finished()) writer->finish(w);
    }
};

struct Env::HostDriver : Env::Driver {
    std::unique_ptr<LockstepHost> host;

    HostDriver(const ScenarioConfig& cfg, int players, std::uint16_t port, const std::optional<std::filesystem::path>& record) {
        std::vector<SlotConfig> slots(static_cast<std::size_t>(players));
        slots[0].name = cfg.player_name();
        for (int s = 1; s < players; ++s) {
            const std::size_t i = static_cast<std::size_t>(s - 1);
            if (i < cfg.bots.size()) {
                auto bot = std::make_shared<Bot>(parse_bot_spec(cfg.bots[i]), cfg.seed, s);
                slots[static_cast<std::size_t>(s)].name = cfg.bots[i];
                slots[static_cast<std::size_t>(s)].controller = [bot](const WorldState& w, int slot) { return bot->act(w, slot); };
            } else {
                slots[static_cast<std::size_t>(s)].kind = SlotConfig::Kind::remote;
            }
        }
        HostOptions ho;
        ho.config = cfg;
        ho.seed = cfg.seed;
        ho.async = is_async(cfg.mode);
        ho.replay_path = record;
        host = std::make_unique<LockstepHost>(ho, std::move(slots));
        TcpListener listener(port);
        log::info("hosting on port {}, waiting for {} players", listener.port(), host->open_remote_slots());
        const auto deadline = std::chrono::steady_clock::now() + std::chrono::minutes(2);
        while (!host->all_joined()) {
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0) throw EnvError(EnvError::Kind::network, "timed out waiting for players to join");
            if (auto ch = listener.accept(left)) host->admit(std::move(ch));
        }
    }
    const WorldState& world() const override { return host->world(); }
    std::vector<Event> tick(const Action& mine) override {
        std::vector<std::optional<Action>> overrides(1, mine);
        return host->advance(overrides);
    }
    bool paced() const override { return is_async(host->config().mode); }
    void finish() override { host->finish(); }
};

struct Env::ClientDriver : Env::Driver {
    std::unique_ptr<LockstepClient> client;
    bool done = false;

    ClientDriver(const ScenarioConfig& cfg, const std::string& host, std::uint16_t port) {
        ClientOptions co;
        co.name = cfg.player_name();
        try {
            client = std::make_unique<LockstepClient>(tcp_connect(host, port, std::chrono::seconds(10)), co);
        } catch (const ChannelClosed& e) {
            throw EnvError(EnvError::Kind::network, e.what());
        } catch (const HostRejected& e) {
            throw EnvError(EnvError::Kind::network, e.what());
        }
    }
    const WorldState& world() const override { return client->world(); }
    std::vector<Event> tick(const Action& mine) override {
        client->submit(mine);
        if (!client->advance()) {
            done = true;
            return {};
        }
        return client->last_events();
    }
    bool paced() const override { return true; }
    int player() const override { return client->player_id(); }
    bool ended() const override { return done; }
    void finish() override { client->close(); }
};

Env::Env(ScenarioConfig config) : config_(std::move(config)) {
    validate(config_);
    start_driver(std::nullopt);
}

Env::~Env() {
    try {
        close();
    } catch (...) {
    }
}

void Env::start_driver(const std::optional<std::filesystem::path>& record_path) {
    const auto& args = config_.args;
    auto arg_after = [&](const std::string& flag) -> std::optional<std::string> {
        for (std::size_t i = 0; i + 1 < args.size(); ++i)
            if (args[i] == flag) return args[i + 1];
        return std::nullopt;
    };
    auto parse_port = [](const std::string& s) {
        std::uint16_t p = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), p);
        if (ec != std::errc{} || ptr != s.data() + s.size()) throw ConfigError("bad port '" + s + "'");
        return p;
    };
    std::uint16_t port = kDefaultPort;
    if (auto p = arg_after("-port")) port = parse_port(*p);

    if (auto join = arg_after("-join")) {
        std::string host = *join;
        if (const auto colon = host.rfind(':'); colon != std::string::npos) {
            port = parse_port(host.substr(colon + 1));
            host = host.substr(0, colon);
        }
        driver_ = std::make_unique<ClientDriver>(config_, host, port);
    } else if (auto n = arg_after("-host")) {
        int players = 0;
        auto [ptr, ec] = std::from_chars(n->data(), n->data() + n->size(), players);
        if (ec != std::errc{} || players < 1 || players > kMaxPlayers) throw ConfigError("bad -host player count '" + *n + "'");
        driver_ = std::make_unique<HostDriver>(config_, players, port, record_path);
    } else {
        driver_ = std::make_unique<LocalDriver>(config_, record_path);
    }

    std::lock_guard lock(mu_);
    state_ = EnvState{};
    rendered_tic_.reset();
    last_action_ = {};
    respawn_requested_ = false;
    total_reward_ = last_reward_ = 0;
    pending_.reset();
    pending_left_ = 0;
    pending_reward_ = 0;
    spectator_.reset();
    missed_ = 0;
    closed_ = false;
    stop_clock_ = false;
    if (is_async(config_.mode)) clock_ = std::thread([this] { clock_loop(); });
}

void Env::stop_clock() {
    {
        std::lock_guard lock(mu_);
        stop_clock_ = true;
    }
    cv_.notify_all();
    if (clock_.joinable()) clock_.join();
}

void Env::close() {
    stop_clock();
    std::lock_guard lock(mu_);
    if (closed_) return;
    closed_ = true;
    if (driver_) driver_->finish();
}

void Env::new_episode(const std::optional<std::filesystem::path>& record_path) {
    if (dynamic_cast<LocalDriver*>(driver_.get()) == nullptr)
        throw EnvError(EnvError::Kind::network, "new_episode is only supported for local sessions");
    stop_clock();
    driver_->finish();
    start_driver(record_path);
}

bool Env::finished_locked() const {
    const WorldState& w = driver_->world();
    if (driver_->ended()) return true;
    if (config_.episode_timeout > 0 && w.tic >= config_.episode_timeout) return true;
    if (config_.frag_limit > 0)
        for (const auto& c : w.counters)
            if (c.frags() >= static_cast<std::int64_t>(config_.frag_limit)) return true;
    if (config_.episode_ends_on_death && !w.actors[static_cast<std::size_t>(driver_->player())].alive) return true;
    return false;
}

bool Env::is_episode_finished() const {
    std::lock_guard lock(mu_);
    return finished_locked();
}

bool Env::is_player_dead() const {
    std::lock_guard lock(mu_);
    return !driver_->world().actors[static_cast<std::size_t>(driver_->player())].alive;
}

void Env::respawn_player() {
    std::lock_guard lock(mu_);
    const WorldState& w = driver_->world();
    const int id = driver_->player();
    if (!w.actors[static_cast<std::size_t>(id)].alive && respawn_eligible(w, id)) respawn_requested_ = true;
}

int Env::player_id() const {
    std::lock_guard lock(mu_);
    return driver_->player();
}

std::uint32_t Env::tic() const {
    std::lock_guard lock(mu_);
    return driver_->world().tic;
}

double Env::total_reward() const {
    std::lock_guard lock(mu_);
    return total_reward_;
}

double Env::last_reward() const {
    std::lock_guard lock(mu_);
    return last_reward_;
}

std::uint32_t Env::missed_tics() const {
    std::lock_guard lock(mu_);
    return missed_;
}

std::uint64_t Env::state_hash() const {
    std::lock_guard lock(mu_);
    return pixelarena::state_hash(driver_->world());
}

WorldState Env::world() const {
    std::lock_guard lock(mu_);
    return driver_->world();
}

Action Env::to_action(std::span<const double> values) const {
    const auto& buttons = config_.available_buttons;
    if (values.size() != buttons.size())
        throw EnvError(EnvError::Kind::arity, "action has " + std::to_string(values.size()) + " values, expected " +
                                                  std::to_string(buttons.size()));
    Action a;
    for (std::size_t i = 0; i < buttons.size(); ++i) {
        if (buttons[i] == Button::turn_delta) {
            const double deg = std::clamp(values[i], -15.0, 15.0);
            a.turn_delta = static_cast<std::int16_t>(std::lround(deg * 100.0));
        } else if (values[i] != 0) {
            a.buttons |= 1u << static_cast<int>(buttons[i]);
        }
    }
    return a;
}

double Env::tick_locked(Action mine) {
    if (respawn_requested_) {
        mine.buttons |= kRespawnRequestBit;
        respawn_requested_ = false;
    }
    const auto events = driver_->tick(mine);
    mine.buttons &= ~kRespawnRequestBit;
    last_action_ = mine;
    last_reward_ = reward_for(events, config_, driver_->player());
    total_reward_ += last_reward_;
    return last_reward_;
}

const EnvState& Env::get_state() {
    std::lock_guard lock(mu_);
    if (finished_locked()) throw EnvError(EnvError::Kind::finished, "get_state called after the episode finished");
    const WorldState& w = driver_->world();
    const int id = driver_->player();
    if (rendered_tic_ != w.tic) {
        state_.frame = std::make_shared<const FrameBundle>(render_frame(w, id, config_.render));
        state_.game_variables.clear();
        for (auto v : config_.available_game_variables) state_.game_variables.push_back(game_variable(w, id, v));
        rendered_tic_ = w.tic;
    }
    state_.tic = w.tic;
    state_.last_action = last_action_;
    state_.episode_finished = false;
    state_.player_dead = !w.actors[static_cast<std::size_t>(id)].alive;
    return state_;
}

double Env::make_action(std::span<const double> values, int skip) {
    if (is_spectator(config_.mode)) throw EnvError(EnvError::Kind::mode, "make_action is not available in spectator modes");
    if (skip < 1) throw std::invalid_argument("skip must be at least 1");
    const Action a = to_action(values);
    std::unique_lock lock(mu_);
    if (finished_locked()) throw EnvError(EnvError::Kind::finished, "make_action called after the episode finished");
    if (!is_async(config_.mode)) {
        double reward = 0;
        for (int k = 0; k < skip && !finished_locked(); ++k) reward += tick_locked(a);
        return reward;
    }
    pending_ = a;
    pending_left_ = skip;
    pending_reward_ = 0;
    cv_.wait(lock, [&] { return pending_left_ == 0 || stop_clock_ || finished_locked(); });
    pending_left_ = 0;
    return pending_reward_;
}

void Env::spectator_input(const Action& action) {
    if (!is_spectator(config_.mode)) throw EnvError(EnvError::Kind::mode, "spectator_input requires a spectator mode");
    {
        std::lock_guard lock(mu_);
        spectator_ = action;
    }
    cv_.notify_all();
}

void Env::spectator_input(std::span<const double> action) { spectator_input(to_action(action)); }

int Env::advance_action(int skip, std::chrono::milliseconds timeout) {
    if (!is_spectator(config_.mode)) throw EnvError(EnvError::Kind::mode, "advance_action requires a spectator mode");
    if (skip < 1) throw std::invalid_argument("skip must be at least 1");
    std::unique_lock lock(mu_);
    if (finished_locked()) throw EnvError(EnvError::Kind::finished, "advance_action called after the episode finished");
    if (is_async(config_.mode)) {
        const std::uint32_t target = driver_->world().tic + static_cast<std::uint32_t>(skip);
        const std::uint32_t start = driver_->world().tic;
        cv_.wait(lock, [&] { return driver_->world().tic >= target || stop_clock_ || finished_locked(); });
        return static_cast<int>(driver_->world().tic - start);
    }
    int advanced = 0;
    for (int k = 0; k < skip && !finished_locked(); ++k) {
        // The engine waits for the human.
        if (!cv_.wait_for(lock, timeout, [&] { return spectator_.has_value(); })) break;
        const Action a = *spectator_;
        spectator_.reset();
        tick_locked(a);
        ++advanced;
    }
    return advanced;
}

void Env::clock_loop() {
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t k = 0;
    for (;;) {
        {
            std::unique_lock lock(mu_);
            if (!driver_->paced()) {
                const auto deadline = t0 + std::chrono::nanoseconds(static_cast<std::int64_t>((k + 1) * 1'000'000'000ull / kTicRate));
                if (cv_.wait_until(lock, deadline, [&] { return stop_clock_; })) return;
            }
            if (stop_clock_ || finished_locked()) break;
            Action a;
            bool claimed = false;
            if (config_.mode == Mode::async_player) {
                if (pending_left_ > 0) {
                    a = *pending_;
                    claimed = true;
                } else {
                    ++missed_;
                }
            } else if (spectator_) {
                a = *spectator_;
                spectator_.reset();
            } else {
                ++missed_;
            }
            const double r = tick_locked(a);
            if (claimed) {
                pending_reward_ += r;
                --pending_left_;
            }
            ++k;
        }
        cv_.notify_all();
    }
    cv_.notify_all();
}

}  // namespace pixelarena
