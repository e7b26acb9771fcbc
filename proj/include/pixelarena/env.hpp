#pragma once

// Agent-facing environment: episode lifecycle, state access, action
// submission, the four control modes and frame skipping.
//
// Multiplayer comes from the config args: "-host N" (optionally "-port P")
// waits for N-1 minus bot-count remote players, "-join ADDR[:PORT]" joins a
// host. "+name X" sets the player name.

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "pixelarena/render.hpp"
#include "pixelarena/scenario.hpp"
#include "pixelarena/world.hpp"

namespace pixelarena {

class EnvError : public std::runtime_error {
public:
    enum class Kind { arity, mode, finished, network };
    EnvError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind(kind) {}
    Kind kind;
};

struct EnvState {
    std::uint32_t tic = 0;
    std::shared_ptr<const FrameBundle> frame;
    std::vector<double> game_variables;  // config declaration order
    Action last_action;                  // this player's action of the previous tic
    bool episode_finished = false;
    bool player_dead = false;
};

double game_variable(const WorldState& world, int player, GameVariable v);

class Env {
public:
    explicit Env(ScenarioConfig config);
    ~Env();
    Env(const Env&) = delete;
    Env& operator=(const Env&) = delete;

    // Restarts from tic 0 with the config seed (local sessions only).
    void new_episode(const std::optional<std::filesystem::path>& record_path = std::nullopt);

    // Throws EnvError(finished) after the episode ended.
    const EnvState& get_state();
    // Values aligned with available_buttons; TURN_DELTA is degrees, clamped to +-15.
    // Returns the summed reward of the tics it covered.
    double make_action(std::span<const double> action, int skip = 1);
    double make_action(std::initializer_list<double> action, int skip = 1) {
        return make_action(std::span<const double>(action.begin(), action.size()), skip);
    }

    // Spectator modes: advances `skip` tics using the human's inputs. In
    // SYNC_SPECTATOR a tic without input waits up to `timeout` and then does
    // not advance; returns the tics advanced.
    int advance_action(int skip = 1, std::chrono::milliseconds timeout = std::chrono::milliseconds(0));
    // Sets the human-controlled action for the next tic (spectator modes only).
    void spectator_input(const Action& action);
    void spectator_input(std::span<const double> action);

    bool is_episode_finished() const;
    bool is_player_dead() const;
    // Requests a respawn for the next tic; ignored while still waiting out the delay.
    void respawn_player();

    Action to_action(std::span<const double> values) const;
    const ScenarioConfig& config() const { return config_; }
    int player_id() const;
    std::uint32_t tic() const;
    double total_reward() const;
    double last_reward() const;
    // Empty actions substituted because the agent was late (async modes).
    std::uint32_t missed_tics() const;
    std::uint64_t state_hash() const;
    // Snapshot copy of the world.
    WorldState world() const;
    void close();

private:
    struct Driver;
    struct LocalDriver;
    struct HostDriver;
    struct ClientDriver;

    void start_driver(const std::optional<std::filesystem::path>& record_path);
    void stop_clock();
    void clock_loop();
    // One tic with the given own action; mu_ held.
    double tick_locked(Action mine);
    bool finished_locked() const;

    ScenarioConfig config_;
    std::unique_ptr<Driver> driver_;
    mutable std::mutex mu_;
    std::condition_variable cv_;

    EnvState state_;
    std::optional<std::uint32_t> rendered_tic_;
    Action last_action_;
    bool respawn_requested_ = false;
    double total_reward_ = 0;
    double last_reward_ = 0;
    bool closed_ = false;

    // Async and spectator plumbing.
    std::thread clock_;
    bool stop_clock_ = false;
    std::optional<Action> pending_;
    int pending_left_ = 0;
    double pending_reward_ = 0;
    std::optional<Action> spectator_;
    std::uint32_t missed_ = 0;
};

}  // namespace pixelarena
