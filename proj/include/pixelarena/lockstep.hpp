#pragma once

// Lockstep session. The host owns the authoritative action stream: for each
// tic it gathers one action per slot, broadcasts the TICBATCH, then steps.
// Clients step only on received batches and report a state hash every 35
// tics, which the host checks against its own.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pixelarena/channel.hpp"
#include "pixelarena/replay.hpp"
#include "pixelarena/scenario.hpp"
#include "pixelarena/world.hpp"

namespace pixelarena {

using SlotController = std::function<Action(const WorldState& world, int slot)>;

struct SlotConfig {
    enum class Kind { local, remote } kind = Kind::local;
    std::string name;
    SlotController controller;  // local slots only; empty = empty action
};

struct HostOptions {
    ScenarioConfig config;
    std::uint64_t seed = 0;
    bool async = false;
    std::chrono::milliseconds handshake_timeout{10000};
    // Sync mode: a peer silent for this long counts as disconnected.
    std::chrono::milliseconds sync_timeout{30000};
    std::uint32_t hash_interval = kCheckpointInterval;
    std::optional<std::filesystem::path> replay_path;
};

struct Desync {
    std::uint32_t tic = 0;
    int player = 0;
    std::uint64_t expected = 0;
    std::uint64_t reported = 0;
};

class DesyncError : public std::runtime_error {
public:
    explicit DesyncError(const Desync& d);
    Desync info;
};

class LockstepHost {
public:
    LockstepHost(HostOptions options, std::vector<SlotConfig> slots);
    ~LockstepHost();

    // Handshake with a new peer. Returns the assigned slot, or nullopt after
    // rejecting it with BYE (full, version or protocol).
    std::optional<int> admit(std::unique_ptr<Channel> channel);
    bool all_joined() const;
    int open_remote_slots() const;

    // Starts the async clock; called implicitly by the first advance().
    void start();
    // Collects, broadcasts and steps one tic. `overrides` replaces the local
    // controller output for the given slots. Throws DesyncError.
    std::vector<Event> advance(std::span<const std::optional<Action>> overrides = {});
    // Sends BYE to every connected peer and closes the replay.
    void finish(ByeReason reason = ByeReason::normal);

    const WorldState& world() const { return world_; }
    const ScenarioConfig& config() const { return config_; }
    const std::vector<Action>& last_actions() const { return last_actions_; }
    // Per slot: tics where a connected remote's action was missing at the deadline.
    const std::vector<std::uint32_t>& missed_tics() const { return missed_; }
    const std::vector<std::string>& notes() const { return notes_; }
    bool connected(int slot) const;
    std::chrono::steady_clock::time_point started_at() const { return t0_; }

private:
    struct Remote;
    void handle(int slot, Message m, std::uint32_t collecting_tic);
    void drop(int slot, const std::string& why, ByeReason reason);
    void broadcast(const Message& m);

    HostOptions options_;
    ScenarioConfig config_;
    std::vector<SlotConfig> slots_;
    std::vector<std::unique_ptr<Remote>> remotes_;  // index == slot, null for local
    WorldState world_;
    std::optional<ReplayWriter> writer_;
    std::map<std::uint32_t, std::uint64_t> hashes_;
    std::vector<Action> last_actions_;
    std::vector<std::uint32_t> missed_;
    std::vector<std::string> notes_;
    bool started_ = false;
    bool finished_ = false;
    std::chrono::steady_clock::time_point t0_;
};

struct ClientOptions {
    std::string name = "player";
    std::chrono::milliseconds handshake_timeout{10000};
    std::uint32_t hash_interval = kCheckpointInterval;
    // Test hook: simulate a build with different constants.
    std::optional<SimConstants> constants_override;
    // Test hook: protocol version sent in HELLO.
    std::uint16_t protocol_version = kProtocolVersion;
};

class HostRejected : public std::runtime_error {
public:
    HostRejected(ByeReason reason, const std::string& msg) : std::runtime_error(msg), reason(reason) {}
    ByeReason reason;
};

class LockstepClient {
public:
    // Performs HELLO / WELCOME / READY. Throws HostRejected on BYE.
    LockstepClient(std::unique_ptr<Channel> channel, ClientOptions options = {});

    int player_id() const { return player_id_; }
    const WorldState& world() const { return world_; }
    const ScenarioConfig& config() const { return config_; }

    // Sends this player's action for the current world tic.
    void submit(const Action& action);
    // Waits for the next batch and steps. False once the host said BYE or closed.
    bool advance(std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));
    // Steps through every batch already received, without waiting.
    int drain();

    const std::vector<Event>& last_events() const { return last_events_; }
    const std::vector<Action>& last_actions() const { return last_actions_; }
    std::optional<ByeReason> bye() const { return bye_; }
    void close();

private:
    bool apply(Message m);

    std::unique_ptr<Channel> channel_;
    ClientOptions options_;
    int player_id_ = 0;
    ScenarioConfig config_;
    WorldState world_;
    std::vector<Event> last_events_;
    std::vector<Action> last_actions_;
    std::optional<ByeReason> bye_;
};

}  // namespace pixelarena
