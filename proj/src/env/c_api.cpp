#include "pixelarena/c_api.h"

#include <memory>
#include <string>

#include "pixelarena/env.hpp"
#include "pixelarena/map_grid.hpp"

using namespace pixelarena;

struct pa_env {
    std::unique_ptr<Env> env;
    std::shared_ptr<const FrameBundle> frame;  // keeps state buffers alive
    std::vector<double> vars;
};

namespace {

thread_local std::string last_error;

int fail(int code, const char* msg) {
    last_error = msg;
    return code;
}

template <class F>
int guarded(F&& f) {
    try {
        f();
        last_error.clear();
        return PA_OK;
    } catch (const EnvError& e) {
        switch (e.kind) {
            case EnvError::Kind::arity: return fail(PA_ERR_ARITY, e.what());
            case EnvError::Kind::mode: return fail(PA_ERR_MODE, e.what());
            case EnvError::Kind::finished: return fail(PA_ERR_FINISHED, e.what());
            case EnvError::Kind::network: return fail(PA_ERR_NETWORK, e.what());
        }
        return fail(PA_ERR_INTERNAL, e.what());
    } catch (const ConfigError& e) {
        return fail(PA_ERR_CONFIG, e.what());
    } catch (const ParseError& e) {
        return fail(PA_ERR_CONFIG, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(PA_ERR_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(PA_ERR_INTERNAL, e.what());
    }
}

}  // namespace

extern "C" {

const char* pa_last_error(void) { return last_error.c_str(); }

pa_env* pa_env_create(const char* config_text, const char* base_dir) {
    if (config_text == nullptr) {
        fail(PA_ERR_ARGUMENT, "config_text is NULL");
        return nullptr;
    }
    auto out = std::make_unique<pa_env>();
    const int rc = guarded([&] {
        ConfigParseOptions opts;
        if (base_dir != nullptr) opts.base_dir = base_dir;
        out->env = std::make_unique<Env>(parse_config(config_text, opts));
    });
    return rc == PA_OK ? out.release() : nullptr;
}

pa_env* pa_env_load(const char* config_path) {
    if (config_path == nullptr) {
        fail(PA_ERR_ARGUMENT, "config_path is NULL");
        return nullptr;
    }
    auto out = std::make_unique<pa_env>();
    const int rc = guarded([&] { out->env = std::make_unique<Env>(load_config(config_path)); });
    return rc == PA_OK ? out.release() : nullptr;
}

void pa_env_destroy(pa_env* env) { delete env; }

int pa_env_new_episode(pa_env* env, const char* record_path) {
    if (env == nullptr) return fail(PA_ERR_ARGUMENT, "env is NULL");
    return guarded([&] {
        if (record_path != nullptr)
            env->env->new_episode(std::filesystem::path(record_path));
        else
            env->env->new_episode();
    });
}

int pa_env_get_state(pa_env* env, pa_state* out) {
    if (env == nullptr || out == nullptr) return fail(PA_ERR_ARGUMENT, "NULL argument");
    return guarded([&] {
        const EnvState& s = env->env->get_state();
        env->frame = s.frame;
        env->vars = s.game_variables;
        const FrameBundle& f = *env->frame;
        out->tic = s.tic;
        out->width = f.width;
        out->height = f.height;
        out->channels = f.format == ScreenFormat::rgb24 ? 3 : 1;
        out->screen = f.screen.data();
        out->depth = f.depth ? f.depth->data() : nullptr;
        out->labels = f.labels ? f.labels->data() : nullptr;
        out->automap = f.automap ? f.automap->data() : nullptr;
        out->game_variables = env->vars.data();
        out->game_variable_count = env->vars.size();
        out->label_count = f.label_entries.size();
        out->player_dead = s.player_dead ? 1 : 0;
    });
}

int pa_env_get_label(pa_env* env, size_t index, pa_label* out) {
    if (env == nullptr || out == nullptr) return fail(PA_ERR_ARGUMENT, "NULL argument");
    if (!env->frame) return fail(PA_ERR_ARGUMENT, "no state fetched yet");
    if (index >= env->frame->label_entries.size()) return fail(PA_ERR_ARGUMENT, "label index out of range");
    const LabelEntry& l = env->frame->label_entries[index];
    *out = pa_label{l.value, l.object_id, l.name.c_str(), l.x, l.y, l.w, l.h, l.pos_x, l.pos_y, l.angle_deg, l.vel_x, l.vel_y};
    last_error.clear();
    return PA_OK;
}

int pa_env_make_action(pa_env* env, const double* values, size_t count, int skip, double* reward) {
    if (env == nullptr || (values == nullptr && count > 0)) return fail(PA_ERR_ARGUMENT, "NULL argument");
    return guarded([&] {
        const double r = env->env->make_action(std::span<const double>(values, count), skip);
        if (reward != nullptr) *reward = r;
    });
}

int pa_env_advance_action(pa_env* env, int skip, int timeout_ms, int* advanced) {
    if (env == nullptr) return fail(PA_ERR_ARGUMENT, "env is NULL");
    return guarded([&] {
        const int n = env->env->advance_action(skip, std::chrono::milliseconds(timeout_ms));
        if (advanced != nullptr) *advanced = n;
    });
}

int pa_env_spectator_input(pa_env* env, const double* values, size_t count) {
    if (env == nullptr || (values == nullptr && count > 0)) return fail(PA_ERR_ARGUMENT, "NULL argument");
    return guarded([&] { env->env->spectator_input(std::span<const double>(values, count)); });
}

int pa_env_respawn_player(pa_env* env) {
    if (env == nullptr) return fail(PA_ERR_ARGUMENT, "env is NULL");
    return guarded([&] { env->env->respawn_player(); });
}

int pa_env_is_episode_finished(const pa_env* env) { return env != nullptr && env->env->is_episode_finished() ? 1 : 0; }
int pa_env_is_player_dead(const pa_env* env) { return env != nullptr && env->env->is_player_dead() ? 1 : 0; }
uint32_t pa_env_tic(const pa_env* env) { return env != nullptr ? env->env->tic() : 0; }
double pa_env_total_reward(const pa_env* env) { return env != nullptr ? env->env->total_reward() : 0.0; }
uint64_t pa_env_state_hash(const pa_env* env) { return env != nullptr ? env->env->state_hash() : 0; }
size_t pa_env_button_count(const pa_env* env) { return env != nullptr ? env->env->config().available_buttons.size() : 0; }
size_t pa_env_game_variable_count(const pa_env* env) {
    return env != nullptr ? env->env->config().available_game_variables.size() : 0;
}

}  // extern "C"
