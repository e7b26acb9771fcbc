#ifndef PIXELARENA_C_API_H
#define PIXELARENA_C_API_H

/* Flat C boundary over the environment, for scripting-runtime bindings.
   Functions returning int return 0 on success or a negative PA_ERR_* code;
   pa_last_error() then holds the message for the calling thread.
   Buffer pointers in pa_state stay valid until the next call on the same env. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
    PA_OK = 0,
    PA_ERR_ARITY = -1,
    PA_ERR_MODE = -2,
    PA_ERR_FINISHED = -3,
    PA_ERR_NETWORK = -4,
    PA_ERR_CONFIG = -5,
    PA_ERR_ARGUMENT = -6,
    PA_ERR_INTERNAL = -7
};

typedef struct pa_env pa_env;

typedef struct pa_state {
    uint32_t tic;
    int32_t width;
    int32_t height;
    int32_t channels; /* of screen and automap; depth and labels have 1 */
    const uint8_t* screen;
    const uint8_t* depth;   /* NULL when disabled */
    const uint8_t* labels;  /* NULL when disabled */
    const uint8_t* automap; /* NULL when disabled */
    const double* game_variables;
    size_t game_variable_count;
    size_t label_count;
    int32_t player_dead;
} pa_state;

typedef struct pa_label {
    uint8_t value;
    uint32_t object_id;
    const char* name;
    int32_t x, y, w, h;
    double pos_x, pos_y, angle_deg, vel_x, vel_y;
} pa_label;

const char* pa_last_error(void);

/* base_dir resolves a relative `map = ...`; may be NULL. */
pa_env* pa_env_create(const char* config_text, const char* base_dir);
pa_env* pa_env_load(const char* config_path);
void pa_env_destroy(pa_env* env);

int pa_env_new_episode(pa_env* env, const char* record_path);
int pa_env_get_state(pa_env* env, pa_state* out);
int pa_env_get_label(pa_env* env, size_t index, pa_label* out);
int pa_env_make_action(pa_env* env, const double* values, size_t count, int skip, double* reward);
int pa_env_advance_action(pa_env* env, int skip, int timeout_ms, int* advanced);
int pa_env_spectator_input(pa_env* env, const double* values, size_t count);
int pa_env_respawn_player(pa_env* env);

int pa_env_is_episode_finished(const pa_env* env);
int pa_env_is_player_dead(const pa_env* env);
uint32_t pa_env_tic(const pa_env* env);
double pa_env_total_reward(const pa_env* env);
uint64_t pa_env_state_hash(const pa_env* env);
size_t pa_env_button_count(const pa_env* env);
size_t pa_env_game_variable_count(const pa_env* env);

#ifdef __cplusplus
}
#endif

#endif
