#include "pixelarena/scenario.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace pixelarena {

namespace {

constexpr std::array<std::string_view, 4> kModeNames{"SYNC_PLAYER", "SYNC_SPECTATOR", "ASYNC_PLAYER", "ASYNC_SPECTATOR"};
constexpr std::array<std::string_view, kButtonCount> kButtonNames{
    "ATTACK",     "MOVE_FORWARD", "MOVE_BACKWARD",   "MOVE_LEFT",       "MOVE_RIGHT",
    "TURN_LEFT",  "TURN_RIGHT",   "SELECT_WEAPON_1", "SELECT_WEAPON_2", "TURN_DELTA"};
constexpr std::array<std::string_view, kGameVariableCount> kVariableNames{
    "HEALTH",      "ARMOR",        "SELECTED_WEAPON", "SELECTED_WEAPON_AMMO", "FRAGCOUNT",  "KILLCOUNT", "DEATHCOUNT",
    "HITS_TAKEN",  "DAMAGE_TAKEN", "ITEMCOUNT",       "POSITION_X",           "POSITION_Y", "ANGLE"};

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

template <std::size_t N>
std::optional<std::size_t> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
    const std::string u = upper(s);
    for (std::size_t i = 0; i < N; ++i)
        if (names[i] == u) return i;
    return std::nullopt;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return std::string(s.substr(1, s.size() - 2));
    return std::string(s);
}

class ConfigReader {
public:
    ConfigReader(std::string_view text, const ConfigParseOptions& options) : options_(options) {
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(start, end - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            lines_.push_back(line);
            if (end == text.size()) break;
            start = end + 1;
        }
    }

    ScenarioConfig parse() {
        ScenarioConfig cfg;
        std::optional<std::string> map_text;
        bool weapon_set = false;
        while (index_ < lines_.size()) {
            const int line_no = static_cast<int>(index_) + 1;
            std::string_view line = strip_comment(lines_[index_++]);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
            const std::string key = lower(trim(line.substr(0, eq)));
            std::string_view value = trim(line.substr(eq + 1));
            if (key.empty()) fail(line_no, "missing key");

            if (key == "map_inline") {
                if (value != "{") fail(line_no, "map_inline expects '{' followed by map lines and a closing '}'");
                map_text = read_map_block(line_no);
                continue;
            }
            std::vector<std::string> list;
            const bool is_list = !value.empty() && value.front() == '{';
            if (is_list) list = read_list(value.substr(1), line_no);

            auto need_scalar = [&] {
                if (is_list) fail(line_no, "type mismatch for '" + key + "': expected a single value, got a list");
            };
            auto need_list = [&] {
                if (!is_list) fail(line_no, "type mismatch for '" + key + "': expected a { ... } list");
            };

            if (key == "map") {
                need_scalar();
                map_text = read_map_file(unquote(value), line_no);
            } else if (key == "mode") {
                need_scalar();
                auto m = mode_from_string(value);
                if (!m) fail(line_no, "type mismatch for 'mode': unknown mode '" + std::string(value) + "'");
                cfg.mode = *m;
            } else if (key == "screen_resolution") {
                need_scalar();
                parse_resolution(value, cfg.render, line_no);
            } else if (key == "screen_format") {
                need_scalar();
                const std::string u = upper(value);
                if (u == "RGB24") cfg.render.format = ScreenFormat::rgb24;
                else if (u == "GRAY8") cfg.render.format = ScreenFormat::gray8;
                else fail(line_no, "type mismatch for 'screen_format': expected RGB24 or GRAY8");
            } else if (key == "render_crosshair") {
                need_scalar();
                cfg.render.crosshair = as_bool(key, value, line_no);
            } else if (key == "render_hud") {
                need_scalar();
                cfg.render.hud = as_bool(key, value, line_no);
            } else if (key == "depth_buffer_enabled") {
                need_scalar();
                cfg.render.depth_enabled = as_bool(key, value, line_no);
            } else if (key == "labels_buffer_enabled") {
                need_scalar();
                cfg.render.labels_enabled = as_bool(key, value, line_no);
            } else if (key == "automap_buffer_enabled") {
                need_scalar();
                cfg.render.automap_enabled = as_bool(key, value, line_no);
            } else if (key == "automap_full") {
                need_scalar();
                cfg.render.automap_full = as_bool(key, value, line_no);
            } else if (key == "available_buttons") {
                need_list();
                cfg.available_buttons.clear();
                for (const auto& item : list) {
                    auto b = button_from_string(item);
                    if (!b) fail(line_no, "unknown button '" + item + "'");
                    cfg.available_buttons.push_back(*b);
                }
            } else if (key == "available_game_variables") {
                need_list();
                cfg.available_game_variables.clear();
                for (const auto& item : list) {
                    auto v = game_variable_from_string(item);
                    if (!v) fail(line_no, "unknown game variable '" + item + "'");
                    cfg.available_game_variables.push_back(*v);
                }
            } else if (key == "living_reward") {
                need_scalar();
                cfg.rewards.living_reward = as_double(key, value, line_no);
            } else if (key == "death_penalty") {
                need_scalar();
                cfg.rewards.death_penalty = as_double(key, value, line_no);
            } else if (key == "kill_reward") {
                need_scalar();
                cfg.rewards.kill_reward = as_double(key, value, line_no);
            } else if (key == "suicide_penalty") {
                need_scalar();
                cfg.rewards.suicide_penalty = as_double(key, value, line_no);
            } else if (key == "item_reward") {
                need_scalar();
                cfg.rewards.item_reward = as_double(key, value, line_no);
            } else if (key == "damage_taken_penalty") {
                need_scalar();
                cfg.rewards.damage_taken_penalty = as_double(key, value, line_no);
            } else if (key == "damage_inflicted_reward") {
                need_scalar();
                cfg.rewards.damage_inflicted_reward = as_double(key, value, line_no);
            } else if (key == "episode_timeout") {
                need_scalar();
                cfg.episode_timeout = as_uint<std::uint32_t>(key, value, line_no);
            } else if (key == "frag_limit") {
                need_scalar();
                cfg.frag_limit = as_uint<std::uint32_t>(key, value, line_no);
            } else if (key == "episode_ends_on_death") {
                need_scalar();
                cfg.episode_ends_on_death = as_bool(key, value, line_no);
            } else if (key == "respawn_delay") {
                need_scalar();
                cfg.respawn_delay = as_uint<std::uint32_t>(key, value, line_no);
            } else if (key == "spawn_protection") {
                need_scalar();
                cfg.spawn_protection = as_uint<std::uint32_t>(key, value, line_no);
            } else if (key == "auto_respawn") {
                need_scalar();
                cfg.auto_respawn = as_bool(key, value, line_no);
            } else if (key == "start_weapon") {
                need_scalar();
                const std::string u = upper(value);
                if (u == "PISTOL") cfg.start_weapon = Weapon::pistol;
                else if (u == "ROCKET_LAUNCHER") cfg.start_weapon = Weapon::rocket_launcher;
                else fail(line_no, "type mismatch for 'start_weapon': expected PISTOL or ROCKET_LAUNCHER");
                weapon_set = true;
            } else if (key == "start_bullets") {
                need_scalar();
                cfg.start_bullets = static_cast<std::int32_t>(as_uint<std::uint32_t>(key, value, line_no));
            } else if (key == "start_rockets") {
                need_scalar();
                cfg.start_rockets = static_cast<std::int32_t>(as_uint<std::uint32_t>(key, value, line_no));
            } else if (key == "seed") {
                need_scalar();
                cfg.seed = as_uint<std::uint64_t>(key, value, line_no);
            } else if (key == "players") {
                need_scalar();
                cfg.players = static_cast<int>(as_uint<std::uint32_t>(key, value, line_no));
            } else if (key == "bots") {
                need_list();
                cfg.bots = list;
            } else if (key == "args") {
                if (is_list) {
                    cfg.args = list;
                } else {
                    cfg.args.clear();
                    std::istringstream in{unquote(value)};
                    for (std::string tok; in >> tok;) cfg.args.push_back(tok);
                }
            } else {
                fail(line_no, "unknown key '" + key + "'");
            }
        }
        (void)weapon_set;

        if (!map_text) {
            if (options_.map_text) map_text = *options_.map_text;
            else throw ParseError("config has no map (set 'map' or 'map_inline')");
        }
        cfg.map_text = serialize_map(parse_map(*map_text));
        validate(cfg);
        return cfg;
    }

private:
    [[noreturn]] static void fail(int line_no, const std::string& msg) {
        throw ParseError("line " + std::to_string(line_no) + ": " + msg);
    }

    static std::string_view strip_comment(std::string_view line) {
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) return line.substr(0, i);
        }
        return line;
    }

    std::vector<std::string> read_list(std::string_view rest, int line_no) {
        std::vector<std::string> items;
        auto consume = [&](std::string_view chunk) -> bool {
            std::size_t close = std::string_view::npos;
            bool in_quotes = false;
            for (std::size_t i = 0; i < chunk.size() && close == std::string_view::npos; ++i) {
                if (chunk[i] == '"') in_quotes = !in_quotes;
                else if (chunk[i] == '}' && !in_quotes) close = i;
            }
            const std::string_view body = close == std::string_view::npos ? chunk : chunk.substr(0, close);
            std::string token;
            bool quoted = false;
            for (char c : body) {
                if (c == '"') {
                    quoted = !quoted;
                    continue;
                }
                if (!quoted && (std::isspace(static_cast<unsigned char>(c)) || c == ',')) {
                    if (!token.empty()) items.push_back(std::move(token));
                    token.clear();
                } else {
                    token.push_back(c);
                }
            }
            if (!token.empty()) items.push_back(std::move(token));
            if (close != std::string_view::npos && !trim(chunk.substr(close + 1)).empty())
                fail(line_no, "unexpected text after '}'");
            return close != std::string_view::npos;
        };
        if (consume(rest)) return items;
        while (index_ < lines_.size()) {
            if (consume(strip_comment(lines_[index_++]))) return items;
        }
        fail(line_no, "unterminated '{' list");
    }

    std::string read_map_block(int line_no) {
        std::string text;
        while (index_ < lines_.size()) {
            const std::string_view line = lines_[index_++];
            if (trim(line) == "}") return text;
            text.append(trim(line));
            text.push_back('\n');
        }
        fail(line_no, "unterminated map_inline block");
    }

    std::string read_map_file(const std::string& path, int line_no) {
        std::filesystem::path p(path);
        if (p.is_relative() && !options_.base_dir.empty()) p = options_.base_dir / p;
        std::ifstream in(p, std::ios::binary);
        if (!in) fail(line_no, "cannot read map file '" + p.string() + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    static bool as_bool(const std::string& key, std::string_view v, int line_no) {
        const std::string l = lower(v);
        if (l == "true" || l == "1" || l == "yes") return true;
        if (l == "false" || l == "0" || l == "no") return false;
        fail(line_no, "type mismatch for '" + key + "': expected a boolean, got '" + std::string(v) + "'");
    }

    static double as_double(const std::string& key, std::string_view v, int line_no) {
        double out = 0;
        const char* end = v.data() + v.size();
        const char* begin = v.data();
        if (!v.empty() && *begin == '+') ++begin;
        auto [ptr, ec] = std::from_chars(begin, end, out);
        if (ec != std::errc{} || ptr != end)
            fail(line_no, "type mismatch for '" + key + "': expected a number, got '" + std::string(v) + "'");
        return out;
    }

    template <class T>
    static T as_uint(const std::string& key, std::string_view v, int line_no) {
        T out = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || ptr != v.data() + v.size())
            fail(line_no, "type mismatch for '" + key + "': expected a non-negative integer, got '" + std::string(v) + "'");
        return out;
    }

    static void parse_resolution(std::string_view v, RenderOptions& render, int line_no) {
        std::string u = upper(v);
        if (u.rfind("RES_", 0) == 0) u = u.substr(4);
        const auto x = u.find('X');
        int w = 0, h = 0;
        bool ok = x != std::string::npos;
        if (ok) {
            auto r1 = std::from_chars(u.data(), u.data() + x, w);
            auto r2 = std::from_chars(u.data() + x + 1, u.data() + u.size(), h);
            ok = r1.ec == std::errc{} && r1.ptr == u.data() + x && r2.ec == std::errc{} && r2.ptr == u.data() + u.size();
        }
        if (!ok || w < 1 || h < 1 || w > 4096 || h > 4096)
            fail(line_no, "type mismatch for 'screen_resolution': expected WIDTHxHEIGHT, got '" + std::string(v) + "'");
        render.width = w;
        render.height = h;
    }

    const ConfigParseOptions& options_;
    std::vector<std::string_view> lines_;
    std::size_t index_ = 0;
};

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

std::string_view to_string(Mode m) { return kModeNames[static_cast<std::size_t>(m)]; }
std::string_view to_string(Button b) { return kButtonNames[static_cast<std::size_t>(b)]; }
std::string_view to_string(GameVariable v) { return kVariableNames[static_cast<std::size_t>(v)]; }

std::optional<Mode> mode_from_string(std::string_view s) {
    if (auto i = lookup(kModeNames, s)) return static_cast<Mode>(*i);
    return std::nullopt;
}
std::optional<Button> button_from_string(std::string_view s) {
    if (auto i = lookup(kButtonNames, s)) return static_cast<Button>(*i);
    return std::nullopt;
}
std::optional<GameVariable> game_variable_from_string(std::string_view s) {
    if (auto i = lookup(kVariableNames, s)) return static_cast<GameVariable>(*i);
    return std::nullopt;
}

MatchRules ScenarioConfig::rules() const {
    MatchRules r;
    r.respawn_delay = respawn_delay;
    r.spawn_protection = spawn_protection;
    r.auto_respawn = auto_respawn;
    r.loadout.rocket_launcher = start_weapon == Weapon::rocket_launcher;
    r.loadout.selected = start_weapon;
    r.loadout.bullets = start_bullets;
    r.loadout.rockets = start_rockets;
    return r;
}

std::string ScenarioConfig::player_name() const {
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "+name") return args[i + 1];
    return "player";
}

void validate(const ScenarioConfig& config) {
    if (config.episode_timeout == 0 && config.frag_limit == 0)
        throw ConfigError("config needs episode_timeout > 0 or frag_limit > 0");
    if (config.players < 1 || config.players > kMaxPlayers)
        throw ConfigError("players must be within 1.." + std::to_string(kMaxPlayers));
    if (static_cast<int>(config.bots.size()) > config.players - 1)
        throw ConfigError("more bots than free player slots");
    if (!config.render.valid()) throw ConfigError("invalid screen resolution");
    std::set<Button> buttons(config.available_buttons.begin(), config.available_buttons.end());
    if (buttons.size() != config.available_buttons.size()) throw ConfigError("duplicate entry in available_buttons");
    std::set<GameVariable> vars(config.available_game_variables.begin(), config.available_game_variables.end());
    if (vars.size() != config.available_game_variables.size())
        throw ConfigError("duplicate entry in available_game_variables");
    if (config.map_text.empty()) throw ConfigError("config has no map");
    // The list grammar has no escapes.
    for (const auto& list : {&config.args, &config.bots})
        for (const auto& item : *list)
            if (item.find_first_of("\"\n\r") != std::string::npos)
                throw ConfigError("list entry may not contain quotes or line breaks: " + item);
}

ScenarioConfig parse_config(std::string_view text, const ConfigParseOptions& options) {
    return ConfigReader(text, options).parse();
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    ConfigParseOptions options;
    options.base_dir = path.parent_path();
    return parse_config(ss.str(), options);
}

std::string serialize_config(const ScenarioConfig& c, bool include_map) {
    std::ostringstream out;
    auto b = [](bool v) { return v ? "true" : "false"; };
    out << "mode = " << to_string(c.mode) << '\n';
    out << "screen_resolution = " << c.render.width << 'x' << c.render.height << '\n';
    out << "screen_format = " << (c.render.format == ScreenFormat::rgb24 ? "RGB24" : "GRAY8") << '\n';
    out << "render_crosshair = " << b(c.render.crosshair) << '\n';
    out << "render_hud = " << b(c.render.hud) << '\n';
    out << "depth_buffer_enabled = " << b(c.render.depth_enabled) << '\n';
    out << "labels_buffer_enabled = " << b(c.render.labels_enabled) << '\n';
    out << "automap_buffer_enabled = " << b(c.render.automap_enabled) << '\n';
    out << "automap_full = " << b(c.render.automap_full) << '\n';
    out << "available_buttons = {";
    for (auto btn : c.available_buttons) out << ' ' << to_string(btn);
    out << " }\n";
    out << "available_game_variables = {";
    for (auto v : c.available_game_variables) out << ' ' << to_string(v);
    out << " }\n";
    out << "living_reward = " << format_double(c.rewards.living_reward) << '\n';
    out << "death_penalty = " << format_double(c.rewards.death_penalty) << '\n';
    out << "kill_reward = " << format_double(c.rewards.kill_reward) << '\n';
    out << "suicide_penalty = " << format_double(c.rewards.suicide_penalty) << '\n';
    out << "item_reward = " << format_double(c.rewards.item_reward) << '\n';
    out << "damage_taken_penalty = " << format_double(c.rewards.damage_taken_penalty) << '\n';
    out << "damage_inflicted_reward = " << format_double(c.rewards.damage_inflicted_reward) << '\n';
    out << "episode_timeout = " << c.episode_timeout << '\n';
    out << "frag_limit = " << c.frag_limit << '\n';
    out << "episode_ends_on_death = " << b(c.episode_ends_on_death) << '\n';
    out << "respawn_delay = " << c.respawn_delay << '\n';
    out << "spawn_protection = " << c.spawn_protection << '\n';
    out << "auto_respawn = " << b(c.auto_respawn) << '\n';
    out << "start_weapon = " << (c.start_weapon == Weapon::pistol ? "PISTOL" : "ROCKET_LAUNCHER") << '\n';
    out << "start_bullets = " << c.start_bullets << '\n';
    out << "start_rockets = " << c.start_rockets << '\n';
    out << "seed = " << c.seed << '\n';
    out << "players = " << c.players << '\n';
    out << "bots = {";
    for (const auto& bot : c.bots) out << ' ' << bot;
    out << " }\n";
    out << "args = {";
    for (const auto& a : c.args) out << " \"" << a << '"';
    out << " }\n";
    if (include_map) out << "map_inline = {\n" << c.map_text << "}\n";
    return out.str();
}

std::string_view default_config_text() {
    return R"(# Small two-room deathmatch arena.
mode = SYNC_PLAYER
screen_resolution = 320x240
screen_format = RGB24
available_buttons = { ATTACK MOVE_FORWARD MOVE_BACKWARD MOVE_LEFT MOVE_RIGHT TURN_LEFT TURN_RIGHT SELECT_WEAPON_1 SELECT_WEAPON_2 TURN_DELTA }
available_game_variables = { HEALTH SELECTED_WEAPON_AMMO }
living_reward = -0.01
kill_reward = 1
death_penalty = 1
episode_timeout = 2100
start_weapon = PISTOL
start_bullets = 50
map_inline = {
################
#S....a...#...S#
#.........#....#
#..M...B..#..A.#
#.....#####....#
#..............#
#..r...R....M..#
#####.....######
#S.............#
#......a.....S.#
################
}
)";
}

ScenarioConfig default_config() { return parse_config(default_config_text()); }

double reward_for(std::span<const Event> events, const ScenarioConfig& config, int player) {
    const Rewards& r = config.rewards;
    double total = r.living_reward;
    for (const auto& ev : events) {
        if (const auto* d = std::get_if<DeathEvent>(&ev)) {
            const bool suicide = !d->killer || *d->killer == d->victim;
            if (d->victim == player) {
                total -= r.death_penalty;
                if (suicide) total -= r.suicide_penalty;
            } else if (d->killer == player) {
                total += r.kill_reward;
            }
        } else if (const auto* p = std::get_if<PickupEvent>(&ev)) {
            if (p->actor == player) total += r.item_reward;
        } else if (const auto* dmg = std::get_if<DamageEvent>(&ev)) {
            if (dmg->victim == player) total -= r.damage_taken_penalty * dmg->amount;
            else if (dmg->attacker == player) total += r.damage_inflicted_reward * dmg->amount;
        }
    }
    return total;
}

}  // namespace pixelarena
