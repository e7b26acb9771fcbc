#pragma once

#include <cstdint>

#include "pixelarena/fixed.hpp"

namespace pixelarena {

inline constexpr int kTicRate = 35;
inline constexpr int kMaxPlayers = 16;
inline constexpr int kCellUnits = 128;  // 128 units = 3 m
inline constexpr int kCellShift = 23;   // log2(128 * 65536)

// Every gameplay magnitude lives here so experiments can vary them. Two peers
// with different tables desync, which the hash checkpoints catch.
struct SimConstants {
    Fixed actor_radius = Fixed::from_int(20);
    Fixed forward_speed = Fixed::from_int(10);
    Fixed backward_speed = Fixed::from_int(8);
    Fixed strafe_speed = Fixed::from_int(10);
    Angle turn_step = Angle::from_degrees(5.0);
    std::int32_t max_turn_centideg = 1500;

    std::int32_t pistol_cooldown = 10;
    std::int32_t rocket_cooldown = 30;
    std::int32_t pistol_damage_unit = 5;  // damage = unit * (1 + rng % 3)
    Angle pistol_spread = Angle::from_degrees(2.0);
    Fixed hitscan_range = Fixed::from_int(4096);

    Fixed rocket_speed = Fixed::from_int(40);
    std::int32_t rocket_direct_damage = 80;
    std::int32_t blast_damage = 80;
    Fixed blast_radius = Fixed::from_int(128);

    std::int32_t max_health = 100;
    std::int32_t max_armor = 100;
    std::int32_t max_bullets = 200;
    std::int32_t max_rockets = 50;
    std::int32_t medikit_health = 25;
    std::int32_t armor_points = 50;
    std::int32_t bullets_pickup = 20;
    std::int32_t rockets_pickup = 10;
    std::int32_t launcher_rockets = 10;
    Fixed item_radius = Fixed::from_int(16);
    std::int32_t item_respawn_tics = 1050;

    std::int32_t barrel_health = 20;
    Fixed barrel_radius = Fixed::from_int(16);

    Angle half_fov = Angle::from_degrees(45.0);

    friend bool operator==(const SimConstants&, const SimConstants&) = default;
};

}  // namespace pixelarena
