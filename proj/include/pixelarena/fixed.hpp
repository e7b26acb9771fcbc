#pragma once

// Deterministic number model for the simulation: 16.16 fixed point,
// 32-bit binary angles, a shared sine table and the world PRNG.

#include <array>
#include <compare>
#include <cstdint>

namespace pixelarena {

struct Fixed {
    static constexpr int kFracBits = 16;
    static constexpr std::int32_t kOne = 1 << kFracBits;

    std::int32_t raw = 0;

    static constexpr Fixed from_raw(std::int32_t r) { return Fixed{r}; }
    static constexpr Fixed from_int(std::int32_t v) { return Fixed{v * kOne}; }

    constexpr double to_double() const { return static_cast<double>(raw) / kOne; }
    // Integer part, truncated toward zero.
    constexpr std::int32_t to_int() const { return raw / kOne; }

    friend constexpr Fixed operator+(Fixed a, Fixed b) {
        return Fixed{static_cast<std::int32_t>(static_cast<std::int64_t>(a.raw) + b.raw)};
    }
    friend constexpr Fixed operator-(Fixed a, Fixed b) {
        return Fixed{static_cast<std::int32_t>(static_cast<std::int64_t>(a.raw) - b.raw)};
    }
    friend constexpr Fixed operator-(Fixed a) { return Fixed{-a.raw}; }
    // Products and quotients truncate toward zero (C++ integer division semantics).
    friend constexpr Fixed operator*(Fixed a, Fixed b) {
        return Fixed{static_cast<std::int32_t>(static_cast<std::int64_t>(a.raw) * b.raw / kOne)};
    }
    friend constexpr Fixed operator/(Fixed a, Fixed b) {
        return Fixed{static_cast<std::int32_t>(static_cast<std::int64_t>(a.raw) * kOne / b.raw)};
    }
    constexpr Fixed& operator+=(Fixed o) { return *this = *this + o; }
    constexpr Fixed& operator-=(Fixed o) { return *this = *this - o; }

    friend constexpr auto operator<=>(Fixed, Fixed) = default;
};

struct Vec2 {
    Fixed x;
    Fixed y;
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

// Binary angle: the full circle is 2^32, arithmetic wraps.
struct Angle {
    std::uint32_t bam = 0;

    static constexpr std::uint64_t kFullCircle = 1ull << 32;

    // Rounded to the nearest BAM step; meant for constants.
    static constexpr Angle from_degrees(double deg) {
        double turns = deg / 360.0;
        turns -= static_cast<double>(static_cast<std::int64_t>(turns));
        if (turns < 0) turns += 1.0;
        double v = turns * static_cast<double>(kFullCircle) + 0.5;
        return Angle{static_cast<std::uint32_t>(static_cast<std::uint64_t>(v) & 0xFFFFFFFFull)};
    }
    // Hundredths of a degree, the unit used on the wire; truncates toward zero.
    static constexpr std::int32_t centidegrees_to_bam_delta(std::int32_t centideg) {
        return static_cast<std::int32_t>(static_cast<std::int64_t>(centideg) * static_cast<std::int64_t>(kFullCircle) / 36000);
    }

    constexpr double to_degrees() const { return static_cast<double>(bam) * 360.0 / static_cast<double>(kFullCircle); }
    constexpr double to_radians() const { return static_cast<double>(bam) * 6.283185307179586476925 / static_cast<double>(kFullCircle); }

    friend constexpr Angle operator+(Angle a, Angle b) { return Angle{a.bam + b.bam}; }
    friend constexpr Angle operator-(Angle a, Angle b) { return Angle{a.bam - b.bam}; }
    constexpr Angle& operator+=(Angle o) { return *this = *this + o; }
    // Signed offset in (-2^31, 2^31].
    constexpr std::int32_t signed_bam() const { return static_cast<std::int32_t>(bam); }

    friend constexpr bool operator==(Angle, Angle) = default;
};

namespace detail {

inline constexpr int kTrigBits = 13;
inline constexpr int kTrigSize = 1 << kTrigBits;  // 8192 entries

constexpr double taylor_sine(double x) {
    double term = x;
    double sum = x;
    const double x2 = x * x;
    for (int n = 1; n < 14; ++n) {
        term *= -x2 / static_cast<double>((2 * n) * (2 * n + 1));
        sum += term;
    }
    return sum;
}

// Built with +,-,*,/ only, at compile time, so every platform gets identical bits.
constexpr std::array<std::int32_t, kTrigSize> make_sine_table() {
    std::array<std::int32_t, kTrigSize> table{};
    constexpr int quarter = kTrigSize / 4;
    constexpr double pi = 3.141592653589793238462643;
    for (int i = 0; i <= quarter; ++i) {
        const double x = static_cast<double>(i) * (2.0 * pi / kTrigSize);
        const double v = taylor_sine(x) * Fixed::kOne + 0.5;
        std::int32_t r = static_cast<std::int32_t>(v);
        if (r > Fixed::kOne) r = Fixed::kOne;
        table[i] = r;
    }
    for (int i = quarter + 1; i < 2 * quarter; ++i) table[i] = table[2 * quarter - i];
    table[2 * quarter] = 0;
    for (int i = 2 * quarter + 1; i < kTrigSize; ++i) table[i] = -table[i - 2 * quarter];
    return table;
}

inline constexpr std::array<std::int32_t, kTrigSize> kSineTable = make_sine_table();

}  // namespace detail

constexpr Fixed fine_sine(Angle a) {
    return Fixed::from_raw(detail::kSineTable[a.bam >> (32 - detail::kTrigBits)]);
}
constexpr Fixed fine_cosine(Angle a) {
    return Fixed::from_raw(detail::kSineTable[((a.bam >> (32 - detail::kTrigBits)) + detail::kTrigSize / 4) & (detail::kTrigSize - 1)]);
}

// Floor of the square root, integer only.
constexpr std::uint64_t isqrt(std::uint64_t v) {
    std::uint64_t result = 0;
    std::uint64_t bit = 1ull << 62;
    while (bit > v) bit >>= 2;
    while (bit != 0) {
        if (v >= result + bit) {
            v -= result + bit;
            result = (result >> 1) + bit;
        } else {
            result >>= 1;
        }
        bit >>= 2;
    }
    return result;
}

// Squared distance in raw units; exact (fits since map coordinates are < 2^31 raw).
constexpr std::uint64_t dist_sq_raw(Vec2 a, Vec2 b) {
    const std::int64_t dx = static_cast<std::int64_t>(a.x.raw) - b.x.raw;
    const std::int64_t dy = static_cast<std::int64_t>(a.y.raw) - b.y.raw;
    return static_cast<std::uint64_t>(dx * dx) + static_cast<std::uint64_t>(dy * dy);
}

// Euclidean distance in raw 16.16 units.
constexpr std::int64_t distance_raw(Vec2 a, Vec2 b) { return static_cast<std::int64_t>(isqrt(dist_sq_raw(a, b))); }

// xorshift64* generator; the state is never zero.
class Rng {
public:
    constexpr Rng() = default;
    constexpr explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9E3779B97F4A7C15ull) {
        if (state_ == 0) state_ = 0x2545F4914F6CDD1Dull;
    }

    constexpr std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 2685821657736338717ull;
    }
    constexpr std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(next() % n); }

    constexpr std::uint64_t state() const { return state_; }
    friend constexpr bool operator==(const Rng&, const Rng&) = default;

private:
    std::uint64_t state_ = 0x9E3779B97F4A7C15ull;
};

}  // namespace pixelarena
