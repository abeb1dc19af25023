#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace crowdsim {

// Currency in integer minor units. All revenue bookkeeping is exact.
using Money = std::int64_t;
// 1-based discrete period index.
using Period = std::int32_t;
using Count = std::int32_t;
using BackerId = std::int64_t;

// Exact non-negative rational, used for status fractions and the price
// fraction P/G. Dominance rules compare fractions for *equality* (duplicate
// removal), so floating point is not an option here.
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Ratio() = default;

    Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den == 0)
            throw std::invalid_argument("Ratio: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        if (num == 0) {
            den = 1;
            return;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        num /= g;
        den /= g;
    }

    static Ratio of_money(Money part, Money whole) { return Ratio(part, whole); }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    // Normalized representation makes equality memberwise.
    friend bool operator==(const Ratio&, const Ratio&) = default;

    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
        const __int128 lhs = static_cast<__int128>(a.num) * b.den;
        const __int128 rhs = static_cast<__int128>(b.num) * a.den;
        if (lhs < rhs)
            return std::strong_ordering::less;
        if (lhs > rhs)
            return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
};

// a - b >= unit * steps, evaluated exactly in 128-bit intermediates.
inline bool gain_at_least(const Ratio& a, const Ratio& b, const Ratio& unit, std::int64_t steps) {
    const __int128 diff = static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den;
    const __int128 lhs = diff * unit.den;
    const __int128 rhs = static_cast<__int128>(unit.num) * steps *
                         (static_cast<__int128>(a.den) * b.den);
    return lhs >= rhs;
}

// x == k * unit for some integer k >= 0.
inline bool is_multiple_of(const Ratio& x, const Ratio& unit) {
    if (unit.num == 0)
        return x.num == 0;
    if (x.num == 0)
        return true;
    // x / unit = (x.num * unit.den) / (x.den * unit.num) must be a non-negative integer.
    const __int128 n = static_cast<__int128>(x.num) * unit.den;
    const __int128 d = static_cast<__int128>(x.den) * unit.num;
    if (d == 0)
        return false;
    return n >= 0 && d > 0 && n % d == 0;
}

} // namespace crowdsim
