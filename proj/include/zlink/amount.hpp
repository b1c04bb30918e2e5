#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace zlink {

/// Exact non-negative coin amount counted in zatoshi (1 coin = 10^8 zatoshi).
///
/// All value arithmetic in the library is integer zatoshi; decimal coin
/// strings exist only at I/O boundaries. Sums of many amounts may legitimately
/// exceed the 21,000,000-coin cap (e.g. cumulative inflow), so the cap is
/// enforced when parsing external values, not on the type itself.
class Amount {
public:
    static constexpr std::int64_t kCoin = 100'000'000;
    static constexpr std::int64_t kMaxMoney = 21'000'000LL * kCoin;

    constexpr Amount() = default;

    /// Wraps a raw zatoshi count. Throws ParseError if negative.
    static Amount zat(std::int64_t v);

    /// Parses a decimal coin string with at most 8 fractional digits,
    /// e.g. "3479.51898254", "0.0001", "50", ".5". Throws ParseError on
    /// malformed input, more than 8 fractional digits, or values above
    /// the coin cap.
    static Amount parse(std::string_view coins);

    constexpr std::int64_t to_zat() const { return zat_; }

    /// Canonical decimal coin rendering: integer part, then a fractional
    /// part with trailing zeros stripped ("0.0001", "3479.51898254", "50").
    std::string coins() const;

    friend constexpr bool operator==(Amount a, Amount b) { return a.zat_ == b.zat_; }
    friend constexpr auto operator<=>(Amount a, Amount b) { return a.zat_ <=> b.zat_; }

    /// Overflow-checked addition.
    Amount operator+(Amount other) const;
    Amount& operator+=(Amount other);
    /// Subtraction; throws if the result would be negative.
    Amount operator-(Amount other) const;

private:
    constexpr explicit Amount(std::int64_t v) : zat_(v) {}
    std::int64_t zat_ = 0;
};

/// Renders a raw zatoshi count as decimal coins (same format as Amount::coins).
std::string zat_to_coins(std::int64_t zat);

/// The whole-number portion of a zatoshi count in coins (truncated), the way
/// coin totals are usually shown in tables.
std::string zat_to_whole_coins(std::int64_t zat);

} // namespace zlink
