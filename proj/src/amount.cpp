#include "zlink/amount.hpp"

#include "zlink/error.hpp"

#include <limits>

namespace zlink {

Amount Amount::zat(std::int64_t v) {
    if (v < 0) throw ParseError("amount must be non-negative, got " + std::to_string(v));
    return Amount(v);
}

Amount Amount::parse(std::string_view s) {
    if (s.empty()) throw ParseError("empty amount string");

    std::size_t pos = 0;
    std::int64_t whole = 0;
    std::size_t int_digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        int d = s[pos] - '0';
        if (whole > (std::numeric_limits<std::int64_t>::max() - d) / 10)
            throw ParseError("amount \"" + std::string(s) + "\" exceeds the coin cap");
        whole = whole * 10 + d;
        ++int_digits;
        ++pos;
    }

    std::int64_t frac = 0;
    std::size_t frac_digits = 0;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            if (frac_digits == 8)
                throw ParseError("amount \"" + std::string(s) + "\" has more than 8 fractional digits");
            frac = frac * 10 + (s[pos] - '0');
            ++frac_digits;
            ++pos;
        }
        if (frac_digits == 0)
            throw ParseError("amount \"" + std::string(s) + "\" has a decimal point with no digits");
    }

    if (pos != s.size())
        throw ParseError("malformed amount string \"" + std::string(s) + "\"");
    if (int_digits == 0 && frac_digits == 0)
        throw ParseError("malformed amount string \"" + std::string(s) + "\"");

    for (std::size_t i = frac_digits; i < 8; ++i) frac *= 10;

    if (whole > kMaxMoney / kCoin ||
        (whole == kMaxMoney / kCoin && frac > 0))
        throw ParseError("amount \"" + std::string(s) + "\" exceeds the coin cap");

    return Amount(whole * kCoin + frac);
}

std::string Amount::coins() const {
    return zat_to_coins(zat_);
}

Amount Amount::operator+(Amount other) const {
    if (zat_ > std::numeric_limits<std::int64_t>::max() - other.zat_)
        throw ParseError("amount addition overflow");
    return Amount(zat_ + other.zat_);
}

Amount& Amount::operator+=(Amount other) {
    *this = *this + other;
    return *this;
}

Amount Amount::operator-(Amount other) const {
    if (other.zat_ > zat_)
        throw ParseError("amount subtraction would be negative");
    return Amount(zat_ - other.zat_);
}

std::string zat_to_coins(std::int64_t zat) {
    bool neg = zat < 0;
    // zat == INT64_MIN cannot occur for amounts; guard anyway
    std::uint64_t v = neg ? static_cast<std::uint64_t>(-(zat + 1)) + 1 : static_cast<std::uint64_t>(zat);
    std::uint64_t whole = v / Amount::kCoin;
    std::uint64_t frac = v % Amount::kCoin;
    std::string out = neg ? "-" : "";
    out += std::to_string(whole);
    if (frac != 0) {
        char buf[9];
        for (int i = 7; i >= 0; --i) {
            buf[i] = static_cast<char>('0' + frac % 10);
            frac /= 10;
        }
        buf[8] = '\0';
        std::string_view digits(buf, 8);
        while (!digits.empty() && digits.back() == '0') digits.remove_suffix(1);
        out += '.';
        out += digits;
    }
    return out;
}

std::string zat_to_whole_coins(std::int64_t zat) {
    // truncates toward zero; negative values only arise from signed pool math
    return std::to_string(zat / Amount::kCoin);
}

} // namespace zlink
