#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace zlink {

/// Deterministic random source: a seeded mt19937_64 engine with hand-rolled
/// samplers. The standard distributions are implementation-defined, so they
/// would break cross-platform reproducibility of seeded fixtures.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    /// Uniform in [0, n) by rejection; n > 0.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool chance(double p) {
        if (p <= 0) return false;
        if (p >= 1) return true;
        return unit() < p;
    }

    /// Uniform in [0, 1) with 53 bits.
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Log-uniform integer in [lo, hi], lo >= 1.
    std::int64_t log_uniform(std::int64_t lo, std::int64_t hi) {
        if (lo >= hi) return lo;
        double x = std::log(static_cast<double>(lo)) +
                   unit() * (std::log(static_cast<double>(hi)) - std::log(static_cast<double>(lo)));
        auto v = static_cast<std::int64_t>(std::exp(x));
        return std::clamp(v, lo, hi);
    }

    /// Index drawn proportionally to the given non-negative weights.
    std::size_t weighted(const std::vector<double>& weights) {
        double total = 0;
        for (double w : weights) total += w;
        double x = unit() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (x < weights[i]) return i;
            x -= weights[i];
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace zlink
