#pragma once

#include <cstdint>
#include <vector>

#include "dcop/errors.hpp"

namespace dcop {

// splitmix64. All seeded generation goes through this so instances are
// bit-reproducible across platforms and standard library versions; the
// std:: distributions make no such promise.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n). Rejection sampling keeps it unbiased.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw InvalidParamsError("next_below(0)");
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform in [lo, hi], both inclusive.
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw InvalidParamsError("next_int: empty range");
        std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
        if (span == 0) {  // full 64-bit range
            return static_cast<std::int64_t>(next());
        }
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + next_below(span));
    }

    // An independent child stream; drawing from the child never perturbs the parent
    // beyond the single next() consumed here.
    SplitMix64 split() noexcept { return SplitMix64(next() ^ 0x5851f42d4c957f2dULL); }

    // Fisher-Yates.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace dcop
