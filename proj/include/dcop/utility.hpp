#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

#include "dcop/errors.hpp"

namespace dcop {

// A utility value: either a finite signed 64-bit integer or negative infinity.
// Negative infinity is absorbing under addition and minimal under comparison.
// INT64_MIN is reserved as the infinity sentinel and is never a finite value;
// finite addition is overflow-checked and also rejects results that would
// collide with the sentinel.
class Utility {
public:
    constexpr Utility() noexcept : raw_(0) {}

    static constexpr Utility neg_inf() noexcept { return Utility(kSentinel); }

    static Utility finite(std::int64_t v) {
        if (v == kSentinel) throw OverflowError("finite utility out of range");
        return Utility(v);
    }

    constexpr bool is_finite() const noexcept { return raw_ != kSentinel; }
    constexpr bool is_neg_inf() const noexcept { return raw_ == kSentinel; }

    // Pre: is_finite().
    constexpr std::int64_t value() const noexcept { return raw_; }

    Utility operator+(Utility o) const {
        if (!is_finite() || !o.is_finite()) return neg_inf();
        std::int64_t r;
        if (__builtin_add_overflow(raw_, o.raw_, &r) || r == kSentinel)
            throw OverflowError("utility addition overflow");
        return Utility(r);
    }

    Utility& operator+=(Utility o) { return *this = *this + o; }

    // The sentinel is INT64_MIN, so raw comparison already orders -inf first.
    friend constexpr bool operator==(Utility a, Utility b) noexcept { return a.raw_ == b.raw_; }
    friend constexpr bool operator!=(Utility a, Utility b) noexcept { return a.raw_ != b.raw_; }
    friend constexpr bool operator<(Utility a, Utility b) noexcept { return a.raw_ < b.raw_; }
    friend constexpr bool operator<=(Utility a, Utility b) noexcept { return a.raw_ <= b.raw_; }
    friend constexpr bool operator>(Utility a, Utility b) noexcept { return a.raw_ > b.raw_; }
    friend constexpr bool operator>=(Utility a, Utility b) noexcept { return a.raw_ >= b.raw_; }

    friend constexpr Utility max(Utility a, Utility b) noexcept { return a < b ? b : a; }

    std::string str() const { return is_finite() ? std::to_string(raw_) : "neginf"; }

    friend std::ostream& operator<<(std::ostream& os, Utility u) { return os << u.str(); }

private:
    static constexpr std::int64_t kSentinel = std::numeric_limits<std::int64_t>::min();

    explicit constexpr Utility(std::int64_t raw) noexcept : raw_(raw) {}

    std::int64_t raw_;
};

}  // namespace dcop
