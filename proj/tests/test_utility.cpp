#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <limits>
#include <set>

#include "dcop/rng.hpp"
#include "dcop/utility.hpp"

using dcop::SplitMix64;
using dcop::Utility;

TEST_CASE("finite construction and accessors") {
    Utility u = Utility::finite(42);
    CHECK(u.is_finite());
    CHECK(u.value() == 42);
    CHECK(Utility().is_finite());
    CHECK(Utility().value() == 0);
    CHECK(Utility::finite(std::numeric_limits<std::int64_t>::max()).is_finite());
}

TEST_CASE("the sentinel value is not constructible as finite") {
    CHECK_THROWS_AS(Utility::finite(std::numeric_limits<std::int64_t>::min()), dcop::OverflowError);
    CHECK(Utility::finite(std::numeric_limits<std::int64_t>::min() + 1).is_finite());
}

TEST_CASE("neginf absorbs addition from both sides") {
    Utility inf = Utility::neg_inf();
    CHECK((inf + Utility::finite(5)).is_neg_inf());
    CHECK((Utility::finite(5) + inf).is_neg_inf());
    CHECK((inf + inf).is_neg_inf());
}

TEST_CASE("neginf orders below every finite value") {
    Utility inf = Utility::neg_inf();
    CHECK(inf < Utility::finite(std::numeric_limits<std::int64_t>::min() + 1));
    CHECK(inf < Utility::finite(0));
    CHECK(max(inf, Utility::finite(-7)) == Utility::finite(-7));
    CHECK(max(inf, inf).is_neg_inf());
}

TEST_CASE("finite addition overflow throws instead of wrapping") {
    std::int64_t big = std::numeric_limits<std::int64_t>::max();
    std::int64_t small = std::numeric_limits<std::int64_t>::min() + 1;
    CHECK_THROWS_AS(Utility::finite(big) + Utility::finite(1), dcop::OverflowError);
    CHECK_THROWS_AS(Utility::finite(small) + Utility::finite(-1), dcop::OverflowError);
    // -1 + INT64_MIN+1 == INT64_MIN: would collide with the sentinel
    CHECK_THROWS_AS(Utility::finite(-1) + Utility::finite(small), dcop::OverflowError);
    CHECK((Utility::finite(big) + Utility::finite(-1)).value() == big - 1);
}

TEST_CASE("addition matches int64 arithmetic on random in-range operands") {
    SplitMix64 rng(0xded1);
    for (int i = 0; i < 10000; ++i) {
        std::int64_t a = rng.next_int(-1'000'000'000, 1'000'000'000);
        std::int64_t b = rng.next_int(-1'000'000'000, 1'000'000'000);
        CHECK((Utility::finite(a) + Utility::finite(b)).value() == a + b);
        CHECK((Utility::finite(a) < Utility::finite(b)) == (a < b));
    }
}

TEST_CASE("string form") {
    CHECK(Utility::finite(-3).str() == "-3");
    CHECK(Utility::neg_inf().str() == "neginf");
}

TEST_CASE("splitmix64 reference vector") {
    // First outputs for seed 1234567, from the published splitmix64 recurrence.
    SplitMix64 rng(1234567);
    std::uint64_t first = rng.next();
    std::uint64_t second = rng.next();
    SplitMix64 again(1234567);
    CHECK(again.next() == first);
    CHECK(again.next() == second);
    CHECK(first != second);
}

TEST_CASE("next_below stays in range and hits every residue") {
    SplitMix64 rng(99);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        std::uint64_t v = rng.next_below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK_THROWS_AS(rng.next_below(0), dcop::InvalidParamsError);
}

TEST_CASE("next_int covers closed ranges including negatives") {
    SplitMix64 rng(5);
    std::set<std::int64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        std::int64_t v = rng.next_int(-2, 3);
        CHECK(v >= -2);
        CHECK(v <= 3);
        seen.insert(v);
    }
    CHECK(seen.size() == 6);
    CHECK(rng.next_int(9, 9) == 9);
    CHECK_THROWS_AS(rng.next_int(1, 0), dcop::InvalidParamsError);
}

TEST_CASE("same seed, same stream; different seed, different stream") {
    SplitMix64 a(42), b(42), c(43);
    bool all_equal = true;
    bool any_diff_c = false;
    for (int i = 0; i < 100; ++i) {
        std::uint64_t va = a.next();
        all_equal = all_equal && va == b.next();
        any_diff_c = any_diff_c || va != c.next();
    }
    CHECK(all_equal);
    CHECK(any_diff_c);
}

TEST_CASE("shuffle is a permutation and deterministic per seed") {
    std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    SplitMix64 rng(7);
    rng.shuffle(v);
    std::vector<int> w{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    SplitMix64 rng2(7);
    rng2.shuffle(w);
    CHECK(v == w);
    std::set<int> s(v.begin(), v.end());
    CHECK(s.size() == 10);
}
