#include <doctest.h>

#include <cmath>
#include <set>

#include "dlasso/rng.hpp"

using namespace dlasso;

TEST_CASE("streams are deterministic and role-separated") {
    RngStream a(42, 7, RngRole::Noise);
    RngStream b(42, 7, RngRole::Noise);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c(42, 7, RngRole::Design);
    RngStream d(42, 8, RngRole::Noise);
    RngStream e(43, 7, RngRole::Noise);
    RngStream base(42, 7, RngRole::Noise);
    bool all_equal_c = true, all_equal_d = true, all_equal_e = true;
    for (int i = 0; i < 16; ++i) {
        const auto v = base.next_u64();
        all_equal_c &= (c.next_u64() == v);
        all_equal_d &= (d.next_u64() == v);
        all_equal_e &= (e.next_u64() == v);
    }
    CHECK_FALSE(all_equal_c);
    CHECK_FALSE(all_equal_d);
    CHECK_FALSE(all_equal_e);
}

TEST_CASE("uniform01 stays in [0,1) and uniform_below respects the bound") {
    RngStream rng(1, 0, RngRole::Noise);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 3000; ++i) {
        const auto v = rng.uniform_below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("normal moments are sane") {
    RngStream rng(3, 1, RngRole::Noise);
    const int n = 200000;
    double sum = 0, sum2 = 0, sum4 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
        sum4 += z * z * z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sum2 / n - 1.0) < 0.02);
    CHECK(std::abs(sum4 / n - 3.0) < 0.1);
}
