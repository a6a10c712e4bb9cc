#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coset_chains/partition.hpp"

#include <algorithm>

using namespace coset_chains;

TEST_CASE("partition enumeration counts match the classical sequence") {
    // p(1)..p(12)
    const long expected[] = {1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77};
    for (int n = 1; n <= 12; ++n)
        CHECK(partitions_of(n).size() == static_cast<std::size_t>(expected[n - 1]));
}

TEST_CASE("partition enumeration order is decreasing lexicographic") {
    CHECK(partitions_of(1) == std::vector<Partition>{{1}});
    const auto p4 = partitions_of(4);
    const std::vector<Partition> expected = {
        {4}, {3, 1}, {2, 2}, {2, 1, 1}, {1, 1, 1, 1}};
    CHECK(p4 == expected);
    // Each partition appears exactly once and in strictly decreasing order.
    for (int n = 1; n <= 10; ++n) {
        const auto ps = partitions_of(n);
        for (std::size_t i = 0; i + 1 < ps.size(); ++i)
            CHECK(std::lexicographical_compare(ps[i + 1].begin(), ps[i + 1].end(),
                                               ps[i].begin(), ps[i].end()));
        for (const auto& p : ps) {
            CHECK(is_valid_partition(p));
            CHECK(partition_sum(p) == n);
        }
    }
}

TEST_CASE("Kostka fixtures") {
    CHECK(kostka({3, 2}, {2, 2, 1}) == 2);
    CHECK(kostka({4, 1}, {3, 1, 1}) == 2);
    CHECK(kostka({4, 1}, {2, 2, 1}) == 2);
    CHECK(kostka({3, 2}, {3, 1, 1}) == 1);
    CHECK(kostka({3, 1, 1}, {3, 1, 1}) == 1);
    CHECK(kostka({3, 1, 1}, {2, 2, 1}) == 1);
    // Single-row shape: the weakly increasing filling is forced.
    for (int n = 1; n <= 8; ++n)
        for (const auto& w : partitions_of(n))
            CHECK(kostka({n}, w) == 1);
    // Weight (1,1,1,1): standard Young tableau counts for n = 4.
    CHECK(kostka({1, 1, 1, 1}, {1, 1, 1, 1}) == 1);
    CHECK(kostka({2, 1, 1}, {1, 1, 1, 1}) == 3);
    CHECK(kostka({2, 2}, {1, 1, 1, 1}) == 2);
    CHECK(kostka({3, 1}, {1, 1, 1, 1}) == 3);
    CHECK(kostka({4}, {1, 1, 1, 1}) == 1);
    CHECK_THROWS(kostka({3, 1}, {2, 1}));
}

TEST_CASE("majorization fixtures") {
    CHECK(majorizes({4, 4, 0, 0}, {2, 2, 2, 2}));
    CHECK(majorizes({3, 3, 1, 1}, {2, 2, 2, 2}));
    CHECK(majorizes({4, 4, 0, 0}, {3, 3, 1, 1}));
    CHECK_FALSE(majorizes({2, 2, 2, 2}, {4, 4, 0, 0}));
    CHECK(majorizes({2, 1, 1}, {2, 1, 1}));          // reflexive
    CHECK(majorizes({2, 1, 1}, {1, 1, 1, 1}));       // zero-padding
    CHECK(majorizes({2, 2}, {2, 1, 1}));
    CHECK_THROWS(majorizes({2, 1}, {1, 1}));
}

TEST_CASE("Kostka positivity is equivalent to majorization (exhaustive n <= 8)") {
    for (int n = 1; n <= 8; ++n) {
        const auto ps = partitions_of(n);
        for (const auto& shape : ps)
            for (const auto& weight : ps) {
                const bool positive = kostka(shape, weight) > 0;
                CHECK(positive == majorizes(shape, weight));
            }
    }
}

TEST_CASE("Kostka is monotone along majorization of the weight (exhaustive n <= 8)") {
    // If w' majorizes w (both below shape) then the w-count is >= the w'-count.
    for (int n = 1; n <= 8; ++n) {
        const auto ps = partitions_of(n);
        for (const auto& shape : ps)
            for (const auto& w : ps)
                for (const auto& w2 : ps) {
                    if (!majorizes(w2, w) || !majorizes(shape, w2)) continue;
                    CHECK(kostka(shape, w) >= kostka(shape, w2));
                }
    }
}

TEST_CASE("hook shape (n-1,1) counts parts minus one (exhaustive n <= 10)") {
    for (int n = 2; n <= 10; ++n)
        for (const auto& w : partitions_of(n))
            CHECK(kostka({n - 1, 1}, w) ==
                  static_cast<long long>(w.size()) - 1);
}

TEST_CASE("Kostka vanishing constraints") {
    for (int n = 1; n <= 8; ++n) {
        const auto ps = partitions_of(n);
        for (const auto& shape : ps)
            for (const auto& weight : ps) {
                if (shape.size() > weight.size()) CHECK(kostka(shape, weight) == 0);
                if (shape[0] < weight[0]) CHECK(kostka(shape, weight) == 0);
            }
    }
}
