#include <set>

#include "doctest.h"
#include "kpart/formulation.hpp"
#include "kpart/partition.hpp"
#include "oracles.hpp"

using namespace kpart;

TEST_CASE("partition canonical form")
{
    const KPartition p(5, {{5}, {4, 3}, {2, 1}});
    CHECK(p.clusters() == std::vector<VertexSet>{{1, 2}, {3, 4}, {5}});
    CHECK(p.k() == 3);
    CHECK(p.together(3, 4));
    CHECK_FALSE(p.together(2, 3));
    CHECK(p.is_representative(3));
    CHECK_FALSE(p.is_representative(4));
    CHECK(p == KPartition(5, {{1, 2}, {3, 4}, {5}}));
    CHECK_THROWS_AS(KPartition(5, {{1, 2}, {3, 4}}), std::invalid_argument);
    CHECK_THROWS_AS(KPartition(3, {{1, 2}, {2, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(KPartition(3, {{1, 2, 3}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(KPartition(3, {{1, 2, 4}}), std::invalid_argument);
}

TEST_CASE("characteristic vectors of small partitions")
{
    const VarSpace s(5, 3);
    const auto x = char_vector(KPartition(5, {{1, 2}, {3, 4}, {5}}));
    REQUIRE(x.size() == 12);
    CHECK(x[s.rep(4)] == 0);
    CHECK(x[s.rep(5)] == 1);
    int edges = 0;
    for (int i = 1; i <= 5; ++i)
        for (int j = i + 1; j <= 5; ++j) edges += x[s.edge(i, j)];
    CHECK(edges == 2);
    CHECK(x[s.edge(1, 2)] == 1);
    CHECK(x[s.edge(3, 4)] == 1);

    const VarSpace s4(5, 4);
    const auto y = char_vector(KPartition(5, {{1}, {2}, {3}, {4, 5}}));
    CHECK(y[s4.rep(4)] == 1);
    CHECK(y[s4.rep(5)] == 0);
    CHECK(y[s4.edge(4, 5)] == 1);
    int total = 0;
    for (int p = s4.rep_count(); p < s4.dim(); ++p) total += y[p];
    CHECK(total == 1);
}

TEST_CASE("variable names")
{
    const VarSpace s(5, 3);
    CHECK(s.name(0) == "r4");
    CHECK(s.name(1) == "r5");
    CHECK(s.name(2) == "e1_2");
    CHECK(s.name(s.edge(4, 5)) == "e4_5");
    CHECK(s.name(s.edge(2, 3)) == "e2_3");
    CHECK_THROWS(s.rep(3));
}

TEST_CASE("enumeration counts follow the Stirling recurrence")
{
    CHECK(enumerate_partitions(4, 2).size() == 7);
    CHECK(enumerate_partitions(5, 3).size() == 25);
    for (int n = 1; n <= 9; ++n) {
        CHECK(enumerate_partitions(n, n).size() == 1);
        for (int k = 1; k <= n; ++k) {
            const auto all = enumerate_partitions(n, k);
            CHECK(all.size() == oracle::stirling(n, k));
            CHECK(stirling2(n, k) == oracle::stirling(n, k));
            std::set<std::vector<VertexSet>> seen;
            for (const auto& p : all) {
                CHECK(p.k() == k);
                seen.insert(p.clusters());
            }
            CHECK(seen.size() == all.size());
        }
    }
    CHECK_THROWS_AS(PartitionEnumerator(14, 3), std::invalid_argument);
    CHECK_THROWS_AS(stirling2(60, 30), std::overflow_error);
}

TEST_CASE("enumeration order is restricted growth order")
{
    std::vector<std::vector<int>> got;
    for_each_partition(5, 3, [&](std::span<const int> l) { got.emplace_back(l.begin(), l.end()); });
    std::vector<std::vector<int>> want;
    oracle::each_partition(5, 3, [&](const std::vector<int>& l) { want.push_back(l); });
    CHECK(got == want);
}

TEST_CASE("implied representative count equals K")
{
    for (int n = 3; n <= 7; ++n)
        for (int k = 2; k <= n - 1; ++k) {
            const VarSpace s(n, k);
            for (const auto& p : enumerate_partitions(n, k)) {
                const auto cv = char_vector(p);
                const std::vector<double> x(cv.begin(), cv.end());
                double total = 0;
                for (int v = 1; v <= n; ++v) {
                    const double r = representative_value(s, x, v);
                    CHECK(r == doctest::Approx(p.is_representative(v) ? 1.0 : 0.0));
                    total += r;
                }
                CHECK(total == doctest::Approx(k));
                const auto back = decode_partition(s, x);
                REQUIRE(back.has_value());
                CHECK(*back == p);
            }
        }
}

TEST_CASE("characteristic vector matches the definitional oracle")
{
    for (int n = 4; n <= 7; ++n)
        for (int k = 2; k <= n - 1; ++k)
            oracle::each_partition(n, k, [&](const std::vector<int>& labels) {
                const auto cv = char_vector(KPartition::from_labels(labels));
                const auto ref = oracle::reduced_vector(n, labels);
                REQUIRE(cv.size() == ref.size());
                for (std::size_t i = 0; i < cv.size(); ++i) CHECK(cv[i] == ref[i]);
            });
}

TEST_CASE("decode rejects fractional and non transitive points")
{
    const VarSpace s(4, 2);
    std::vector<double> x(s.dim(), 0.0);
    x[s.edge(1, 2)] = 1;
    x[s.edge(2, 3)] = 1;
    CHECK_FALSE(decode_partition(s, x).has_value());
    x[s.edge(1, 3)] = 1;
    CHECK(decode_partition(s, x).has_value());
    x[s.edge(1, 3)] = 0.5;
    CHECK_FALSE(decode_partition(s, x).has_value());
    std::fill(x.begin(), x.end(), 0.0);
    CHECK_FALSE(decode_partition(s, x).has_value());
}

TEST_CASE("transform swaps R between clusters")
{
    auto [a, b] = transform({1, 2}, {3}, {2});
    CHECK(a == VertexSet{1});
    CHECK(b == VertexSet{2, 3});
    std::tie(a, b) = transform({1, 2}, {3, 4}, {});
    CHECK(a == VertexSet{1, 2});
    CHECK(b == VertexSet{3, 4});
    std::tie(a, b) = transform({1, 2}, {3, 4}, {1, 2, 3, 4});
    CHECK(a == VertexSet{3, 4});
    CHECK(b == VertexSet{1, 2});
    std::tie(a, b) = transform({1, 5, 7}, {2, 6}, {5, 6});
    CHECK(a == VertexSet{1, 6, 7});
    CHECK(b == VertexSet{2, 5});
    CHECK_THROWS_AS(transform({1, 2}, {2, 3}, {}), std::invalid_argument);
    CHECK_THROWS_AS(transform({1, 2}, {3}, {4}), std::invalid_argument);
}
