#include <functional>
#include <limits>
#include <random>

#include "doctest.h"
#include "kpart/formulation.hpp"
#include "kpart/lp.hpp"
#include "kpart/separation.hpp"
#include "oracles.hpp"

using namespace kpart;

namespace {

double coef_of(const LinearInequality& row, int var)
{
    for (const auto& t : row.terms)
        if (t.var == var) return t.coef;
    return 0.0;
}

bool valid_on_all_partitions(const VarSpace& s, const LinearInequality& row)
{
    bool ok = true;
    oracle::each_partition(s.n(), s.k(), [&](const std::vector<int>& l) {
        if (row.violation(oracle::reduced_vector(s.n(), l)) > 1e-9) ok = false;
    });
    return ok;
}

} // namespace

TEST_CASE("two-chorded cut on C5")
{
    const VarSpace s(5, 3);
    const auto row = make_two_chorded_cut(s, {1, 2, 3, 4, 5});
    CHECK(row.rhs == 2);
    CHECK(row.sense == Sense::LessEqual);
    for (auto [i, j] : std::vector<std::pair<int, int>>{{1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 5}})
        CHECK(coef_of(row, s.edge(i, j)) == 1);
    for (auto [i, j] : std::vector<std::pair<int, int>>{{1, 3}, {2, 4}, {3, 5}, {1, 4}, {2, 5}})
        CHECK(coef_of(row, s.edge(i, j)) == -1);
    std::vector<double> x(s.dim(), 0.0);
    for (auto [i, j] : std::vector<std::pair<int, int>>{{1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 5}}) x[s.edge(i, j)] = 0.6;
    CHECK(row.activity(x) == doctest::Approx(3.0));
    CHECK(row.violation(x) > 0);
    CHECK(valid_on_all_partitions(s, row));
    CHECK(enumerate_partitions(5, 3).size() == 25);
    CHECK_THROWS_AS(make_two_chorded_cut(s, {1, 2, 3, 4}), std::invalid_argument);
    CHECK_THROWS_AS(make_two_chorded_cut(s, {1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(make_two_chorded_cut(s, {1, 2, 3, 4, 1}), std::invalid_argument);
}

TEST_CASE("planted C5 is separated")
{
    const VarSpace s(8, 3);
    std::vector<double> x(s.dim(), 0.0);
    const std::vector<int> c{2, 5, 7, 3, 8};
    for (int i = 0; i < 5; ++i) x[s.edge(c[i], c[(i + 1) % 5])] = 0.6;
    const auto rep = separate_two_chorded(s, x);
    REQUIRE_FALSE(rep.cuts.empty());
    CHECK(rep.cuts.front().violation >= 1.0 - 1e-6);
    CHECK(rep.family == Family::TwoChorded);
}

TEST_CASE("two-chorded separation finds every violated simple odd cycle")
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int positive = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const VarSpace s(8, 3);
        std::vector<double> x(s.dim(), 0.0);
        const double density = 0.2 + 0.6 * u(rng);
        for (int p = s.rep_count(); p < s.dim(); ++p) x[p] = u(rng) < density ? u(rng) : 0.0;
        const double brute = oracle::best_simple_cycle_violation(s, x);
        const auto rep = separate_two_chorded(s, x);
        if (brute > 1e-6) {
            ++positive;
            REQUIRE_FALSE(rep.cuts.empty());
            CHECK(rep.cuts.front().violation >= brute - 1e-9);
        }
        for (const auto& c : rep.cuts) CHECK(c.violation == doctest::Approx(c.cut.violation(x)));
    }
    CHECK(positive > 20);
}

TEST_CASE("two-partition cut")
{
    const VarSpace s(6, 3);
    const auto tri = make_two_partition_cut(s, {1}, {2, 3});
    CHECK(tri.rhs == 1);
    CHECK(coef_of(tri, s.edge(1, 2)) == 1);
    CHECK(coef_of(tri, s.edge(1, 3)) == 1);
    CHECK(coef_of(tri, s.edge(2, 3)) == -1);
    CHECK(tri.terms.size() == 3);
    CHECK_THROWS_AS(make_two_partition_cut(s, {1, 2}, {2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(make_two_partition_cut(s, {}, {2, 3}), std::invalid_argument);

    // validity and the tight-point characterisation for |S| <= |T|
    const std::vector<std::pair<std::vector<int>, std::vector<int>>> cases{
        {{1}, {2, 3}}, {{4, 5}, {1, 2, 6}}, {{2}, {1, 3, 4, 5}}, {{3, 6}, {1, 4}}, {{1, 2}, {3, 4, 5, 6}}};
    for (const auto& [ss, tt] : cases) {
        const auto row = make_two_partition_cut(s, ss, tt);
        oracle::each_partition(6, 3, [&](const std::vector<int>& l) {
            const auto x = oracle::reduced_vector(6, l);
            CHECK(row.violation(x) <= 1e-9);
            bool tight_expected = true;
            for (int c = 0; c < 3; ++c) {
                int ns = 0, nt = 0;
                for (int v : ss) ns += l[v - 1] == c;
                for (int v : tt) nt += l[v - 1] == c;
                tight_expected = tight_expected && (nt - ns == 0 || nt - ns == 1);
            }
            CHECK((std::abs(row.violation(x)) < 1e-9) == tight_expected);
        });
    }
}

TEST_CASE("planted triangle is found by the 2-partition heuristic")
{
    const VarSpace s(7, 3);
    std::vector<double> x(s.dim(), 0.0);
    x[s.edge(3, 5)] = 0.9;
    x[s.edge(3, 6)] = 0.9;
    x[s.edge(5, 6)] = 0.1;
    const auto rep = separate_two_partition(s, x);
    REQUIRE_FALSE(rep.cuts.empty());
    CHECK(rep.cuts.front().violation >= 0.7 - 1e-6);
}

TEST_CASE("general clique right-hand sides")
{
    CHECK(general_clique_rhs(4, 3) == 1);
    CHECK(general_clique_rhs(7, 3) == 5);
    CHECK(general_clique_rhs(3, 2) == 1);
    CHECK(general_clique_rhs(3, 3) == 0);
    for (int n = 4; n <= 7; ++n)
        for (int k = 2; k <= n - 1; ++k) {
            const VarSpace s(n, k);
            for (int size = k + 1; size <= n; ++size) {
                std::vector<int> z;
                for (int v = n - size + 1; v <= n; ++v) z.push_back(v);
                const auto row = make_general_clique_cut(s, z);
                double least = std::numeric_limits<double>::infinity();
                oracle::each_partition(n, k, [&](const std::vector<int>& l) {
                    least = std::min(least, row.activity(oracle::reduced_vector(n, l)));
                });
                CHECK(least == doctest::Approx(row.rhs));
            }
        }
    CHECK_THROWS_AS(make_general_clique_cut(VarSpace(6, 3), {1, 2, 3}), std::invalid_argument);
    const VarSpace s(6, 3);
    const std::vector<double> zero(s.dim(), 0.0);
    const auto rep = separate_general_clique(s, zero);
    REQUIRE_FALSE(rep.cuts.empty());
    // sizes 4 and 5 at K = 3 have right-hand sides 1 and 2
    REQUIRE(rep.cuts.size() == 2);
    CHECK(rep.cuts[0].violation == doctest::Approx(2.0));
    CHECK(rep.cuts[1].violation == doctest::Approx(1.0));
}

TEST_CASE("strengthened triangle")
{
    const VarSpace s(6, 3);
    std::vector<double> x(s.dim(), 0.0);
    x[s.rep(5)] = 0.5;
    x[s.edge(5, 1)] = 0.5;
    x[s.edge(5, 2)] = 0.5;
    const auto row = make_strengthened_triangle_cut(s, 5, 1, 2);
    CHECK(row.activity(x) == doctest::Approx(1.5));
    const auto rep = separate_strengthened_triangle(s, x);
    REQUIRE_FALSE(rep.cuts.empty());
    CHECK(rep.cuts.front().cut == row);
    CHECK_THROWS_AS(make_strengthened_triangle_cut(s, 3, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(make_strengthened_triangle_cut(s, 5, 2, 1), std::invalid_argument);
    for (int n = 4; n <= 7; ++n)
        for (int k = 2; k <= n - 1; ++k) {
            const VarSpace sp(n, k);
            for (int sv = 4; sv <= n; ++sv)
                for (int t2 = 2; t2 < sv; ++t2)
                    for (int t1 = 1; t1 < t2; ++t1)
                        CHECK(valid_on_all_partitions(sp, make_strengthened_triangle_cut(sp, sv, t1, t2)));
        }
}

TEST_CASE("paw validity conditions are exact")
{
    for (int n = 4; n <= 7; ++n)
        for (int k = 2; k <= n - 1; ++k) {
            const VarSpace s(n, k);
            std::vector<std::vector<double>> points;
            oracle::each_partition(n, k, [&](const std::vector<int>& l) { points.push_back(oracle::reduced_vector(n, l)); });
            for (int a = 1; a <= n; ++a)
                for (int b = 1; b <= n; ++b)
                    for (int c = 1; c <= n; ++c)
                        for (int d = 1; d <= n; ++d) {
                            if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
                            const auto row = make_paw_cut(s, a, b, c, d);
                            bool valid = true;
                            for (const auto& p : points) valid = valid && row.violation(p) <= 1e-9;
                            if (paw_is_valid(a, b, c, d)) {
                                CHECK(valid);
                            } else if (k <= n - 2) {
                                // the violating partition puts b, c, d together with d not the minimum
                                // (or a and b together with a above b); it needs K <= n - 2 clusters
                                CHECK_FALSE(valid);
                            }
                        }
        }
}

TEST_CASE("integral points yield no cuts")
{
    for (int n = 5; n <= 7; ++n)
        for (int k = 2; k <= n - 1; ++k) {
            const VarSpace s(n, k);
            oracle::each_partition(n, k, [&](const std::vector<int>& l) {
                const auto x = oracle::reduced_vector(n, l);
                for (auto f : {Family::TwoPartition, Family::GeneralClique, Family::StrengthenedTriangle, Family::Paw})
                    CHECK(separate(f, s, x).cuts.empty());
            });
            int count = 0;
            oracle::each_partition(n, k, [&](const std::vector<int>& l) {
                if (count++ % 7 == 0) CHECK(separate_two_chorded(s, oracle::reduced_vector(n, l)).cuts.empty());
            });
        }
}

TEST_CASE("separated cuts on LP points are valid for every partition")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 5 + trial % 3;
        const int k = 2 + trial % (n - 2);
        const int regime = trial % 3;
        const auto inst = oracle::random_instance(rng, n, k, regime == 0 ? 0 : regime == 1 ? -250 : -500,
                                                  regime == 0 ? 500 : regime == 1 ? 250 : 0);
        const VarSpace s(inst);
        const auto sol = solve_lp(LpProblem::from_model(build_p2_model(inst)));
        REQUIRE(sol.status == LpStatus::Optimal);
        for (auto f : cut_families()) {
            const auto rep = separate(f, s, sol.x);
            for (const auto& c : rep.cuts) {
                CHECK(c.violation > 1e-6);
                CHECK(valid_on_all_partitions(s, c.cut));
                CHECK(c.cut.family == f);
            }
        }
    }
}

TEST_CASE("cut cap and text dump")
{
    const VarSpace s(7, 3);
    const std::vector<double> zero(s.dim(), 0.0);
    SeparationOptions opt;
    opt.max_cuts = 1;
    opt.clique_seeds = 10;
    CHECK(separate_general_clique(s, zero, opt).cuts.size() == 1);
    const auto text = cut_to_text(s, make_paw_cut(s, 1, 5, 6, 4));
    CHECK(text == "paw r5:1 r6:1 e1_5:1 e1_6:-1 e4_6:1 e5_6:1 <= 2");
}
