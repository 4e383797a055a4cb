#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "kpart/formulation.hpp"
#include "kpart/lp.hpp"
#include "oracles.hpp"

using namespace kpart;

namespace {

LinearInequality row(std::vector<Term> t, Sense s, double rhs)
{
    return LinearInequality{std::move(t), s, rhs, Family::Bound};
}

// Minimum over all vertices of a 3-variable box LP, by solving every 3x3 system
// of active constraints (Cramer's rule).
double vertex_oracle(const LpProblem& p)
{
    std::vector<std::array<double, 4>> planes;
    for (const auto& r : p.rows) {
        std::array<double, 4> a{0, 0, 0, r.rhs};
        for (const auto& t : r.terms) a[t.var] += t.coef;
        planes.push_back(a);
    }
    for (int j = 0; j < 3; ++j) {
        std::array<double, 4> lo{0, 0, 0, p.lower[j]}, hi{0, 0, 0, p.upper[j]};
        lo[j] = hi[j] = 1;
        planes.push_back(lo);
        planes.push_back(hi);
    }
    auto det = [](double a, double b, double c, double d, double e, double f, double g, double h, double i) {
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    };
    double best = std::numeric_limits<double>::infinity();
    const int m = static_cast<int>(planes.size());
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            for (int c = b + 1; c < m; ++c) {
                const auto &P = planes[a], &Q = planes[b], &R = planes[c];
                const double D = det(P[0], P[1], P[2], Q[0], Q[1], Q[2], R[0], R[1], R[2]);
                if (std::abs(D) < 1e-9) continue;
                std::vector<double> x{det(P[3], P[1], P[2], Q[3], Q[1], Q[2], R[3], R[1], R[2]) / D,
                                      det(P[0], P[3], P[2], Q[0], Q[3], Q[2], R[0], R[3], R[2]) / D,
                                      det(P[0], P[1], P[3], Q[0], Q[1], Q[3], R[0], R[1], R[3]) / D};
                bool ok = true;
                for (int j = 0; j < 3; ++j) ok = ok && x[j] >= p.lower[j] - 1e-7 && x[j] <= p.upper[j] + 1e-7;
                for (const auto& r : p.rows) ok = ok && r.violation(x) <= 1e-7;
                if (!ok) continue;
                double z = 0;
                for (int j = 0; j < 3; ++j) z += p.objective[j] * x[j];
                best = std::min(best, z);
            }
    return best;
}

WeightedInstance instance_with(int n, int k, std::mt19937_64& rng, int lo, int hi)
{
    return oracle::random_instance(rng, n, k, lo, hi);
}

} // namespace

TEST_CASE("one variable LP")
{
    LpProblem p{{1.0}, {row({{0, 1.0}}, Sense::GreaterEqual, 1.0)}, {0.0}, {10.0}};
    const auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.x[0] == doctest::Approx(1.0));
    CHECK(s.objective == doctest::Approx(1.0));
    CHECK(s.activity.size() == 1);
}

TEST_CASE("infeasible and unbounded LPs are reported")
{
    LpProblem inf{{1.0, 1.0},
                  {row({{0, 1.0}, {1, 1.0}}, Sense::GreaterEqual, 3.0)},
                  {0.0, 0.0},
                  {1.0, 1.0}};
    CHECK(solve_lp(inf).status == LpStatus::Infeasible);
    const double big = std::numeric_limits<double>::infinity();
    LpProblem unb{{-1.0, 0.0}, {row({{0, 1.0}, {1, -1.0}}, Sense::LessEqual, 1.0)}, {0.0, 0.0}, {big, big}};
    CHECK(solve_lp(unb).status == LpStatus::Unbounded);
    LpProblem bad{{1.0}, {}, {2.0}, {1.0}};
    CHECK_THROWS_AS(solve_lp(bad), std::invalid_argument);
}

TEST_CASE("equality rows and free variables")
{
    const double big = std::numeric_limits<double>::infinity();
    LpProblem p{{1.0, 2.0},
                {row({{0, 1.0}, {1, 1.0}}, Sense::Equal, 4.0), row({{0, 1.0}, {1, -1.0}}, Sense::LessEqual, 1.0)},
                {-big, -big},
                {big, big}};
    const auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.x[0] == doctest::Approx(2.5));
    CHECK(s.x[1] == doctest::Approx(1.5));
    CHECK(s.objective == doctest::Approx(5.5));
}

TEST_CASE("random 3-variable LPs match vertex enumeration")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> coef(-5, 5);
    std::uniform_int_distribution<int> rows(1, 6);
    int solved = 0;
    for (int trial = 0; trial < 400; ++trial) {
        LpProblem p;
        for (int j = 0; j < 3; ++j) {
            p.objective.push_back(coef(rng));
            const int lo = coef(rng);
            p.lower.push_back(lo);
            p.upper.push_back(lo + std::abs(coef(rng)) + 1);
        }
        const int m = rows(rng);
        for (int i = 0; i < m; ++i) {
            std::vector<Term> t;
            for (int j = 0; j < 3; ++j)
                if (int c = coef(rng); c != 0) t.push_back({j, static_cast<double>(c)});
            if (t.empty()) continue;
            const int s = trial % 3 == 0 ? i % 3 : i % 2;
            p.rows.push_back(row(t, s == 0 ? Sense::LessEqual : s == 1 ? Sense::GreaterEqual : Sense::Equal, coef(rng)));
        }
        const double want = vertex_oracle(p);
        for (bool lazy : {true, false}) {
            LpOptions opt;
            opt.lazy_rows = lazy;
            const auto s = solve_lp(p, opt);
            if (std::isinf(want)) {
                CHECK(s.status == LpStatus::Infeasible);
            } else {
                REQUIRE(s.status == LpStatus::Optimal);
                CHECK(s.objective == doctest::Approx(want).epsilon(1e-7));
                for (const auto& r : p.rows) CHECK(r.violation(s.x) <= 1e-6);
                ++solved;
            }
        }
    }
    CHECK(solved > 200);
}

TEST_CASE("P2 relaxation bounds the enumeration optimum")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 4 + trial % 4;
        const int k = 2 + trial % (n - 2);
        const auto inst = instance_with(n, k, rng, trial % 3 == 0 ? 0 : -250, trial % 3 == 2 ? 0 : 250);
        const auto model = build_p2_model(inst);
        const auto lp = LpProblem::from_model(model);
        const auto a = solve_lp(lp);
        REQUIRE(a.status == LpStatus::Optimal);
        CHECK(a.objective <= oracle::optimum(inst) + 1e-6);
        CHECK(model.feasible(a.x, 1e-6));
        double c = 0;
        for (int j = 0; j < model.num_vars(); ++j) c += model.objective[j] * a.x[j];
        CHECK(c == doctest::Approx(a.objective));
        LpOptions eager;
        eager.lazy_rows = false;
        const auto b = solve_lp(lp, eager);
        REQUIRE(b.status == LpStatus::Optimal);
        CHECK(b.objective == doctest::Approx(a.objective).epsilon(1e-9));
    }
}

TEST_CASE("zero weights give a zero relaxation")
{
    const WeightedInstance inst("z", 8, 3, std::vector<Weight>(edge_count(8), 0));
    const auto s = solve_lp(LpProblem::from_model(build_p2_model(inst)));
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(0.0));
}

TEST_CASE("solves are deterministic")
{
    std::mt19937_64 rng(3);
    const auto inst = instance_with(9, 4, rng, -250, 250);
    const auto lp = LpProblem::from_model(build_p2_model(inst));
    const auto a = solve_lp(lp);
    const auto b = solve_lp(lp);
    CHECK(a.iterations == b.iterations);
    CHECK(a.x == b.x);
    CHECK(a.objective == b.objective);
}

TEST_CASE("MIP optimum equals enumeration optimum")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 4 + trial % 4;
        const int k = 2 + (trial / 4) % (n - 2);
        const int regime = trial % 3;
        const auto inst = instance_with(n, k, rng, regime == 0 ? 0 : regime == 1 ? -250 : -500,
                                        regime == 0 ? 500 : regime == 1 ? 250 : 0);
        const double want = oracle::optimum(inst);
        const auto p2 = build_p2_model(inst);
        const auto r = solve_mip(LpProblem::from_model(p2), p2.integral);
        REQUIRE(r.status == MipStatus::Optimal);
        CHECK(r.objective == doctest::Approx(want));
        CHECK(r.bound == doctest::Approx(want));
        const auto p1 = build_p1_model(inst);
        const auto r1 = solve_mip(LpProblem::from_model(p1), p1.integral);
        REQUIRE(r1.status == MipStatus::Optimal);
        CHECK(r1.objective == doctest::Approx(want));
        CHECK(r1.x[0] == doctest::Approx(1.0));
        if (n <= 6) {
            const auto nc = build_node_cluster_model(inst);
            const auto r2 = solve_mip(LpProblem::from_model(nc), nc.integral);
            REQUIRE(r2.status == MipStatus::Optimal);
            CHECK(r2.objective == doctest::Approx(want));
        }
    }
}

TEST_CASE("integral root needs a single node")
{
    // all-positive weights at K = n-1: the relaxation is integral
    const WeightedInstance inst("pos", 5, 4, {5, 4, 3, 6, 7, 8, 2, 9, 10, 11});
    const auto p2 = build_p2_model(inst);
    const auto r = solve_mip(LpProblem::from_model(p2), p2.integral);
    REQUIRE(r.status == MipStatus::Optimal);
    CHECK(r.nodes == 1);
    CHECK(r.objective == doctest::Approx(oracle::optimum(inst)));
}

TEST_CASE("node limit is reported")
{
    std::mt19937_64 rng(23);
    const auto inst = instance_with(8, 3, rng, -250, 250);
    const auto p2 = build_p2_model(inst);
    MipLimits lim;
    lim.node_limit = 1;
    const auto r = solve_mip(LpProblem::from_model(p2), p2.integral, lim);
    if (r.status == MipStatus::NodeLimit) CHECK(r.bound <= oracle::optimum(inst) + 1e-6);
    else CHECK(r.status == MipStatus::Optimal);
}
