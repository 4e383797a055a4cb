#include <random>
#include <set>

#include "doctest.h"
#include "kpart/formulation.hpp"
#include "kpart/partition.hpp"
#include "oracles.hpp"

using namespace kpart;

namespace {

WeightedInstance zeros(int n, int k)
{
    return WeightedInstance("z", n, k, std::vector<Weight>(edge_count(n), 0));
}

} // namespace

TEST_CASE("P2 model sizes")
{
    const auto m = build_p2_model(zeros(5, 3));
    CHECK(m.num_vars() == 12);
    int triangles = 0;
    for (const auto& r : m.rows) triangles += r.family == Family::Triangle;
    CHECK(triangles == 30);
    for (int j = 0; j < m.num_vars(); ++j) CHECK(m.integral[j] == (j >= 2));
    CHECK(build_p1_model(zeros(5, 3)).num_vars() == 15);
    CHECK_THROWS_AS(build_p2_model(WeightedInstance("x", 5, 3, std::vector<Weight>(10, 0)).with_k(5)),
                    std::invalid_argument);
}

TEST_CASE("every partition vector satisfies every P2 and P1 row")
{
    for (int n = 3; n <= 7; ++n)
        for (int k = 2; k <= n - 1; ++k) {
            const auto p2 = build_p2_model(zeros(n, k));
            const auto p1 = build_p1_model(zeros(n, k));
            oracle::each_partition(n, k, [&](const std::vector<int>& labels) {
                const auto x = oracle::reduced_vector(n, labels);
                CHECK(p2.feasible(x));
                std::vector<double> full;
                for (int v = 1; v <= n; ++v) {
                    bool rep = true;
                    for (int i = 1; i < v; ++i) rep = rep && labels[i - 1] != labels[v - 1];
                    full.push_back(rep ? 1.0 : 0.0);
                }
                full.insert(full.end(), x.begin() + (n - 3), x.end());
                CHECK(p1.feasible(full));
                CHECK(full[0] == 1.0);
            });
        }
}

TEST_CASE("the only feasible 0/1 points of P2 are partition vectors")
{
    for (int n = 4; n <= 6; ++n)
        for (int k = 2; k <= n - 1; ++k) {
            const auto m = build_p2_model(zeros(n, k));
            const int dim = m.num_vars();
            std::set<std::vector<double>> expected;
            oracle::each_partition(n, k, [&](const std::vector<int>& l) { expected.insert(oracle::reduced_vector(n, l)); });
            std::size_t feasible = 0;
            std::vector<double> x(dim);
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << dim); ++mask) {
                for (int b = 0; b < dim; ++b) x[b] = (mask >> b) & 1;
                if (m.feasible(x)) {
                    ++feasible;
                    CHECK(expected.count(x) == 1);
                }
            }
            CHECK(feasible == expected.size());
        }
}

TEST_CASE("node-cluster model at integrality")
{
    const int n = 5, k = 3;
    const auto m = build_node_cluster_model(zeros(n, k));
    CHECK(m.num_vars() == edge_count(n) + n * k);
    oracle::each_partition(n, k, [&](const std::vector<int>& labels) {
        std::vector<double> x(m.num_vars(), 0.0);
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) x[edge_position(n, i, j)] = labels[i - 1] == labels[j - 1];
        for (int v = 1; v <= n; ++v) x[node_cluster_var(n, k, v, labels[v - 1] + 1)] = 1;
        CHECK(m.feasible(x));
        // flipping any edge away from the shared-cluster indicator breaks a link row
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if (labels[i - 1] == labels[j - 1]) {
                    auto bad = x;
                    bad[edge_position(n, i, j)] = 0;
                    CHECK_FALSE(m.feasible(bad));
                } else {
                    auto bad = x;
                    bad[edge_position(n, i, j)] = 1;
                    CHECK_FALSE(m.feasible(bad));
                }
    });
}

TEST_CASE("row builder substitutes vertices 1 to 3")
{
    const VarSpace s(6, 3);
    const auto row = RowBuilder(s).add_rep(3, 1).add_edge(1, 3, 1).build(Sense::LessEqual, 1, Family::UpperRep);
    // x_3 = K - 2 + x12 - x4 - x5 - x6
    CHECK(row.rhs == doctest::Approx(0.0));
    CHECK(row.terms.size() == 5);
    const auto r2 = RowBuilder(s).add_rep(2, 1).add_edge(1, 2, 1).build(Sense::LessEqual, 1, Family::UpperRep);
    CHECK(r2.terms.empty());
    CHECK(r2.rhs == doctest::Approx(0.0));
}

TEST_CASE("LP text dump")
{
    const auto text = to_lp_text(build_p2_model(WeightedInstance("t", 4, 2, {1, -2, 3, 0, 5, 6})));
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("obj: e1_2 - 2 e1_3 + 3 e1_4 + 5 e2_4 + 6 e3_4") != std::string::npos);
    CHECK(text.find("triangle_0: e1_2 + e1_3 - e2_3 <= 1") != std::string::npos);
    CHECK(text.find("Generals") != std::string::npos);
    CHECK(text.find("0 <= r4 <= 1") != std::string::npos);
}
