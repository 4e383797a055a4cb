#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "kpart/formulation.hpp"
#include "kpart/partition.hpp"

namespace kpart {

struct ViolatedCut {
    LinearInequality cut;
    double violation = 0.0;
};

struct SeparationReport {
    Family family = Family::Bound;
    /// Sorted by decreasing violation; every entry exceeds the tolerance.
    std::vector<ViolatedCut> cuts;
    std::int64_t candidates = 0;
    double seconds = 0.0;
};

struct SeparationOptions {
    double viol_tol = 1e-6;
    int max_cuts = 200;
    /// Random partitions used to spot-check cuts derived from closed walks with repeated vertices.
    int walk_check_samples = 1000;
    std::uint64_t walk_check_seed = 0x5eed;
    /// Seed pairs tried per target size by the clique heuristic.
    int clique_seeds = 1;
};

/// x(E(C)) - x(E(C-bar)) <= floor(|C|/2) for a simple cycle, E(C-bar) its 2-chords. |C| odd, >= 5.
LinearInequality make_two_chorded_cut(const VarSpace& space, const std::vector<int>& cycle);
/// Same construction over a closed walk (vertices may repeat, consecutive entries and
/// entries two apart must differ). Coefficients add up with multiplicity. Odd length >= 3.
LinearInequality make_closed_walk_cut(const VarSpace& space, const std::vector<int>& walk);
/// Exact search over closed odd walks of at most 2n - 1 edges through a longest-path
/// recursion on oriented edges; covers every simple odd cycle.
SeparationReport separate_two_chorded(const VarSpace& space, std::span<const double> x,
                                      const SeparationOptions& opt = {});

/// x(S:T) - x(E(S)) - x(E(T)) <= min(|S|, |T|).
LinearInequality make_two_partition_cut(const VarSpace& space, const std::vector<int>& s, const std::vector<int>& t);
SeparationReport separate_two_partition(const VarSpace& space, std::span<const double> x,
                                        const SeparationOptions& opt = {});

/// Minimum number of edges inside a set of `size` vertices split into at most k clusters.
std::int64_t general_clique_rhs(int size, int k);
/// x(E(Z)) >= general_clique_rhs(|Z|, K); needs |Z| >= K + 1.
LinearInequality make_general_clique_cut(const VarSpace& space, const std::vector<int>& z);
SeparationReport separate_general_clique(const VarSpace& space, std::span<const double> x,
                                         const SeparationOptions& opt = {});

/// x_{s,t1} + x_{s,t2} - x_{t1,t2} + x_s <= 1 for s > t2 > t1 and s > 3.
LinearInequality make_strengthened_triangle_cut(const VarSpace& space, int s, int t1, int t2);
SeparationReport separate_strengthened_triangle(const VarSpace& space, std::span<const double> x,
                                                const SeparationOptions& opt = {});

/// The paw row is valid exactly when a < b and d = min(b, c, d) for distinct a, b, c, d.
bool paw_is_valid(int a, int b, int c, int d);
/// x_{a,b} + x_{b,c} - x_{a,c} + x_{c,d} + x_b + x_c <= 2, with x_b, x_c substituted when <= 3.
/// Builds the row for any distinct tuple; callers decide validity.
LinearInequality make_paw_cut(const VarSpace& space, int a, int b, int c, int d);
SeparationReport separate_paw(const VarSpace& space, std::span<const double> x, const SeparationOptions& opt = {});

/// Families with a separator.
const std::vector<Family>& cut_families();
SeparationReport separate(Family family, const VarSpace& space, std::span<const double> x,
                          const SeparationOptions& opt = {});

/// Labels of a random K-partition (every cluster seeded with one distinct vertex).
std::vector<int> random_partition_labels(int n, int k, std::mt19937_64& rng);
/// True when `samples` random partitions all satisfy the row.
bool holds_on_samples(const VarSpace& space, const LinearInequality& row, int samples, std::mt19937_64& rng);

/// One line: family tag, name:coef pairs, sense, rhs.
std::string cut_to_text(const VarSpace& space, const LinearInequality& row);

} // namespace kpart
