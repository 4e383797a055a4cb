#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kpart/formulation.hpp"

namespace kpart {

/// Minimize objective . x subject to rows and lower <= x <= upper.
/// Infinite bounds are allowed; they are boxed internally at +/-kLpBigBound and a
/// solution resting on such a box is reported as unbounded.
struct LpProblem {
    std::vector<double> objective;
    std::vector<LinearInequality> rows;
    std::vector<double> lower;
    std::vector<double> upper;

    static LpProblem from_model(const Model& model);
    int num_vars() const { return static_cast<int>(objective.size()); }
    void validate() const;
};

inline constexpr double kLpBigBound = 1e9;

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };
std::string status_name(LpStatus s);

struct LpOptions {
    double feas_tol = 1e-7;
    double opt_tol = 1e-8;
    double pivot_tol = 1e-9;
    std::int64_t max_iterations = 2'000'000;
    int refactor_interval = 100;
    /// Consecutive degenerate pivots before switching to Bland's rule.
    int degenerate_limit = 50;
    /// Activate rows only when violated (row generation); the result is the optimum of the full problem.
    bool lazy_rows = true;
    int lazy_batch = 300;
};

struct LpSolution {
    LpStatus status = LpStatus::IterationLimit;
    std::vector<double> x;
    double objective = 0.0;
    /// Activity of every row of the problem, in problem order.
    std::vector<double> activity;
    std::int64_t iterations = 0;
};

/// Dual simplex over a growing row set with an explicit dense basis inverse.
///
/// Every structural variable is boxed, so any basis is made dual feasible by placing
/// nonbasic variables at the bound matching the sign of their reduced cost. That makes
/// warm restarts after adding rows or changing bounds a plain continuation.
/// One solve at a time per engine.
class DualSimplex {
public:
    DualSimplex(std::vector<double> objective, std::vector<double> lower, std::vector<double> upper,
                LpOptions options = {});

    int num_vars() const { return n_; }
    int num_rows() const { return static_cast<int>(rows_.size()); }

    void add_row(const LinearInequality& row);
    void set_bounds(int var, double lo, double hi);
    double lower(int var) const { return lo_[var]; }
    double upper(int var) const { return hi_[var]; }

    LpStatus solve();

    std::vector<double> primal() const;
    double objective() const;
    std::int64_t iterations() const { return iterations_; }
    const std::vector<LinearInequality>& rows() const { return rows_; }

private:
    enum class VarState : std::uint8_t { Basic, AtLower, AtUpper };

    void refactor();
    void recompute_primal();
    void recompute_duals();
    void place_nonbasic(int j);
    double column_dot(int j, std::span<const double> rowvec) const;
    void column_ftran(int j, std::vector<double>& w) const;

    int n_;
    LpOptions opt_;
    std::vector<LinearInequality> rows_;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> cost_;
    std::vector<double> lo_;
    std::vector<double> hi_;
    std::vector<double> x_;
    std::vector<double> d_;
    std::vector<VarState> state_;
    std::vector<int> head_;
    std::vector<std::vector<double>> binv_;
    std::int64_t iterations_ = 0;
    int since_refactor_ = 0;
};

/// Fixed row pool solved by row generation on top of a DualSimplex. Rows added with
/// add_cut() are always active; pool rows become active once violated.
class LpSession {
public:
    LpSession(const LpProblem& problem, LpOptions options = {});

    void add_cut(const LinearInequality& row);
    void set_bounds(int var, double lo, double hi) { engine_.set_bounds(var, lo, hi); }
    double lower(int var) const { return engine_.lower(var); }
    double upper(int var) const { return engine_.upper(var); }

    LpSolution solve();
    int active_rows() const { return engine_.num_rows(); }
    int num_vars() const { return engine_.num_vars(); }

private:
    LpOptions opt_;
    std::vector<LinearInequality> pool_;
    std::vector<bool> active_;
    std::vector<LinearInequality> cuts_;
    std::vector<bool> big_lower_;
    std::vector<bool> big_upper_;
    DualSimplex engine_;
};

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});

enum class MipStatus { Optimal, Infeasible, NodeLimit, Failed };
std::string status_name(MipStatus s);

struct MipLimits {
    std::int64_t node_limit = 1'000'000;
    double integrality_tol = 1e-6;
};

struct MipResult {
    MipStatus status = MipStatus::Failed;
    std::vector<double> x;
    double objective = 0.0;
    /// Global lower bound (minimization); equals objective when proven optimal.
    double bound = 0.0;
    std::int64_t nodes = 0;
    bool has_incumbent = false;
};

/// Best-bound branch and bound, branching on the most fractional integral variable.
MipResult solve_mip(const LpProblem& problem, const std::vector<bool>& integral, const MipLimits& limits = {},
                    const LpOptions& options = {});

} // namespace kpart
