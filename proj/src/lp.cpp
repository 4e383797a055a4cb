#include "kpart/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace kpart {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

LpProblem LpProblem::from_model(const Model& model)
{
    return LpProblem{model.objective, model.rows, model.lower, model.upper};
}

void LpProblem::validate() const
{
    const auto n = objective.size();
    if (lower.size() != n || upper.size() != n) throw std::invalid_argument("LP bounds do not match variable count");
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(objective[j])) throw std::invalid_argument("LP objective must be finite");
        if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
            throw std::invalid_argument("LP bounds must satisfy lower <= upper");
    }
    for (const auto& row : rows) {
        if (!std::isfinite(row.rhs)) throw std::invalid_argument("LP row rhs must be finite");
        for (const auto& t : row.terms)
            if (t.var < 0 || static_cast<std::size_t>(t.var) >= n || !std::isfinite(t.coef))
                throw std::invalid_argument("LP row references an invalid variable");
    }
}

std::string status_name(LpStatus s)
{
    switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
    }
    return "unknown";
}

std::string status_name(MipStatus s)
{
    switch (s) {
    case MipStatus::Optimal: return "optimal";
    case MipStatus::Infeasible: return "infeasible";
    case MipStatus::NodeLimit: return "node-limit";
    case MipStatus::Failed: return "failed";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// DualSimplex

DualSimplex::DualSimplex(std::vector<double> objective, std::vector<double> lower, std::vector<double> upper,
                         LpOptions options)
    : n_(static_cast<int>(objective.size())), opt_(options), cost_(std::move(objective)), lo_(std::move(lower)),
      hi_(std::move(upper))
{
    if (static_cast<int>(lo_.size()) != n_ || static_cast<int>(hi_.size()) != n_)
        throw std::invalid_argument("bound vectors do not match objective size");
    for (int j = 0; j < n_; ++j)
        if (!std::isfinite(lo_[j]) || !std::isfinite(hi_[j]) || lo_[j] > hi_[j])
            throw std::invalid_argument("dual simplex needs finite bounds lower <= upper");
    cols_.resize(n_);
    x_.assign(n_, 0.0);
    d_ = cost_;
    state_.assign(n_, VarState::AtLower);
    for (int j = 0; j < n_; ++j) place_nonbasic(j);
}

void DualSimplex::place_nonbasic(int j)
{
    const bool lo_ok = std::isfinite(lo_[j]);
    const bool hi_ok = std::isfinite(hi_[j]);
    VarState want = state_[j];
    if (lo_[j] == hi_[j])
        want = VarState::AtLower;
    else if (d_[j] > opt_.opt_tol)
        want = VarState::AtLower;
    else if (d_[j] < -opt_.opt_tol)
        want = VarState::AtUpper;
    if (want == VarState::AtLower && !lo_ok) want = VarState::AtUpper;
    if (want == VarState::AtUpper && !hi_ok) want = VarState::AtLower;
    state_[j] = want;
    x_[j] = want == VarState::AtLower ? lo_[j] : hi_[j];
}

void DualSimplex::add_row(const LinearInequality& row)
{
    const int m = num_rows();
    const int slack = n_ + m;
    double lo = -kInf, hi = kInf;
    switch (row.sense) {
    case Sense::LessEqual: hi = row.rhs; break;
    case Sense::GreaterEqual: lo = row.rhs; break;
    case Sense::Equal: lo = hi = row.rhs; break;
    }
    rows_.push_back(row);
    for (const auto& t : row.terms) {
        if (t.var < 0 || t.var >= n_) throw std::invalid_argument("row references an invalid variable");
        cols_[t.var].emplace_back(m, t.coef);
    }
    cost_.push_back(0.0);
    lo_.push_back(lo);
    hi_.push_back(hi);
    d_.push_back(0.0);
    state_.push_back(VarState::Basic);
    x_.push_back(row.activity(std::span<const double>(x_.data(), n_)));
    // new basis row of B^-1: [u^T B^-1, -1], u = row coefficients on the basic columns
    std::vector<double> fresh(m + 1, 0.0);
    std::vector<double> coef_of(n_, 0.0);
    for (const auto& t : row.terms) coef_of[t.var] += t.coef;
    for (int p = 0; p < m; ++p) {
        const int var = head_[p];
        if (var >= n_ || coef_of[var] == 0.0) continue;
        const double u = coef_of[var];
        const auto& src = binv_[p];
        for (int c = 0; c < m; ++c) fresh[c] += u * src[c];
    }
    fresh[m] = -1.0;
    for (auto& r : binv_) r.push_back(0.0);
    binv_.push_back(std::move(fresh));
    head_.push_back(slack);
}

void DualSimplex::set_bounds(int var, double lo, double hi)
{
    if (var < 0 || var >= n_) throw std::out_of_range("set_bounds: invalid variable");
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) throw std::invalid_argument("set_bounds: invalid bounds");
    lo_[var] = lo;
    hi_[var] = hi;
    if (state_[var] != VarState::Basic) place_nonbasic(var);
    recompute_primal();
}

double DualSimplex::column_dot(int j, std::span<const double> rowvec) const
{
    if (j >= n_) return -rowvec[j - n_];
    double s = 0.0;
    for (const auto& [r, a] : cols_[j]) s += rowvec[r] * a;
    return s;
}

void DualSimplex::column_ftran(int j, std::vector<double>& w) const
{
    const int m = num_rows();
    w.assign(m, 0.0);
    if (j >= n_) {
        const int r = j - n_;
        for (int p = 0; p < m; ++p) w[p] = -binv_[p][r];
        return;
    }
    for (int p = 0; p < m; ++p) {
        const auto& row = binv_[p];
        double s = 0.0;
        for (const auto& [r, a] : cols_[j]) s += row[r] * a;
        w[p] = s;
    }
}

void DualSimplex::recompute_primal()
{
    const int m = num_rows();
    std::vector<double> rhs(m, 0.0);
    for (int j = 0; j < n_ + m; ++j) {
        if (state_[j] == VarState::Basic) continue;
        if (j < n_) {
            for (const auto& [r, a] : cols_[j]) rhs[r] -= a * x_[j];
        } else {
            rhs[j - n_] += x_[j];
        }
    }
    for (int p = 0; p < m; ++p) {
        const auto& row = binv_[p];
        double s = 0.0;
        for (int c = 0; c < m; ++c) s += row[c] * rhs[c];
        x_[head_[p]] = s;
    }
}

void DualSimplex::recompute_duals()
{
    const int m = num_rows();
    std::vector<double> y(m, 0.0);
    for (int p = 0; p < m; ++p) {
        const double cb = cost_[head_[p]];
        if (cb == 0.0) continue;
        const auto& row = binv_[p];
        for (int c = 0; c < m; ++c) y[c] += cb * row[c];
    }
    for (int j = 0; j < n_ + m; ++j) {
        if (state_[j] == VarState::Basic) {
            d_[j] = 0.0;
            continue;
        }
        d_[j] = cost_[j] - column_dot(j, y);
    }
}

void DualSimplex::refactor()
{
    // Basis columns are structural columns (set S) or negated unit columns of rows whose
    // slack is basic (set T). With R the rows whose slack is nonbasic, only the square
    // block M = A[R, S] needs a dense inverse.
    const int m = num_rows();
    std::vector<int> s_pos, t_pos;
    std::vector<bool> slack_basic(m, false);
    for (int p = 0; p < m; ++p) {
        if (head_[p] < n_)
            s_pos.push_back(p);
        else {
            t_pos.push_back(p);
            slack_basic[head_[p] - n_] = true;
        }
    }
    std::vector<int> r_rows;
    for (int r = 0; r < m; ++r)
        if (!slack_basic[r]) r_rows.push_back(r);
    const int k = static_cast<int>(s_pos.size());
    if (static_cast<int>(r_rows.size()) != k) throw std::logic_error("basis shape mismatch");

    std::vector<int> s_index(n_, -1);
    for (int a = 0; a < k; ++a) s_index[head_[s_pos[a]]] = a;
    std::vector<int> r_index(m, -1);
    for (int a = 0; a < k; ++a) r_index[r_rows[a]] = a;

    // Gauss-Jordan on [M | I] with partial pivoting
    std::vector<std::vector<double>> mat(k, std::vector<double>(2 * k, 0.0));
    for (int a = 0; a < k; ++a) {
        for (const auto& t : rows_[r_rows[a]].terms) {
            const int si = s_index[t.var];
            if (si >= 0) mat[a][si] += t.coef;
        }
        mat[a][k + a] = 1.0;
    }
    for (int c = 0; c < k; ++c) {
        int piv = c;
        for (int a = c + 1; a < k; ++a)
            if (std::abs(mat[a][c]) > std::abs(mat[piv][c])) piv = a;
        if (std::abs(mat[piv][c]) < 1e-12) throw std::runtime_error("singular basis during refactorization");
        std::swap(mat[piv], mat[c]);
        const double inv = 1.0 / mat[c][c];
        for (auto& v : mat[c]) v *= inv;
        for (int a = 0; a < k; ++a) {
            if (a == c) continue;
            const double f = mat[a][c];
            if (f == 0.0) continue;
            for (int b = 0; b < 2 * k; ++b) mat[a][b] -= f * mat[c][b];
        }
    }
    // After elimination, row c of the right half is row c of M^-1 where M's column c
    // corresponds to basic structural s_pos[c] and M's row a to r_rows[a].
    for (auto& row : binv_) std::fill(row.begin(), row.end(), 0.0);
    for (int c = 0; c < k; ++c) {
        auto& dst = binv_[s_pos[c]];
        for (int a = 0; a < k; ++a) dst[r_rows[a]] = mat[c][k + a];
    }
    for (int p : t_pos) {
        const int t = head_[p] - n_;
        auto& dst = binv_[p];
        for (const auto& term : rows_[t].terms) {
            const int si = s_index[term.var];
            if (si < 0) continue;
            const auto& minv = binv_[s_pos[si]];
            for (int r : r_rows) dst[r] += term.coef * minv[r];
        }
        dst[t] = -1.0;
    }
    since_refactor_ = 0;
}

LpStatus DualSimplex::solve()
{
    const int m = num_rows();
    if (m == 0) {
        for (int j = 0; j < n_; ++j) place_nonbasic(j);
        return LpStatus::Optimal;
    }
    bool bland = false;
    int degenerate = 0;
    bool fresh = false;
    std::vector<double> alpha(n_ + m, 0.0);
    std::vector<double> w;

    auto refresh = [&] {
        refactor();
        recompute_duals();
        for (int j = 0; j < n_ + m; ++j)
            if (state_[j] != VarState::Basic) place_nonbasic(j);
        recompute_primal();
        fresh = true;
    };
    refresh();

    while (true) {
        if (iterations_ >= opt_.max_iterations) return LpStatus::IterationLimit;
        if (since_refactor_ >= opt_.refactor_interval) refresh();

        // leaving variable
        int r = -1;
        double best = 0.0;
        for (int p = 0; p < m; ++p) {
            const int b = head_[p];
            double infeas = 0.0;
            if (x_[b] < lo_[b] - opt_.feas_tol)
                infeas = lo_[b] - x_[b];
            else if (x_[b] > hi_[b] + opt_.feas_tol)
                infeas = x_[b] - hi_[b];
            if (infeas <= 0.0) continue;
            if (bland) {
                if (r < 0 || b < head_[r]) r = p;
            } else if (infeas > best || (infeas == best && b < head_[r])) {
                best = infeas;
                r = p;
            }
        }
        if (r < 0) {
            if (!fresh) {
                refresh();
                continue;
            }
            return LpStatus::Optimal;
        }
        const int leaving = head_[r];
        const double delta = x_[leaving] < lo_[leaving] ? 1.0 : -1.0;

        // pivot row
        const auto& rho = binv_[r];
        std::fill(alpha.begin(), alpha.begin() + n_, 0.0);
        for (int i = 0; i < m; ++i) {
            const double ri = rho[i];
            if (ri == 0.0) continue;
            for (const auto& t : rows_[i].terms) alpha[t.var] += ri * t.coef;
            alpha[n_ + i] = -ri;
        }
        for (int i = 0; i < m; ++i)
            if (rho[i] == 0.0) alpha[n_ + i] = 0.0;

        // ratio test
        int q = -1;
        double step = 0.0;
        auto eligible = [&](int j, double& ratio, double& relaxed) {
            if (state_[j] == VarState::Basic || lo_[j] == hi_[j]) return false;
            const double a = delta * alpha[j];
            if (state_[j] == VarState::AtLower && a < -opt_.pivot_tol) {
                ratio = std::max(d_[j], 0.0) / -a;
                relaxed = (std::max(d_[j], 0.0) + opt_.opt_tol) / -a;
                return true;
            }
            if (state_[j] == VarState::AtUpper && a > opt_.pivot_tol) {
                ratio = std::max(-d_[j], 0.0) / a;
                relaxed = (std::max(-d_[j], 0.0) + opt_.opt_tol) / a;
                return true;
            }
            return false;
        };
        if (bland) {
            double best_ratio = kInf;
            for (int j = 0; j < n_ + m; ++j) {
                double ratio, relaxed;
                if (!eligible(j, ratio, relaxed)) continue;
                if (ratio < best_ratio - 1e-12) {
                    best_ratio = ratio;
                    q = j;
                }
            }
            step = best_ratio;
        } else {
            // Harris two-pass: bound the step with relaxed ratios, then take the largest pivot
            double bound = kInf;
            for (int j = 0; j < n_ + m; ++j) {
                double ratio, relaxed;
                if (eligible(j, ratio, relaxed)) bound = std::min(bound, relaxed);
            }
            double best_pivot = 0.0;
            for (int j = 0; j < n_ + m; ++j) {
                double ratio, relaxed;
                if (!eligible(j, ratio, relaxed) || ratio > bound) continue;
                if (std::abs(alpha[j]) > best_pivot) {
                    best_pivot = std::abs(alpha[j]);
                    q = j;
                    step = ratio;
                }
            }
        }
        if (q < 0) {
            if (!fresh) {
                refresh();
                continue;
            }
            return LpStatus::Infeasible;
        }

        column_ftran(q, w);
        const double wr = w[r];
        if (std::abs(wr - alpha[q]) > 1e-7 * (1.0 + std::abs(wr)) || std::abs(wr) < opt_.pivot_tol) {
            if (!fresh) {
                refresh();
                continue;
            }
            if (std::abs(wr) < opt_.pivot_tol) return LpStatus::IterationLimit;
        }
        fresh = false;

        // dual update
        for (int j = 0; j < n_ + m; ++j) {
            if (state_[j] == VarState::Basic || alpha[j] == 0.0) continue;
            d_[j] += delta * step * alpha[j];
        }
        d_[q] = 0.0;
        d_[leaving] = delta * step;

        // primal update
        const double target = delta > 0 ? lo_[leaving] : hi_[leaving];
        const double move = (x_[leaving] - target) / wr;
        for (int p = 0; p < m; ++p)
            if (w[p] != 0.0) x_[head_[p]] -= w[p] * move;
        x_[q] += move;
        x_[leaving] = target;
        state_[leaving] = delta > 0 ? VarState::AtLower : VarState::AtUpper;
        state_[q] = VarState::Basic;
        head_[r] = q;

        // basis inverse update
        {
            auto& prow = binv_[r];
            const double inv = 1.0 / wr;
            for (auto& v : prow) v *= inv;
            for (int p = 0; p < m; ++p) {
                if (p == r || w[p] == 0.0) continue;
                const double f = w[p];
                auto& row = binv_[p];
                for (int c = 0; c < m; ++c) row[c] -= f * prow[c];
            }
        }

        ++iterations_;
        ++since_refactor_;
        if (step <= 1e-12) {
            if (++degenerate > opt_.degenerate_limit) bland = true;
        } else {
            degenerate = 0;
            bland = false;
        }
    }
}

std::vector<double> DualSimplex::primal() const
{
    return std::vector<double>(x_.begin(), x_.begin() + n_);
}

double DualSimplex::objective() const
{
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += cost_[j] * x_[j];
    return s;
}

// ---------------------------------------------------------------------------
// LpSession

namespace {

std::vector<double> boxed(const std::vector<double>& v, double big, std::vector<bool>& flags)
{
    std::vector<double> out(v.size());
    flags.assign(v.size(), false);
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (std::isfinite(v[j]) && std::abs(v[j]) < big) {
            out[j] = v[j];
        } else {
            out[j] = v[j] > 0 ? big : -big;
            flags[j] = true;
        }
    }
    return out;
}

} // namespace

LpSession::LpSession(const LpProblem& problem, LpOptions options)
    : opt_(options), pool_((problem.validate(), problem.rows)), active_(problem.rows.size(), false),
      engine_(problem.objective, boxed(problem.lower, kLpBigBound, big_lower_), boxed(problem.upper, kLpBigBound, big_upper_),
              options)
{
    for (std::size_t i = 0; i < pool_.size(); ++i) {
        if (!opt_.lazy_rows || pool_[i].sense == Sense::Equal) {
            engine_.add_row(pool_[i]);
            active_[i] = true;
        }
    }
}

void LpSession::add_cut(const LinearInequality& row)
{
    cuts_.push_back(row);
    engine_.add_row(row);
}

LpSolution LpSession::solve()
{
    LpSolution sol;
    while (true) {
        sol.status = engine_.solve();
        if (sol.status != LpStatus::Optimal) break;
        const auto x = engine_.primal();
        std::vector<std::pair<double, std::size_t>> violated;
        for (std::size_t i = 0; i < pool_.size(); ++i) {
            if (active_[i]) continue;
            const double v = pool_[i].violation(x);
            if (v > opt_.feas_tol) violated.emplace_back(v, i);
        }
        if (violated.empty()) break;
        std::sort(violated.begin(), violated.end(), [](const auto& a, const auto& b) {
            return a.first > b.first || (a.first == b.first && a.second < b.second);
        });
        const std::size_t take = std::min<std::size_t>(violated.size(), static_cast<std::size_t>(opt_.lazy_batch));
        std::vector<std::size_t> chosen;
        for (std::size_t t = 0; t < take; ++t) chosen.push_back(violated[t].second);
        std::sort(chosen.begin(), chosen.end());
        for (auto i : chosen) {
            engine_.add_row(pool_[i]);
            active_[i] = true;
        }
    }
    sol.x = engine_.primal();
    sol.objective = engine_.objective();
    sol.iterations = engine_.iterations();
    sol.activity.reserve(pool_.size());
    for (const auto& row : pool_) sol.activity.push_back(row.activity(sol.x));
    if (sol.status == LpStatus::Optimal) {
        for (int j = 0; j < engine_.num_vars(); ++j) {
            const double tol = 1e-6 * kLpBigBound;
            if ((big_lower_[j] && sol.x[j] <= engine_.lower(j) + tol && engine_.lower(j) <= -kLpBigBound) ||
                (big_upper_[j] && sol.x[j] >= engine_.upper(j) - tol && engine_.upper(j) >= kLpBigBound)) {
                sol.status = LpStatus::Unbounded;
                break;
            }
        }
    }
    return sol;
}

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options)
{
    LpSession session(problem, options);
    return session.solve();
}

// ---------------------------------------------------------------------------
// Branch and bound

namespace {

struct BoundChange {
    int var;
    double lo;
    double hi;
};

struct Node {
    double bound;
    std::int64_t id;
    std::vector<BoundChange> changes;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const
    {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.id > b.id;
    }
};

} // namespace

MipResult solve_mip(const LpProblem& problem, const std::vector<bool>& integral, const MipLimits& limits,
                    const LpOptions& options)
{
    if (static_cast<int>(integral.size()) != problem.num_vars())
        throw std::invalid_argument("integrality marks do not match variable count");
    LpSession session(problem, options);
    const int nv = problem.num_vars();
    std::vector<double> root_lo(nv), root_hi(nv);
    for (int j = 0; j < nv; ++j) {
        root_lo[j] = session.lower(j);
        root_hi[j] = session.upper(j);
    }

    MipResult result;
    double incumbent = kInf;
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push(Node{-kInf, 0, {}});
    std::int64_t next_id = 1;
    std::vector<int> touched;

    auto prune_level = [&] { return incumbent - 1e-9 * std::max(1.0, std::abs(incumbent)); };

    while (!open.empty()) {
        if (result.nodes >= limits.node_limit) {
            result.status = MipStatus::NodeLimit;
            result.bound = std::min(open.top().bound, incumbent);
            return result;
        }
        Node node = open.top();
        open.pop();
        if (node.bound >= prune_level()) continue;

        for (int j : touched) session.set_bounds(j, root_lo[j], root_hi[j]);
        touched.clear();
        for (const auto& c : node.changes) {
            session.set_bounds(c.var, c.lo, c.hi);
            touched.push_back(c.var);
        }
        const auto sol = session.solve();
        ++result.nodes;
        if (sol.status == LpStatus::Infeasible) continue;
        if (sol.status != LpStatus::Optimal) {
            result.status = MipStatus::Failed;
            result.bound = node.bound;
            return result;
        }
        if (sol.objective >= prune_level()) continue;

        int branch = -1;
        double most = limits.integrality_tol;
        for (int j = 0; j < nv; ++j) {
            if (!integral[j]) continue;
            const double frac = std::min(sol.x[j] - std::floor(sol.x[j]), std::ceil(sol.x[j]) - sol.x[j]);
            if (frac > most) {
                most = frac;
                branch = j;
            }
        }
        if (branch < 0) {
            incumbent = sol.objective;
            result.x = sol.x;
            result.objective = sol.objective;
            result.has_incumbent = true;
            continue;
        }
        const double v = sol.x[branch];
        double lo = session.lower(branch), hi = session.upper(branch);
        Node down{sol.objective, next_id++, node.changes};
        down.changes.push_back({branch, lo, std::floor(v)});
        Node up{sol.objective, next_id++, node.changes};
        up.changes.push_back({branch, std::ceil(v), hi});
        open.push(std::move(down));
        open.push(std::move(up));
    }
    result.status = result.has_incumbent ? MipStatus::Optimal : MipStatus::Infeasible;
    result.bound = result.has_incumbent ? result.objective : kInf;
    return result;
}

} // namespace kpart
