#include "kpart/separation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace kpart {

namespace {

using Clock = std::chrono::steady_clock;

std::string fingerprint(const LinearInequality& row)
{
    std::ostringstream out;
    out << static_cast<int>(row.sense) << '|' << std::setprecision(12) << row.rhs;
    for (const auto& t : row.terms) out << '|' << t.var << ':' << t.coef;
    return out.str();
}

// Collects candidate cuts, drops duplicates and keeps the most violated.
class CutCollector {
public:
    CutCollector(Family family, std::span<const double> x, const SeparationOptions& opt)
        : x_(x), opt_(opt), start_(Clock::now())
    {
        report_.family = family;
    }

    void count(std::int64_t k = 1) { report_.candidates += k; }

    bool offer(LinearInequality row)
    {
        const double v = row.violation(x_);
        if (v <= opt_.viol_tol) return false;
        auto key = fingerprint(row);
        if (!seen_.insert(key).second) return false;
        pool_.push_back({std::move(key), {std::move(row), v}});
        return true;
    }

    SeparationReport finish()
    {
        std::sort(pool_.begin(), pool_.end(), [](const auto& a, const auto& b) {
            if (a.second.violation != b.second.violation) return a.second.violation > b.second.violation;
            return a.first < b.first;
        });
        const std::size_t keep = std::min<std::size_t>(pool_.size(), static_cast<std::size_t>(std::max(opt_.max_cuts, 0)));
        for (std::size_t i = 0; i < keep; ++i) report_.cuts.push_back(std::move(pool_[i].second));
        report_.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
        return std::move(report_);
    }

private:
    std::span<const double> x_;
    const SeparationOptions& opt_;
    Clock::time_point start_;
    SeparationReport report_;
    std::set<std::string> seen_;
    std::vector<std::pair<std::string, ViolatedCut>> pool_;
};

void check_vertex(const VarSpace& space, int v)
{
    if (v < 1 || v > space.n()) throw std::invalid_argument("vertex " + std::to_string(v) + " outside 1..n");
}

void check_distinct(const VarSpace& space, const std::vector<int>& vs)
{
    std::vector<int> s(vs);
    std::sort(s.begin(), s.end());
    for (int v : s) check_vertex(space, v);
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw std::invalid_argument("vertices must be distinct");
}

double edge_value(const VarSpace& space, std::span<const double> x, int i, int j)
{
    return x[space.edge(i, j)];
}

} // namespace

// ---------------------------------------------------------------------------
// 2-chorded cycles

LinearInequality make_closed_walk_cut(const VarSpace& space, const std::vector<int>& walk)
{
    const int m = static_cast<int>(walk.size());
    if (m < 3 || m % 2 == 0) throw std::invalid_argument("closed walk needs odd length >= 3");
    for (int v : walk) check_vertex(space, v);
    RowBuilder b(space);
    for (int i = 0; i < m; ++i) {
        const int u = walk[i], v = walk[(i + 1) % m], w = walk[(i + 2) % m];
        if (u == v || u == w) throw std::invalid_argument("closed walk repeats a vertex within two steps");
        b.add_edge(u, v, 1.0);
        b.add_edge(u, w, -1.0);
    }
    return b.build(Sense::LessEqual, m / 2, Family::TwoChorded);
}

LinearInequality make_two_chorded_cut(const VarSpace& space, const std::vector<int>& cycle)
{
    if (cycle.size() < 5 || cycle.size() % 2 == 0) throw std::invalid_argument("2-chorded cycle needs odd length >= 5");
    check_distinct(space, cycle);
    return make_closed_walk_cut(space, cycle);
}

SeparationReport separate_two_chorded(const VarSpace& space, std::span<const double> x, const SeparationOptions& opt)
{
    CutCollector out(Family::TwoChorded, x, opt);
    const int n = space.n();
    if (n < 5) return out.finish();
    const int max_edges = 2 * n - 1;
    const double neg = -std::numeric_limits<double>::infinity();
    // xe[a][b] with 0-based vertices
    std::vector<double> xe(n * n, 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b) xe[a * n + b] = edge_value(space, x, a + 1, b + 1);

    const int states = n * n; // oriented edge a->b stored at a*n+b
    std::vector<double> cur(states), next(states);
    std::vector<std::vector<int>> pred(max_edges + 1, std::vector<int>(states, -1));
    std::mt19937_64 rng(opt.walk_check_seed);

    for (int c1 = 0; c1 < n; ++c1)
        for (int c2 = c1 + 1; c2 < n; ++c2) {
            std::fill(cur.begin(), cur.end(), neg);
            cur[c1 * n + c2] = xe[c1 * n + c2];
            double best = -0.5 + opt.viol_tol;
            int best_len = -1, best_state = -1;
            for (int len = 1; len <= max_edges; ++len) {
                // close through state (a -> c1): final 2-chord a c2
                if (len >= 5 && len % 2 == 1) {
                    for (int a = 0; a < n; ++a) {
                        if (a == c1 || a == c2) continue;
                        const double w = cur[a * n + c1];
                        if (w == neg) continue;
                        out.count();
                        const double total = w - xe[a * n + c2] - 0.5;
                        if (total > best) {
                            best = total;
                            best_len = len;
                            best_state = a * n + c1;
                        }
                    }
                }
                if (len == max_edges) break;
                std::fill(next.begin(), next.end(), neg);
                auto& back = pred[len + 1];
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        const double w = cur[a * n + b];
                        if (w == neg) continue;
                        for (int c = 0; c < n; ++c) {
                            if (c == a || c == b) continue;
                            const double v = w + xe[b * n + c] - xe[a * n + c] - 0.5;
                            if (v > next[b * n + c]) {
                                next[b * n + c] = v;
                                back[b * n + c] = a * n + b;
                            }
                        }
                    }
                std::swap(cur, next);
            }
            if (best_len < 0) continue;
            // states visited: (c1->c2), (c2->c3), ..., (c_m->c1); collect the tails
            std::vector<int> walk;
            int state = best_state;
            for (int len = best_len; len >= 1; --len) {
                walk.push_back(state / n + 1);
                if (len > 1) state = pred[len][state];
            }
            std::reverse(walk.begin(), walk.end());
            auto cut = make_closed_walk_cut(space, walk);
            std::vector<int> sorted(walk);
            std::sort(sorted.begin(), sorted.end());
            const bool simple = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
            if (!simple && !holds_on_samples(space, cut, opt.walk_check_samples, rng)) continue;
            out.offer(std::move(cut));
        }
    return out.finish();
}

// ---------------------------------------------------------------------------
// 2-partition

LinearInequality make_two_partition_cut(const VarSpace& space, const std::vector<int>& s, const std::vector<int>& t)
{
    if (s.empty() || t.empty()) throw std::invalid_argument("2-partition needs nonempty S and T");
    std::vector<int> all(s);
    all.insert(all.end(), t.begin(), t.end());
    check_distinct(space, all);
    RowBuilder b(space);
    for (int u : s)
        for (int v : t) b.add_edge(u, v, 1.0);
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) b.add_edge(s[i], s[j], -1.0);
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j) b.add_edge(t[i], t[j], -1.0);
    return b.build(Sense::LessEqual, static_cast<double>(std::min(s.size(), t.size())), Family::TwoPartition);
}

SeparationReport separate_two_partition(const VarSpace& space, std::span<const double> x, const SeparationOptions& opt)
{
    CutCollector out(Family::TwoPartition, x, opt);
    const int n = space.n();
    auto xv = [&](int i, int j) { return edge_value(space, x, i, j); };

    std::vector<std::pair<int, int>> seeds;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            if (xv(i, j) > opt.viol_tol) seeds.emplace_back(i, j);
    std::stable_sort(seeds.begin(), seeds.end(),
                     [&](const auto& a, const auto& b) { return xv(a.first, a.second) > xv(b.first, b.second); });

    enum Side : std::uint8_t { None, InS, InT };
    for (const auto& [s0, t0] : seeds) {
        std::vector<Side> side(n + 1, None);
        std::vector<bool> locked(n + 1, false);
        std::vector<double> to_s(n + 1, 0.0), to_t(n + 1, 0.0);
        int size_s = 0, size_t_ = 0;
        double lhs = 0.0;
        auto place = [&](int v, Side where) {
            const Side from = side[v];
            if (from == InS) {
                lhs += to_s[v] - to_t[v];
                --size_s;
                for (int u = 1; u <= n; ++u)
                    if (u != v) to_s[u] -= xv(u, v);
            } else if (from == InT) {
                lhs += to_t[v] - to_s[v];
                --size_t_;
                for (int u = 1; u <= n; ++u)
                    if (u != v) to_t[u] -= xv(u, v);
            }
            if (where == InS) {
                lhs += to_t[v] - to_s[v];
                ++size_s;
                for (int u = 1; u <= n; ++u)
                    if (u != v) to_s[u] += xv(u, v);
            } else {
                lhs += to_s[v] - to_t[v];
                ++size_t_;
                for (int u = 1; u <= n; ++u)
                    if (u != v) to_t[u] += xv(u, v);
            }
            side[v] = where;
        };
        place(s0, InS);
        place(t0, InT);
        locked[s0] = locked[t0] = true;

        auto score = [&] { return lhs - std::min(size_s, size_t_); };
        double best = score();
        std::vector<Side> best_side = side;
        int stale = 0;
        while (stale < n) {
            int pick = -1;
            Side dest = None;
            double pick_val = -std::numeric_limits<double>::infinity();
            for (int v = 1; v <= n; ++v) {
                if (locked[v]) continue;
                const double cross_s = to_t[v] - to_s[v]; // lhs change when v joins S
                Side options[2] = {InS, InT};
                for (Side where : options) {
                    if (side[v] == where) continue;
                    if (side[v] == InS && size_s == 1) continue;
                    if (side[v] == InT && size_t_ == 1) continue;
                    double d_lhs = 0.0;
                    int ns = size_s, nt = size_t_;
                    if (side[v] == None) {
                        d_lhs = where == InS ? cross_s : -cross_s;
                        (where == InS ? ns : nt) += 1;
                    } else {
                        d_lhs = where == InS ? 2 * cross_s : -2 * cross_s;
                        if (where == InS) ++ns, --nt;
                        else --ns, ++nt;
                    }
                    out.count();
                    const double val = lhs + d_lhs - std::min(ns, nt);
                    if (val > pick_val + 1e-12) {
                        pick_val = val;
                        pick = v;
                        dest = where;
                    }
                }
            }
            if (pick < 0) break;
            place(pick, dest);
            locked[pick] = true;
            if (score() > best + 1e-12) {
                best = score();
                best_side = side;
                stale = 0;
            } else {
                ++stale;
            }
        }
        if (best <= opt.viol_tol) continue;
        std::vector<int> s, t;
        for (int v = 1; v <= n; ++v) {
            if (best_side[v] == InS) s.push_back(v);
            if (best_side[v] == InT) t.push_back(v);
        }
        out.offer(make_two_partition_cut(space, s, t));
    }
    return out.finish();
}

// ---------------------------------------------------------------------------
// General clique

std::int64_t general_clique_rhs(int size, int k)
{
    if (size < 0 || k < 1) throw std::invalid_argument("general clique rhs needs size >= 0 and k >= 1");
    const std::int64_t q = size / k, r = size % k;
    return (q + 1) * q / 2 * r + q * (q - 1) / 2 * (k - r);
}

LinearInequality make_general_clique_cut(const VarSpace& space, const std::vector<int>& z)
{
    check_distinct(space, z);
    if (static_cast<int>(z.size()) <= space.k()) throw std::invalid_argument("general clique needs |Z| >= K + 1");
    RowBuilder b(space);
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j) b.add_edge(z[i], z[j], 1.0);
    return b.build(Sense::GreaterEqual, static_cast<double>(general_clique_rhs(static_cast<int>(z.size()), space.k())),
                   Family::GeneralClique);
}

SeparationReport separate_general_clique(const VarSpace& space, std::span<const double> x, const SeparationOptions& opt)
{
    CutCollector out(Family::GeneralClique, x, opt);
    const int n = space.n(), k = space.k();
    auto xv = [&](int i, int j) { return edge_value(space, x, i, j); };

    std::vector<std::pair<int, int>> pairs;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) pairs.emplace_back(i, j);
    std::stable_sort(pairs.begin(), pairs.end(),
                     [&](const auto& a, const auto& b) { return xv(a.first, a.second) < xv(b.first, b.second); });
    const int seeds = std::min<int>(static_cast<int>(pairs.size()), std::max(opt.clique_seeds, 1));

    for (int size = k + 1; size <= std::min(2 * k - 1, n - 1); ++size) {
        for (int sd = 0; sd < seeds; ++sd) {
            std::vector<bool> in(n + 1, false);
            std::vector<double> mass(n + 1, 0.0); // x(v, Z)
            std::vector<int> z;
            auto add = [&](int v) {
                in[v] = true;
                z.push_back(v);
                for (int u = 1; u <= n; ++u)
                    if (u != v) mass[u] += xv(u, v);
            };
            auto remove = [&](int v) {
                in[v] = false;
                z.erase(std::find(z.begin(), z.end(), v));
                for (int u = 1; u <= n; ++u)
                    if (u != v) mass[u] -= xv(u, v);
            };
            add(pairs[sd].first);
            add(pairs[sd].second);
            while (static_cast<int>(z.size()) < size) {
                int pick = -1;
                for (int v = 1; v <= n; ++v) {
                    if (in[v]) continue;
                    out.count();
                    if (pick < 0 || mass[v] < mass[pick] - 1e-12) pick = v;
                }
                add(pick);
            }
            // best-improvement 1-swaps
            while (true) {
                double gain = 1e-12;
                int drop = -1, take = -1;
                for (int u : z)
                    for (int v = 1; v <= n; ++v) {
                        if (in[v]) continue;
                        out.count();
                        const double d = mass[u] - (mass[v] - xv(u, v));
                        if (d > gain) {
                            gain = d;
                            drop = u;
                            take = v;
                        }
                    }
                if (drop < 0) break;
                remove(drop);
                add(take);
            }
            std::sort(z.begin(), z.end());
            out.offer(make_general_clique_cut(space, z));
        }
    }
    return out.finish();
}

// ---------------------------------------------------------------------------
// Strengthened triangle

LinearInequality make_strengthened_triangle_cut(const VarSpace& space, int s, int t1, int t2)
{
    check_distinct(space, {s, t1, t2});
    if (!(s > t2 && t2 > t1 && s > 3)) throw std::invalid_argument("strengthened triangle needs s > t2 > t1 and s > 3");
    return RowBuilder(space)
        .add_edge(s, t1, 1.0)
        .add_edge(s, t2, 1.0)
        .add_edge(t1, t2, -1.0)
        .add_rep(s, 1.0)
        .build(Sense::LessEqual, 1.0, Family::StrengthenedTriangle);
}

SeparationReport separate_strengthened_triangle(const VarSpace& space, std::span<const double> x,
                                                const SeparationOptions& opt)
{
    CutCollector out(Family::StrengthenedTriangle, x, opt);
    const int n = space.n();
    for (int s = 4; s <= n; ++s)
        for (int t2 = 2; t2 < s; ++t2)
            for (int t1 = 1; t1 < t2; ++t1) {
                out.count();
                const double lhs = x[space.edge(s, t1)] + x[space.edge(s, t2)] - x[space.edge(t1, t2)] + x[space.rep(s)];
                if (lhs > 1.0 + opt.viol_tol) out.offer(make_strengthened_triangle_cut(space, s, t1, t2));
            }
    return out.finish();
}

// ---------------------------------------------------------------------------
// Paw

bool paw_is_valid(int a, int b, int c, int d)
{
    return a < b && d < b && d < c;
}

LinearInequality make_paw_cut(const VarSpace& space, int a, int b, int c, int d)
{
    check_distinct(space, {a, b, c, d});
    return RowBuilder(space)
        .add_edge(a, b, 1.0)
        .add_edge(b, c, 1.0)
        .add_edge(a, c, -1.0)
        .add_edge(c, d, 1.0)
        .add_rep(b, 1.0)
        .add_rep(c, 1.0)
        .build(Sense::LessEqual, 2.0, Family::Paw);
}

SeparationReport separate_paw(const VarSpace& space, std::span<const double> x, const SeparationOptions& opt)
{
    CutCollector out(Family::Paw, x, opt);
    const int n = space.n();
    std::vector<double> rep(n + 1);
    for (int v = 1; v <= n; ++v) rep[v] = representative_value(space, x, v);
    auto xv = [&](int i, int j) { return x[space.edge(i, j)]; };
    for (int d = 1; d <= n; ++d)
        for (int b = d + 1; b <= n; ++b)
            for (int c = d + 1; c <= n; ++c) {
                if (c == b) continue;
                const double base = xv(b, c) + xv(c, d) + rep[b] + rep[c];
                for (int a = 1; a < b; ++a) {
                    if (a == c || a == d) continue;
                    out.count();
                    const double lhs = base + xv(a, b) - xv(a, c);
                    if (lhs > 2.0 + opt.viol_tol) out.offer(make_paw_cut(space, a, b, c, d));
                }
            }
    return out.finish();
}

// ---------------------------------------------------------------------------

const std::vector<Family>& cut_families()
{
    static const std::vector<Family> all{Family::TwoChorded, Family::TwoPartition, Family::GeneralClique,
                                         Family::StrengthenedTriangle, Family::Paw};
    return all;
}

SeparationReport separate(Family family, const VarSpace& space, std::span<const double> x, const SeparationOptions& opt)
{
    if (static_cast<int>(x.size()) != space.dim()) throw std::invalid_argument("point has the wrong dimension");
    switch (family) {
    case Family::TwoChorded: return separate_two_chorded(space, x, opt);
    case Family::TwoPartition: return separate_two_partition(space, x, opt);
    case Family::GeneralClique: return separate_general_clique(space, x, opt);
    case Family::StrengthenedTriangle: return separate_strengthened_triangle(space, x, opt);
    case Family::Paw: return separate_paw(space, x, opt);
    default: throw std::invalid_argument("no separator for family " + family_name(family));
    }
}

std::vector<int> random_partition_labels(int n, int k, std::mt19937_64& rng)
{
    if (k < 1 || k > n) throw std::invalid_argument("random partition needs 1 <= K <= n");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> labels(n, 0);
    std::uniform_int_distribution<int> pick(0, k - 1);
    for (int i = 0; i < n; ++i) labels[order[i]] = i < k ? i : pick(rng);
    return labels;
}

bool holds_on_samples(const VarSpace& space, const LinearInequality& row, int samples, std::mt19937_64& rng)
{
    for (int s = 0; s < samples; ++s) {
        const auto labels = random_partition_labels(space.n(), space.k(), rng);
        const auto cv = char_vector(KPartition::from_labels(labels));
        const std::vector<double> x(cv.begin(), cv.end());
        if (row.violation(x) > 1e-9) return false;
    }
    return true;
}

std::string cut_to_text(const VarSpace& space, const LinearInequality& row)
{
    std::ostringstream out;
    out << family_name(row.family);
    for (const auto& t : row.terms) out << ' ' << space.name(t.var) << ':' << t.coef;
    out << (row.sense == Sense::LessEqual ? " <= " : row.sense == Sense::GreaterEqual ? " >= " : " = ") << row.rhs;
    return out.str();
}

} // namespace kpart
