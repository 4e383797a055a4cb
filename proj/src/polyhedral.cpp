#include "kpart/polyhedral.hpp"
#include "kpart/separation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace kpart {

namespace {

using BigInt = boost::multiprecision::cpp_int;

struct Overflow {};

std::int64_t mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
    return r;
}

std::int64_t sub(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) throw Overflow{};
    return r;
}

BigInt mul(const BigInt& a, const BigInt& b) { return a * b; }
BigInt sub(const BigInt& a, const BigInt& b) { return a - b; }

std::int64_t gcd_of(std::int64_t a, std::int64_t b)
{
    if (a == std::numeric_limits<std::int64_t>::min() || b == std::numeric_limits<std::int64_t>::min()) throw Overflow{};
    return std::gcd(a, b);
}

BigInt gcd_of(const BigInt& a, const BigInt& b) { return boost::multiprecision::gcd(a, b); }

// Fraction-free elimination against the stored rows, in insertion order. Each stored row
// is zero on the pivot columns of the rows before it, so one pass clears them all.
template <class T>
bool insert_row(std::vector<std::vector<T>>& rows, std::vector<int>& pivots, std::vector<T> v)
{
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int c = pivots[i];
        if (v[c] == 0) continue;
        const T a = rows[i][c];
        const T b = v[c];
        T g = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            v[j] = sub(mul(v[j], a), mul(rows[i][j], b));
            if (v[j] != 0) g = gcd_of(g, v[j]);
        }
        if (g > 1)
            for (auto& e : v) e /= g;
    }
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] != 0) {
            pivots.push_back(static_cast<int>(j));
            rows.push_back(std::move(v));
            return true;
        }
    }
    return false;
}

} // namespace

struct ExactRank::Impl {
    int width;
    bool big = false;
    std::vector<std::vector<std::int64_t>> small_rows;
    std::vector<std::vector<BigInt>> big_rows;
    std::vector<int> pivots;

    void promote()
    {
        for (const auto& r : small_rows) {
            std::vector<BigInt> b(r.begin(), r.end());
            big_rows.push_back(std::move(b));
        }
        small_rows.clear();
        big = true;
    }
};

ExactRank::ExactRank(int width) : impl_(std::make_unique<Impl>())
{
    if (width < 0) throw std::invalid_argument("rank width must be non-negative");
    impl_->width = width;
}

ExactRank::~ExactRank() = default;
ExactRank::ExactRank(ExactRank&&) noexcept = default;
ExactRank& ExactRank::operator=(ExactRank&&) noexcept = default;

bool ExactRank::add(const std::vector<std::int64_t>& v)
{
    if (static_cast<int>(v.size()) != impl_->width) throw std::invalid_argument("row width mismatch");
    if (!impl_->big) {
        try {
            return insert_row(impl_->small_rows, impl_->pivots, v);
        } catch (const Overflow&) {
            impl_->promote();
        }
    }
    return insert_row(impl_->big_rows, impl_->pivots, std::vector<BigInt>(v.begin(), v.end()));
}

int ExactRank::rank() const { return static_cast<int>(impl_->pivots.size()); }
bool ExactRank::promoted() const { return impl_->big; }

std::shared_ptr<const VertexList> polytope_vertices(int n, int k, int max_n)
{
    if (n > max_n) throw std::invalid_argument("polytope enumeration cap: n=" + std::to_string(n) + " exceeds " +
                                               std::to_string(max_n));
    if (n < 3 || k < 1 || k > n) throw std::invalid_argument("polytope needs n >= 3 and 1 <= K <= n");
    static std::mutex lock;
    static std::map<std::pair<int, int>, std::shared_ptr<const VertexList>> cache;
    {
        std::lock_guard<std::mutex> g(lock);
        auto it = cache.find({n, k});
        if (it != cache.end()) return it->second;
    }
    auto list = std::make_shared<VertexList>();
    list->n = n;
    list->k = k;
    list->dim = VarSpace(n, k).dim();
    for_each_partition(n, k, [&](std::span<const int> labels) {
        const auto cv = char_vector(KPartition::from_labels(labels));
        list->points.emplace_back(cv.begin(), cv.end());
        list->labels.emplace_back(labels.begin(), labels.end());
    }, max_n);
    std::lock_guard<std::mutex> g(lock);
    return cache.emplace(std::make_pair(n, k), std::move(list)).first->second;
}

int affine_dimension(const std::vector<const std::vector<std::int8_t>*>& pts, int stop_at)
{
    if (pts.empty()) return -1;
    const auto& base = *pts.front();
    ExactRank rank(static_cast<int>(base.size()));
    std::vector<std::int64_t> diff(base.size());
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (stop_at >= 0 && rank.rank() >= stop_at) break;
        for (std::size_t j = 0; j < base.size(); ++j) diff[j] = (*pts[i])[j] - base[j];
        rank.add(diff);
    }
    return rank.rank();
}

int polytope_dimension(int n, int k, int max_n)
{
    static std::mutex lock;
    static std::map<std::pair<int, int>, int> cache;
    {
        std::lock_guard<std::mutex> g(lock);
        auto it = cache.find({n, k});
        if (it != cache.end()) return it->second;
    }
    const auto list = polytope_vertices(n, k, max_n);
    std::vector<const std::vector<std::int8_t>*> pts;
    for (const auto& p : list->points) pts.push_back(&p);
    const int d = affine_dimension(pts, list->dim);
    std::lock_guard<std::mutex> g(lock);
    cache[{n, k}] = d;
    return d;
}

std::string verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::Facet: return "facet";
    case Verdict::FaceNotFacet: return "face-not-facet";
    case Verdict::EmptyFace: return "empty-face";
    case Verdict::Invalid: return "invalid";
    }
    return "unknown";
}

RankResult certify_face(const VertexList& vertices, const FaceSpec& face, int polytope_dim)
{
    const auto& row = face.inequality;
    if (row.sense == Sense::Equal) throw std::invalid_argument("a face needs an inequality, not an equation");
    for (const auto& t : row.terms)
        if (t.var < 0 || t.var >= vertices.dim) throw std::invalid_argument("face references an invalid variable");
    RankResult res;
    res.polytope_dim = polytope_dim;
    std::vector<const std::vector<std::int8_t>*> tight;
    for (std::size_t i = 0; i < vertices.points.size(); ++i) {
        const auto& p = vertices.points[i];
        double lhs = 0.0;
        for (const auto& t : row.terms) lhs += t.coef * p[t.var];
        const double slack = row.sense == Sense::LessEqual ? row.rhs - lhs : lhs - row.rhs;
        if (slack < -1e-9) {
            res.verdict = Verdict::Invalid;
            res.witness = KPartition::from_labels(vertices.labels[i]);
            res.tight_count = 0;
            return res;
        }
        if (slack <= 1e-9) tight.push_back(&p);
    }
    res.tight_count = static_cast<int>(tight.size());
    if (tight.empty()) {
        res.verdict = Verdict::EmptyFace;
        return res;
    }
    const bool proper = tight.size() < vertices.points.size();
    res.face_dim = affine_dimension(tight, proper ? polytope_dim - 1 : -1);
    res.verdict = proper && res.face_dim == polytope_dim - 1 ? Verdict::Facet : Verdict::FaceNotFacet;
    return res;
}

RankResult certify_face(int n, int k, const FaceSpec& face, int max_n)
{
    const auto list = polytope_vertices(n, k, max_n);
    return certify_face(*list, face, polytope_dimension(n, k, max_n));
}

// ---------------------------------------------------------------------------
// Theorem suite

namespace {

std::string set_text(const std::vector<int>& s)
{
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out + "}";
}

int count_low(const std::vector<int>& s)
{
    return static_cast<int>(std::count_if(s.begin(), s.end(), [](int v) { return v <= 3; }));
}

struct Candidate {
    std::string theorem;
    bool condition;
    std::string expected; // when the condition holds
    std::string otherwise; // when it fails
    std::string face;
    LinearInequality row;
};

void for_each_subset(int n, const std::function<void(std::uint32_t)>& fn)
{
    for (std::uint32_t m = 1; m < (1u << n); ++m) fn(m);
}

std::vector<int> members(std::uint32_t mask, int n)
{
    std::vector<int> out;
    for (int v = 1; v <= n; ++v)
        if (mask >> (v - 1) & 1u) out.push_back(v);
    return out;
}

// Cycles through all vertices of `vs`, each listed once up to rotation and reversal.
void for_each_cycle(const std::vector<int>& vs, const std::function<void(const std::vector<int>&)>& fn)
{
    std::vector<int> rest(vs.begin() + 1, vs.end());
    std::sort(rest.begin(), rest.end());
    do {
        if (rest.front() > rest.back()) continue;
        std::vector<int> c{vs.front()};
        c.insert(c.end(), rest.begin(), rest.end());
        fn(c);
    } while (std::next_permutation(rest.begin(), rest.end()));
}

std::vector<Candidate> candidates(int n, int k, const std::vector<std::string>& wanted)
{
    const VarSpace sp(n, k);
    auto want = [&](const std::string& t) {
        return wanted.empty() || std::find(wanted.begin(), wanted.end(), t) != wanted.end();
    };
    std::vector<Candidate> out;
    auto facet_iff = [&](const std::string& th, bool cond, std::string face, LinearInequality row) {
        out.push_back({th, cond, "facet", "not-facet", std::move(face), std::move(row)});
    };

    if (want("edge-bound"))
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) {
                const bool low = j <= 3;
                facet_iff("edge-bound", !low, "x" + std::to_string(i) + "_" + std::to_string(j) + ">=0",
                          RowBuilder(sp).add_edge(i, j, 1).build(Sense::GreaterEqual, 0, Family::Bound));
            }
    if (want("rep-bound"))
        for (int v = 4; v <= n; ++v)
            facet_iff("rep-bound", k != n - 2, "x" + std::to_string(v) + ">=0",
                      RowBuilder(sp).add_rep(v, 1).build(Sense::GreaterEqual, 0, Family::Bound));
    if (want("upper-rep"))
        for (int v = 4; v <= n; ++v)
            for (int u = 1; u < v; ++u)
                facet_iff("upper-rep", n >= 6 || !(u == 4 && v == 5),
                          "x" + std::to_string(u) + "_" + std::to_string(v) + "+x" + std::to_string(v) + "<=1",
                          RowBuilder(sp).add_rep(v, 1).add_edge(u, v, 1).build(Sense::LessEqual, 1, Family::UpperRep));
    if (want("upper-rep-3"))
        for (int a = 1; a <= 2; ++a)
            facet_iff("upper-rep-3", true, "x" + std::to_string(a) + "_3+x3<=1",
                      RowBuilder(sp).add_rep(3, 1).add_edge(a, 3, 1).build(Sense::LessEqual, 1, Family::UpperRep));
    if (want("lower-rep"))
        for (int u = 4; u <= n; ++u) {
            RowBuilder b(sp);
            b.add_rep(u, 1);
            for (int i = 1; i < u; ++i) b.add_edge(i, u, 1);
            facet_iff("lower-rep", true, "x" + std::to_string(u) + "+sum x_i" + std::to_string(u) + ">=1",
                      b.build(Sense::GreaterEqual, 1, Family::LowerRep));
        }
    if (want("lower-rep-3"))
        facet_iff("lower-rep-3", true, "x3+x1_3+x2_3>=1",
                  RowBuilder(sp).add_rep(3, 1).add_edge(1, 3, 1).add_edge(2, 3, 1).build(Sense::GreaterEqual, 1,
                                                                                          Family::LowerRep));
    if (want("triangle"))
        for (int s = 1; s <= n; ++s)
            for (int t1 = 1; t1 <= n; ++t1)
                for (int t2 = t1 + 1; t2 <= n; ++t2) {
                    if (s == t1 || s == t2) continue;
                    std::vector<int> all{s, t1, t2};
                    std::sort(all.begin(), all.end());
                    // K <= n-3 comes from the 2-partition characterisation this is a special case of
                    const bool cond = (s < t1 || s < t2) && all != std::vector<int>{1, 2, 3} && k <= n - 3;
                    facet_iff("triangle", cond,
                              "s=" + std::to_string(s) + " t=" + set_text({t1, t2}),
                              RowBuilder(sp)
                                  .add_edge(s, t1, 1)
                                  .add_edge(s, t2, 1)
                                  .add_edge(t1, t2, -1)
                                  .build(Sense::LessEqual, 1, Family::Triangle));
                }
    if (want("two-chorded") && k >= 4 && k <= n - 2)
        for_each_subset(n, [&](std::uint32_t mask) {
            const auto vc = members(mask, n);
            const int size = static_cast<int>(vc.size());
            if (size < 5 || size % 2 == 0) return;
            const int p = size / 2;
            const int low_out = 3 - count_low(vc);
            if (low_out < 2 || p > n - k - low_out) return;
            for_each_cycle(vc, [&](const std::vector<int>& c) {
                // sufficient direction only
                out.push_back({"two-chorded", true, "facet", "", "C=" + set_text(c), make_two_chorded_cut(sp, c)});
            });
        });
    if (want("two-partition"))
        for_each_subset(n, [&](std::uint32_t smask) {
            const auto s = members(smask, n);
            const std::uint32_t rest = ((1u << n) - 1) & ~smask;
            for (std::uint32_t tmask = rest; tmask; tmask = (tmask - 1) & rest) {
                const auto t = members(tmask, n);
                if (s.size() > t.size()) continue;
                if (s.size() == t.size() && s.front() > t.front()) continue;
                const auto u = members(((1u << n) - 1) & ~smask & ~tmask, n);
                const int diff = static_cast<int>(t.size()) - static_cast<int>(s.size());
                bool above = true;
                for (int sv : s) above = above && std::any_of(t.begin(), t.end(), [&](int tv) { return tv > sv; });
                const bool cond = diff >= 1 && diff <= k - 1 && static_cast<int>(s.size()) <= n - (k + 2) && above &&
                                  (s.size() != 1 || count_low(u) > 0);
                facet_iff("two-partition", cond, "S=" + set_text(s) + " T=" + set_text(t),
                          make_two_partition_cut(sp, s, t));
            }
        });
    if (want("general-clique"))
        for_each_subset(n, [&](std::uint32_t mask) {
            const auto z = members(mask, n);
            if (static_cast<int>(z.size()) != k + 1) return;
            const auto u = members(((1u << n) - 1) & ~mask, n);
            const bool cond = !u.empty() && u.front() <= 3 && z.back() == n;
            facet_iff("general-clique", cond, "Z=" + set_text(z), make_general_clique_cut(sp, z));
        });
    if (want("strengthened-triangle"))
        for (int s = 4; s <= n; ++s)
            for (int t2 = 2; t2 < s; ++t2)
                for (int t1 = 1; t1 < t2; ++t1)
                    facet_iff("strengthened-triangle", t2 > 3 || k <= n - 3,
                              "s=" + std::to_string(s) + " t=" + set_text({t1, t2}),
                              make_strengthened_triangle_cut(sp, s, t1, t2));
    const bool paw_range = k >= 3 && k <= n - 3;
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b)
            for (int c = 1; c <= n; ++c)
                for (int d = 1; d <= n; ++d) {
                    if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
                    const std::string face = "a=" + std::to_string(a) + " b=" + std::to_string(b) +
                                             " c=" + std::to_string(c) + " d=" + std::to_string(d);
                    if (!paw_is_valid(a, b, c, d)) {
                        if (want("paw-validity") && k >= 3 && k <= n - 2)
                            out.push_back({"paw-validity", false, "", "invalid", face, make_paw_cut(sp, a, b, c, d)});
                        continue;
                    }
                    if (b >= 4 && (want("paw") || want("paw-k-n-2"))) {
                        if (paw_range && want("paw"))
                            facet_iff("paw", d < b && b < c, face, make_paw_cut(sp, a, b, c, d));
                        else if (k == n - 2 && want("paw-k-n-2"))
                            out.push_back({"paw-k-n-2", false, "", "not-facet", face, make_paw_cut(sp, a, b, c, d)});
                    }
                    if (b == 3 && (want("paw-3") || want("paw-k-n-2"))) {
                        if (paw_range && want("paw-3"))
                            facet_iff("paw-3", d < 3 && 3 < c && a < 3, face, make_paw_cut(sp, a, b, c, d));
                        else if (k == n - 2 && want("paw-k-n-2"))
                            out.push_back({"paw-k-n-2", false, "", "not-facet", face, make_paw_cut(sp, a, b, c, d)});
                    }
                }
    return out;
}

bool verdict_matches(Verdict v, const std::string& expected)
{
    if (expected == "facet") return v == Verdict::Facet;
    if (expected == "not-facet") return v == Verdict::FaceNotFacet || v == Verdict::EmptyFace;
    if (expected == "invalid") return v == Verdict::Invalid;
    return false;
}

} // namespace

const std::vector<std::string>& theorem_labels()
{
    static const std::vector<std::string> labels{
        "edge-bound", "rep-bound",      "upper-rep",      "upper-rep-3",           "lower-rep",
        "lower-rep-3", "triangle",      "two-chorded",    "two-partition",         "general-clique",
        "strengthened-triangle", "paw", "paw-3",          "paw-k-n-2", "paw-validity"};
    return labels;
}

std::vector<TheoremCheck> theorem_suite(int n, int k, const SuiteOptions& opt)
{
    for (const auto& t : opt.theorems)
        if (std::find(theorem_labels().begin(), theorem_labels().end(), t) == theorem_labels().end())
            throw std::invalid_argument("unknown theorem label '" + t + "'");
    if (k < 3 || k > n - 2) throw std::invalid_argument("theorem suite needs a full-dimensional (n, K): 3 <= K <= n-2");
    const auto list = polytope_vertices(n, k);
    const int pdim = polytope_dimension(n, k);
    std::vector<TheoremCheck> checks;
    for (auto& c : candidates(n, k, opt.theorems)) {
        const auto res = certify_face(*list, FaceSpec{c.row, c.theorem}, pdim);
        TheoremCheck chk;
        chk.theorem = c.theorem;
        chk.side = c.condition ? "condition-holds" : "condition-fails";
        chk.n = n;
        chk.k = k;
        chk.face = c.face;
        chk.verdict = res.verdict;
        chk.expected = c.condition ? c.expected : c.otherwise;
        chk.match = verdict_matches(res.verdict, chk.expected);
        checks.push_back(std::move(chk));
    }
    return checks;
}

const std::vector<std::pair<int, int>>& default_certification_grid()
{
    static const std::vector<std::pair<int, int>> grid{{6, 3}, {6, 4}, {7, 3}, {7, 4}, {7, 5}, {8, 3}, {8, 4}};
    return grid;
}

std::string certification_csv(const std::vector<TheoremCheck>& checks)
{
    std::ostringstream out;
    out << "theorem,side,n,K,verdict,expected,match,face\n";
    for (const auto& c : checks)
        out << c.theorem << ',' << c.side << ',' << c.n << ',' << c.k << ',' << verdict_name(c.verdict) << ','
            << c.expected << ',' << (c.match ? "yes" : "no") << ",\"" << c.face << "\"\n";
    return out.str();
}

} // namespace kpart
