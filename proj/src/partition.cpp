#include "kpart/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace kpart {

std::string VarSpace::name(int pos) const
{
    if (pos < 0 || pos >= dim()) throw std::out_of_range("variable position out of range");
    if (pos < rep_count()) return "r" + std::to_string(pos + 4);
    int e = pos - rep_count();
    for (int i = 1; i < n_; ++i) {
        const int row = n_ - i;
        if (e < row) return "e" + std::to_string(i) + "_" + std::to_string(i + 1 + e);
        e -= row;
    }
    throw std::logic_error("unreachable edge position");
}

KPartition::KPartition(int n, std::vector<VertexSet> clusters) : n_(n), clusters_(std::move(clusters))
{
    if (n_ < 1) throw std::invalid_argument("partition needs n >= 1");
    label_.assign(n_, -1);
    for (auto& c : clusters_) {
        if (c.empty()) throw std::invalid_argument("partition has an empty cluster");
        std::sort(c.begin(), c.end());
    }
    std::sort(clusters_.begin(), clusters_.end(), [](const VertexSet& a, const VertexSet& b) { return a.front() < b.front(); });
    for (std::size_t ci = 0; ci < clusters_.size(); ++ci) {
        for (int v : clusters_[ci]) {
            if (v < 1 || v > n_) throw std::invalid_argument("vertex " + std::to_string(v) + " outside 1..n");
            if (label_[v - 1] != -1) throw std::invalid_argument("vertex " + std::to_string(v) + " appears twice");
            label_[v - 1] = static_cast<int>(ci);
        }
    }
    for (int v = 1; v <= n_; ++v)
        if (label_[v - 1] == -1) throw std::invalid_argument("vertex " + std::to_string(v) + " not covered");
}

KPartition KPartition::from_labels(std::span<const int> labels)
{
    std::map<int, VertexSet> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(static_cast<int>(i) + 1);
    std::vector<VertexSet> clusters;
    clusters.reserve(groups.size());
    for (auto& [label, members] : groups) clusters.push_back(std::move(members));
    return KPartition(static_cast<int>(labels.size()), std::move(clusters));
}

CharVector char_vector(const KPartition& p)
{
    const VarSpace space(p.n(), p.k());
    CharVector x(space.dim(), 0);
    for (int u = 4; u <= p.n(); ++u) x[space.rep(u)] = p.is_representative(u) ? 1 : 0;
    for (int i = 1; i <= p.n(); ++i)
        for (int j = i + 1; j <= p.n(); ++j) x[space.edge(i, j)] = p.together(i, j) ? 1 : 0;
    return x;
}

double representative_value(const VarSpace& space, std::span<const double> x, int v)
{
    switch (v) {
    case 1: return 1.0;
    case 2: return 1.0 - x[space.edge(1, 2)];
    case 3: {
        double sum = 0.0;
        for (int i = 4; i <= space.n(); ++i) sum += x[space.rep(i)];
        return space.k() - 2 + x[space.edge(1, 2)] - sum;
    }
    default: return x[space.rep(v)];
    }
}

std::optional<KPartition> decode_partition(const VarSpace& space, std::span<const double> x, double tol)
{
    const int n = space.n();
    std::vector<int> label(n, -1);
    int next = 0;
    for (int i = 1; i <= n; ++i) {
        if (label[i - 1] == -1) label[i - 1] = next++;
        for (int j = i + 1; j <= n; ++j) {
            const double v = x[space.edge(i, j)];
            if (std::abs(v) > tol && std::abs(v - 1.0) > tol) return std::nullopt;
        }
    }
    // transitivity: the activated edges must form a disjoint union of cliques
    std::fill(label.begin(), label.end(), -1);
    next = 0;
    for (int i = 1; i <= n; ++i) {
        if (label[i - 1] != -1) continue;
        label[i - 1] = next;
        for (int j = i + 1; j <= n; ++j)
            if (x[space.edge(i, j)] > 0.5) label[j - 1] = next;
        ++next;
    }
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            if ((x[space.edge(i, j)] > 0.5) != (label[i - 1] == label[j - 1])) return std::nullopt;
    if (next != space.k()) return std::nullopt;
    return KPartition::from_labels(label);
}

std::uint64_t stirling2(int n, int k)
{
    if (n < 0 || k < 0) throw std::invalid_argument("stirling2 needs non-negative arguments");
    std::vector<std::vector<std::uint64_t>> s(n + 1, std::vector<std::uint64_t>(k + 1, 0));
    s[0][0] = 1;
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= std::min(i, k); ++j) {
            std::uint64_t a = 0;
            if (__builtin_mul_overflow(static_cast<std::uint64_t>(j), s[i - 1][j], &a) ||
                __builtin_add_overflow(a, s[i - 1][j - 1], &s[i][j]))
                throw std::overflow_error("stirling2 overflow");
        }
    }
    return s[n][k];
}

PartitionEnumerator::PartitionEnumerator(int n, int k, int max_n) : n_(n), k_(k)
{
    if (n < 1) throw std::invalid_argument("enumeration needs n >= 1");
    if (n > max_n)
        throw std::invalid_argument("enumeration guard: n=" + std::to_string(n) + " exceeds cap " + std::to_string(max_n));
    if (k < 1 || k > n) done_ = true;
    rgs_.assign(n, 0);
    prefix_max_.assign(n, 0);
}

// Fills positions from..n-1 with the lexicographically smallest completion that still
// reaches exactly k_ blocks.
static void fill_tail(std::vector<int>& rgs, std::vector<int>& prefix_max, int from, int n, int k)
{
    int m = from > 0 ? prefix_max[from - 1] : -1;
    for (int j = from; j < n; ++j) {
        const int remaining = n - 1 - j;
        int value = 0;
        if (m + remaining < k - 1) value = m + 1;
        if (j == 0) value = 0;
        rgs[j] = value;
        m = std::max(m, value);
        prefix_max[j] = m;
    }
}

bool PartitionEnumerator::first_valid()
{
    fill_tail(rgs_, prefix_max_, 0, n_, k_);
    return prefix_max_[n_ - 1] == k_ - 1;
}

bool PartitionEnumerator::advance()
{
    for (int i = n_ - 1; i >= 1; --i) {
        const int cap = std::min(prefix_max_[i - 1] + 1, k_ - 1);
        if (rgs_[i] + 1 > cap) continue;
        const int value = rgs_[i] + 1;
        const int m = std::max(prefix_max_[i - 1], value);
        if (m + (n_ - 1 - i) < k_ - 1) continue;
        rgs_[i] = value;
        prefix_max_[i] = m;
        fill_tail(rgs_, prefix_max_, i + 1, n_, k_);
        return true;
    }
    return false;
}

bool PartitionEnumerator::next()
{
    if (done_) return false;
    if (!started_) {
        started_ = true;
        if (!first_valid()) done_ = true;
        return !done_;
    }
    if (!advance()) done_ = true;
    return !done_;
}

std::vector<KPartition> enumerate_partitions(int n, int k, int max_n)
{
    std::vector<KPartition> out;
    PartitionEnumerator en(n, k, max_n);
    while (en.next()) out.push_back(en.current());
    return out;
}

void for_each_partition(int n, int k, const std::function<void(std::span<const int>)>& fn, int max_n)
{
    PartitionEnumerator en(n, k, max_n);
    while (en.next()) fn(en.labels());
}

std::pair<VertexSet, VertexSet> transform(const VertexSet& c1, const VertexSet& c2, const VertexSet& r)
{
    auto sorted = [](VertexSet s) {
        std::sort(s.begin(), s.end());
        return s;
    };
    const VertexSet a = sorted(c1), b = sorted(c2), rr = sorted(r);
    VertexSet common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    if (!common.empty()) throw std::invalid_argument("transform needs disjoint clusters");
    VertexSet both;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    if (!std::includes(both.begin(), both.end(), rr.begin(), rr.end()))
        throw std::invalid_argument("transform needs R inside C1 u C2");

    auto swap_part = [&](const VertexSet& c) {
        VertexSet keep, moved, out;
        std::set_difference(c.begin(), c.end(), rr.begin(), rr.end(), std::back_inserter(keep));
        std::set_difference(rr.begin(), rr.end(), c.begin(), c.end(), std::back_inserter(moved));
        std::set_union(keep.begin(), keep.end(), moved.begin(), moved.end(), std::back_inserter(out));
        return out;
    };
    return {swap_part(a), swap_part(b)};
}

} // namespace kpart
