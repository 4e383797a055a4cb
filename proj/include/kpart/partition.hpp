#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kpart/variables.hpp"

namespace kpart {

using VertexSet = std::vector<int>;

/// Partition of {1..n} into K nonempty clusters, kept in canonical form: each cluster
/// sorted ascending, clusters ordered by their minimum (the cluster representative).
class KPartition {
public:
    KPartition(int n, std::vector<VertexSet> clusters);

    /// From a cluster label per vertex (labels[v-1] is the label of v); labels may be arbitrary ints.
    static KPartition from_labels(std::span<const int> labels);

    int n() const { return n_; }
    int k() const { return static_cast<int>(clusters_.size()); }
    const std::vector<VertexSet>& clusters() const { return clusters_; }

    /// Index of the cluster containing v, in canonical cluster order.
    int cluster_of(int v) const { return label_[v - 1]; }
    bool together(int u, int v) const { return label_[u - 1] == label_[v - 1]; }
    bool is_representative(int v) const { return clusters_[label_[v - 1]].front() == v; }

    bool operator==(const KPartition& other) const { return clusters_ == other.clusters_; }

private:
    int n_;
    std::vector<VertexSet> clusters_;
    std::vector<int> label_;
};

/// 0/1 characteristic vector in the reduced variable space of VarSpace.
using CharVector = std::vector<std::uint8_t>;

CharVector char_vector(const KPartition& p);

/// Value of the representative indicator x_v of the full (unreduced) vector,
/// evaluated through the substitution for v <= 3.
double representative_value(const VarSpace& space, std::span<const double> x, int v);

/// Decodes an integral point of the reduced space. Returns nothing when the edge
/// values are not 0/1 within `tol`, are not transitive, or do not give exactly K clusters.
std::optional<KPartition> decode_partition(const VarSpace& space, std::span<const double> x, double tol = 1e-6);

/// Stirling number of the second kind S(n, k). Throws on overflow.
std::uint64_t stirling2(int n, int k);

constexpr int kMaxEnumerationN = 13;

/// Streams all K-partitions of {1..n} in restricted-growth-string order.
/// Single consumer; independent enumerators may run concurrently.
class PartitionEnumerator {
public:
    PartitionEnumerator(int n, int k, int max_n = kMaxEnumerationN);

    /// Advances to the next partition; false once exhausted.
    bool next();
    /// Restricted growth string of the current partition (0-based labels).
    std::span<const int> labels() const { return rgs_; }
    KPartition current() const { return KPartition::from_labels(rgs_); }

private:
    bool first_valid();
    bool advance();

    int n_;
    int k_;
    bool started_ = false;
    bool done_ = false;
    std::vector<int> rgs_;
    std::vector<int> prefix_max_;
};

/// All K-partitions, materialized.
std::vector<KPartition> enumerate_partitions(int n, int k, int max_n = kMaxEnumerationN);

/// Calls `fn` with the label string of every K-partition.
void for_each_partition(int n, int k, const std::function<void(std::span<const int>)>& fn,
                        int max_n = kMaxEnumerationN);

/// Swaps R between two disjoint clusters: C1' = (C1 \ R) u (R \ C1), C2' = (C2 \ R) u (R \ C2).
std::pair<VertexSet, VertexSet> transform(const VertexSet& c1, const VertexSet& c2, const VertexSet& r);

} // namespace kpart
