#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpart {

using Weight = std::int64_t;

/// Number of edges of the complete graph on n vertices.
constexpr int edge_count(int n) { return n * (n - 1) / 2; }

/// Position of edge {i,j} (1-based, i != j) in the order (1,2),(1,3),...,(1,n),(2,3),...,(n-1,n).
constexpr int edge_position(int n, int i, int j)
{
    if (i > j) {
        const int t = i;
        i = j;
        j = t;
    }
    return (i - 1) * (2 * n - i) / 2 + (j - i - 1);
}

/// Complete graph on vertices 1..n with integer edge weights and a target cluster count.
///
/// Immutable once constructed; the constructor enforces n >= 3, 2 <= k <= n-1 and
/// a weight table with exactly n(n-1)/2 entries in edge_position() order.
class WeightedInstance {
public:
    WeightedInstance(std::string name, int n, int k, std::vector<Weight> weights);

    int n() const { return n_; }
    int k() const { return k_; }
    const std::string& name() const { return name_; }

    Weight weight(int i, int j) const { return weights_[edge_position(n_, i, j)]; }
    std::span<const Weight> weights() const { return weights_; }

    /// Same graph with another cluster count.
    WeightedInstance with_k(int k) const;

    bool operator==(const WeightedInstance&) const = default;

private:
    std::string name_;
    int n_;
    int k_;
    std::vector<Weight> weights_;
};

enum class Regime { D1, D2, D3 };

struct WeightRange {
    Weight lo;
    Weight hi;
};

/// Closed weight interval of a regime: D1 = [0,500], D2 = [-250,250], D3 = [-500,0].
WeightRange regime_range(Regime regime);
std::string regime_name(Regime regime);
Regime parse_regime(const std::string& text);

/// Batch description: `count` instances for every (n, K) with n in [n_min, n_max],
/// K in [k_min, min(k_max, n-1)].
struct DatasetSpec {
    Regime regime = Regime::D1;
    int count = 100;
    int n_min = 10;
    int n_max = 20;
    int k_min = 2;
    int k_max = 10;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Weights of instance `index` among those with `n` vertices. The graph depends on
/// (regime, seed, n, index) only, so the same graphs are reused across K.
std::vector<Weight> generate_weights(Regime regime, std::uint64_t seed, int n, int index);

/// Generates the batch, ordered by n, then K, then instance index.
std::vector<WeightedInstance> generate(const DatasetSpec& spec);

/// Reports a malformed instance file. `line()` is 0 when the error is not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line, std::string field);
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

std::string instance_to_json(const WeightedInstance& inst);
WeightedInstance instance_from_json(const std::string& text);

WeightedInstance read_instance(const std::filesystem::path& path);
void write_instance(const WeightedInstance& inst, const std::filesystem::path& path);

} // namespace kpart
