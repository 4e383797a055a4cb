#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kpart/formulation.hpp"
#include "kpart/partition.hpp"

namespace kpart {

inline constexpr int kMaxPolytopeN = 9;

/// Characteristic vectors of all K-partitions of {1..n}, computed once and shared read-only.
struct VertexList {
    int n = 0;
    int k = 0;
    int dim = 0;
    std::vector<std::vector<std::int8_t>> points;
    /// Restricted growth string of each point, for witnesses.
    std::vector<std::vector<int>> labels;
};

std::shared_ptr<const VertexList> polytope_vertices(int n, int k, int max_n = kMaxPolytopeN);

/// Rank of a set of integer vectors, computed exactly. Rows are added one at a time.
class ExactRank {
public:
    explicit ExactRank(int width);
    ~ExactRank();
    ExactRank(ExactRank&&) noexcept;
    ExactRank& operator=(ExactRank&&) noexcept;

    /// Returns true when v is independent of the rows added so far.
    bool add(const std::vector<std::int64_t>& v);
    int rank() const;
    /// True once 64-bit arithmetic overflowed and the multiprecision path took over.
    bool promoted() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Affine dimension of a point set (rank of differences to the first point); -1 when empty.
/// Stops early once `stop_at` is reached when stop_at >= 0.
int affine_dimension(const std::vector<const std::vector<std::int8_t>*>& pts, int stop_at = -1);

/// Affine dimension of P_{n,K} by exhaustive enumeration.
int polytope_dimension(int n, int k, int max_n = kMaxPolytopeN);

struct FaceSpec {
    LinearInequality inequality;
    std::string label;
};

enum class Verdict { Facet, FaceNotFacet, EmptyFace, Invalid };
std::string verdict_name(Verdict v);

struct RankResult {
    int tight_count = 0;
    /// Affine dimension of the tight vertices.
    int face_dim = -1;
    int polytope_dim = 0;
    Verdict verdict = Verdict::EmptyFace;
    /// A violating partition when the verdict is invalid.
    std::optional<KPartition> witness;
};

RankResult certify_face(const VertexList& vertices, const FaceSpec& face, int polytope_dim);
RankResult certify_face(int n, int k, const FaceSpec& face, int max_n = kMaxPolytopeN);

struct TheoremCheck {
    std::string theorem;
    /// Which side of the stated condition the face lies on.
    std::string side;
    int n = 0;
    int k = 0;
    std::string face;
    Verdict verdict = Verdict::EmptyFace;
    /// facet, not-facet, or invalid.
    std::string expected;
    bool match = false;
};

struct SuiteOptions {
    /// Theorem labels to run; empty means all.
    std::vector<std::string> theorems;
};

/// Theorem labels known to the suite.
const std::vector<std::string>& theorem_labels();

/// Instantiates faces on both sides of every condition (sufficient side only for the
/// 2-chorded theorem) and compares verdicts with the stated characterisation.
std::vector<TheoremCheck> theorem_suite(int n, int k, const SuiteOptions& opt = {});

const std::vector<std::pair<int, int>>& default_certification_grid();

std::string certification_csv(const std::vector<TheoremCheck>& checks);

} // namespace kpart
