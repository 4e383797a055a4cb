#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "kpart/instance.hpp"
#include "kpart/variables.hpp"

namespace kpart {

enum class Sense { LessEqual, GreaterEqual, Equal };

/// Tag of a row: the formulation block it comes from or the cut family that produced it.
enum class Family {
    Triangle,
    UpperRep,
    LowerRep,
    Cardinality,
    TwoPartition,
    TwoChorded,
    GeneralClique,
    StrengthenedTriangle,
    Paw,
    Bound,
    Link,
};

std::string family_name(Family f);
Family parse_family(const std::string& text);

struct Term {
    int var;
    double coef;
    bool operator==(const Term&) const = default;
};

/// Sparse row sum(coef * x[var]) <sense> rhs. Terms are sorted by variable and nonzero.
struct LinearInequality {
    std::vector<Term> terms;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
    Family family = Family::Bound;

    double activity(std::span<const double> x) const;
    /// Amount by which x violates the row (<= 0 when satisfied).
    double violation(std::span<const double> x) const;
    bool satisfied_by(std::span<const double> x, double tol) const { return violation(x) <= tol; }

    bool operator==(const LinearInequality&) const = default;
};

/// Accumulates coefficients and constants, then emits a canonical LinearInequality.
/// Representative indicators of vertices 1..3 are expanded through the substitution of VarSpace.
class RowBuilder {
public:
    explicit RowBuilder(const VarSpace& space) : space_(&space) {}

    RowBuilder& add(int var, double coef);
    RowBuilder& add_edge(int i, int j, double coef) { return add(space_->edge(i, j), coef); }
    /// Adds coef * x_v for any vertex v, substituting x_1, x_2, x_3.
    RowBuilder& add_rep(int v, double coef);
    RowBuilder& add_constant(double value);

    LinearInequality build(Sense sense, double rhs, Family family) const;

private:
    const VarSpace* space_;
    std::map<int, double> coefs_;
    double constant_ = 0.0;
};

/// Objective, rows, bounds and integrality marks of a minimization model.
struct Model {
    std::string label;
    std::vector<double> objective;
    std::vector<LinearInequality> rows;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<bool> integral;
    std::vector<std::string> names;

    int num_vars() const { return static_cast<int>(objective.size()); }
    double evaluate(std::span<const double> x) const;
    /// True when every row and bound holds within tol.
    bool feasible(std::span<const double> x, double tol = 1e-9) const;
};

/// Reduced representative model: |E| + n - 3 variables, rows triangle (3 per vertex triple),
/// upper representative x_j + x_{i,j} <= 1 (j >= 4) and its two substituted forms for vertex 3,
/// lower representative for j >= 4 and its substituted form for vertex 3, and the two rows
/// bounding the implied x_3 to [0, 1]. Edges integral; representatives continuous in [0,1].
Model build_p2_model(const WeightedInstance& inst);

/// Unreduced model over (x_1..x_n, edges) with the cardinality row sum x_i = K.
Model build_p1_model(const WeightedInstance& inst);

/// Assignment formulation over (edges, y_{v,c}) with sum_c y_{v,c} = 1, sum_v y_{v,c} >= 1,
/// x_{i,j} >= y_{i,c} + y_{j,c} - 1, x_{i,j} <= 1 - |y_{i,c} - y_{j,c}| and triangle rows on x.
Model build_node_cluster_model(const WeightedInstance& inst);

/// Position of y_{v,c} (v in 1..n, c in 1..K) in the node-cluster model.
int node_cluster_var(int n, int k, int v, int c);

/// Text dump in LP file syntax, one row per line.
std::string to_lp_text(const Model& model);

} // namespace kpart
