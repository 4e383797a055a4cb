#pragma once

#include <stdexcept>
#include <string>

#include "kpart/instance.hpp"

namespace kpart {

/// Reduced variable space of the representative formulation for a given (n, K).
///
/// Positions follow the order (x_4, ..., x_n, x_{1,2}, ..., x_{1,n}, x_{2,3}, ..., x_{n-1,n}):
/// representative indicators of vertices 4..n first, then all edges. The indicators of
/// vertices 1, 2 and 3 are not variables; they are the affine expressions
///   x_1 = 1,  x_2 = 1 - x_{1,2},  x_3 = K - 2 + x_{1,2} - sum_{i>=4} x_i.
class VarSpace {
public:
    VarSpace(int n, int k) : n_(n), k_(k)
    {
        if (n < 3) throw std::invalid_argument("variable space needs n >= 3");
        if (k < 1 || k > n) throw std::invalid_argument("variable space needs 1 <= K <= n");
    }
    explicit VarSpace(const WeightedInstance& inst) : VarSpace(inst.n(), inst.k()) {}

    int n() const { return n_; }
    int k() const { return k_; }
    int rep_count() const { return n_ - 3; }
    int edge_total() const { return edge_count(n_); }
    int dim() const { return edge_count(n_) + n_ - 3; }

    /// Position of x_u for u >= 4.
    int rep(int u) const
    {
        if (u < 4 || u > n_) throw std::out_of_range("no representative variable for vertex " + std::to_string(u));
        return u - 4;
    }
    int edge(int i, int j) const { return rep_count() + edge_position(n_, i, j); }

    bool is_edge(int pos) const { return pos >= rep_count(); }

    /// Canonical name: r4.. for representatives, e1_2.. for edges.
    std::string name(int pos) const;

private:
    int n_;
    int k_;
};

} // namespace kpart
