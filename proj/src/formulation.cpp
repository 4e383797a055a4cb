#include "kpart/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace kpart {

std::string family_name(Family f)
{
    switch (f) {
    case Family::Triangle: return "triangle";
    case Family::UpperRep: return "upper-rep";
    case Family::LowerRep: return "lower-rep";
    case Family::Cardinality: return "cardinality";
    case Family::TwoPartition: return "two-partition";
    case Family::TwoChorded: return "two-chorded";
    case Family::GeneralClique: return "general-clique";
    case Family::StrengthenedTriangle: return "strengthened-triangle";
    case Family::Paw: return "paw";
    case Family::Bound: return "bound";
    case Family::Link: return "link";
    }
    throw std::invalid_argument("unknown family");
}

Family parse_family(const std::string& text)
{
    for (auto f : {Family::Triangle, Family::UpperRep, Family::LowerRep, Family::Cardinality, Family::TwoPartition,
                   Family::TwoChorded, Family::GeneralClique, Family::StrengthenedTriangle, Family::Paw, Family::Bound,
                   Family::Link})
        if (family_name(f) == text) return f;
    throw std::invalid_argument("unknown family '" + text + "'");
}

double LinearInequality::activity(std::span<const double> x) const
{
    double sum = 0.0;
    for (const auto& t : terms) sum += t.coef * x[t.var];
    return sum;
}

double LinearInequality::violation(std::span<const double> x) const
{
    const double lhs = activity(x);
    switch (sense) {
    case Sense::LessEqual: return lhs - rhs;
    case Sense::GreaterEqual: return rhs - lhs;
    case Sense::Equal: return std::abs(lhs - rhs);
    }
    return 0.0;
}

RowBuilder& RowBuilder::add(int var, double coef)
{
    coefs_[var] += coef;
    return *this;
}

RowBuilder& RowBuilder::add_rep(int v, double coef)
{
    switch (v) {
    case 1: constant_ += coef; break;
    case 2:
        constant_ += coef;
        add_edge(1, 2, -coef);
        break;
    case 3:
        constant_ += coef * (space_->k() - 2);
        add_edge(1, 2, coef);
        for (int i = 4; i <= space_->n(); ++i) add(space_->rep(i), -coef);
        break;
    default: add(space_->rep(v), coef);
    }
    return *this;
}

RowBuilder& RowBuilder::add_constant(double value)
{
    constant_ += value;
    return *this;
}

LinearInequality RowBuilder::build(Sense sense, double rhs, Family family) const
{
    LinearInequality row;
    row.sense = sense;
    row.family = family;
    row.rhs = rhs - constant_;
    for (const auto& [var, coef] : coefs_)
        if (coef != 0.0) row.terms.push_back({var, coef});
    return row;
}

double Model::evaluate(std::span<const double> x) const
{
    double sum = 0.0;
    for (std::size_t j = 0; j < objective.size(); ++j) sum += objective[j] * x[j];
    return sum;
}

bool Model::feasible(std::span<const double> x, double tol) const
{
    for (int j = 0; j < num_vars(); ++j)
        if (x[j] < lower[j] - tol || x[j] > upper[j] + tol) return false;
    for (const auto& row : rows)
        if (!row.satisfied_by(x, tol)) return false;
    return true;
}

namespace {

void check_k(const WeightedInstance& inst)
{
    if (inst.k() < 2 || inst.k() > inst.n() - 1)
        throw std::invalid_argument("K out of range: need 2 <= K <= n-1");
}

// Three rows per vertex triple, apex first: x_{a,p} + x_{a,q} - x_{p,q} <= 1.
template <class EdgeVar>
void add_triangles(std::vector<LinearInequality>& rows, int n, EdgeVar edge)
{
    auto row = [&](int apex, int p, int q) {
        std::map<int, double> c;
        c[edge(apex, p)] += 1.0;
        c[edge(apex, q)] += 1.0;
        c[edge(p, q)] -= 1.0;
        LinearInequality r;
        r.sense = Sense::LessEqual;
        r.rhs = 1.0;
        r.family = Family::Triangle;
        for (auto [v, k] : c) r.terms.push_back({v, k});
        rows.push_back(std::move(r));
    };
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
            for (int c = b + 1; c <= n; ++c) {
                row(a, b, c);
                row(b, a, c);
                row(c, a, b);
            }
}

} // namespace

Model build_p2_model(const WeightedInstance& inst)
{
    check_k(inst);
    const VarSpace space(inst);
    const int n = inst.n();
    Model m;
    m.label = "p2";
    m.objective.assign(space.dim(), 0.0);
    m.lower.assign(space.dim(), 0.0);
    m.upper.assign(space.dim(), 1.0);
    m.integral.assign(space.dim(), false);
    for (int pos = 0; pos < space.dim(); ++pos) m.names.push_back(space.name(pos));
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            m.objective[space.edge(i, j)] = static_cast<double>(inst.weight(i, j));
            m.integral[space.edge(i, j)] = true;
        }

    // (1)
    add_triangles(m.rows, n, [&](int i, int j) { return space.edge(i, j); });
    // (2): x_j + x_{i,j} <= 1 for j >= 4
    for (int j = 4; j <= n; ++j)
        for (int i = 1; i < j; ++i)
            m.rows.push_back(RowBuilder(space).add_rep(j, 1).add_edge(i, j, 1).build(Sense::LessEqual, 1, Family::UpperRep));
    // (2'): x_3 + x_{i,3} <= 1 for i in {1,2}
    for (int i = 1; i <= 2; ++i)
        m.rows.push_back(RowBuilder(space).add_rep(3, 1).add_edge(i, 3, 1).build(Sense::LessEqual, 1, Family::UpperRep));
    // (3): x_j + sum_{i<j} x_{i,j} >= 1 for j >= 4
    for (int j = 4; j <= n; ++j) {
        RowBuilder b(space);
        b.add_rep(j, 1);
        for (int i = 1; i < j; ++i) b.add_edge(i, j, 1);
        m.rows.push_back(b.build(Sense::GreaterEqual, 1, Family::LowerRep));
    }
    // (3'): x_3 + x_{1,3} + x_{2,3} >= 1
    m.rows.push_back(
        RowBuilder(space).add_rep(3, 1).add_edge(1, 3, 1).add_edge(2, 3, 1).build(Sense::GreaterEqual, 1, Family::LowerRep));
    // (5), (6): 0 <= x_3 <= 1
    m.rows.push_back(RowBuilder(space).add_rep(3, 1).build(Sense::LessEqual, 1, Family::Cardinality));
    m.rows.push_back(RowBuilder(space).add_rep(3, 1).build(Sense::GreaterEqual, 0, Family::Cardinality));
    return m;
}

Model build_p1_model(const WeightedInstance& inst)
{
    check_k(inst);
    const int n = inst.n();
    const int dim = n + edge_count(n);
    auto rep = [](int v) { return v - 1; };
    auto edge = [n](int i, int j) { return n + edge_position(n, i, j); };

    Model m;
    m.label = "p1";
    m.objective.assign(dim, 0.0);
    m.lower.assign(dim, 0.0);
    m.upper.assign(dim, 1.0);
    m.integral.assign(dim, false);
    for (int v = 1; v <= n; ++v) m.names.push_back("r" + std::to_string(v));
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            m.names.push_back("e" + std::to_string(i) + "_" + std::to_string(j));
            m.objective[edge(i, j)] = static_cast<double>(inst.weight(i, j));
            m.integral[edge(i, j)] = true;
        }

    auto make = [](std::vector<Term> terms, Sense s, double rhs, Family f) {
        std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
        return LinearInequality{std::move(terms), s, rhs, f};
    };

    add_triangles(m.rows, n, edge);
    for (int j = 1; j <= n; ++j)
        for (int i = 1; i < j; ++i)
            m.rows.push_back(make({{rep(j), 1.0}, {edge(i, j), 1.0}}, Sense::LessEqual, 1, Family::UpperRep));
    for (int j = 1; j <= n; ++j) {
        std::vector<Term> t{{rep(j), 1.0}};
        for (int i = 1; i < j; ++i) t.push_back({edge(i, j), 1.0});
        m.rows.push_back(make(std::move(t), Sense::GreaterEqual, 1, Family::LowerRep));
    }
    std::vector<Term> card;
    for (int v = 1; v <= n; ++v) card.push_back({rep(v), 1.0});
    m.rows.push_back(make(std::move(card), Sense::Equal, inst.k(), Family::Cardinality));
    return m;
}

int node_cluster_var(int n, int k, int v, int c)
{
    return edge_count(n) + (v - 1) * k + (c - 1);
}

Model build_node_cluster_model(const WeightedInstance& inst)
{
    check_k(inst);
    const int n = inst.n();
    const int k = inst.k();
    const int dim = edge_count(n) + n * k;
    auto edge = [n](int i, int j) { return edge_position(n, i, j); };
    auto y = [n, k](int v, int c) { return node_cluster_var(n, k, v, c); };

    Model m;
    m.label = "node-cluster";
    m.objective.assign(dim, 0.0);
    m.lower.assign(dim, 0.0);
    m.upper.assign(dim, 1.0);
    m.integral.assign(dim, false);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            m.names.push_back("e" + std::to_string(i) + "_" + std::to_string(j));
            m.objective[edge(i, j)] = static_cast<double>(inst.weight(i, j));
            m.integral[edge(i, j)] = true;
        }
    for (int v = 1; v <= n; ++v)
        for (int c = 1; c <= k; ++c) {
            m.names.push_back("y" + std::to_string(v) + "_" + std::to_string(c));
            m.integral[y(v, c)] = true;
        }

    for (int v = 1; v <= n; ++v) {
        LinearInequality r{{}, Sense::Equal, 1.0, Family::Cardinality};
        for (int c = 1; c <= k; ++c) r.terms.push_back({y(v, c), 1.0});
        m.rows.push_back(std::move(r));
    }
    for (int c = 1; c <= k; ++c) {
        LinearInequality r{{}, Sense::GreaterEqual, 1.0, Family::Cardinality};
        for (int v = 1; v <= n; ++v) r.terms.push_back({y(v, c), 1.0});
        m.rows.push_back(std::move(r));
    }
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
            for (int c = 1; c <= k; ++c) {
                // x_{i,j} - y_{i,c} - y_{j,c} >= -1; edges precede all y variables
                m.rows.push_back(LinearInequality{
                    {{edge(i, j), 1.0}, {y(i, c), -1.0}, {y(j, c), -1.0}}, Sense::GreaterEqual, -1.0, Family::Link});
                // x_{i,j} + y_{i,c} - y_{j,c} <= 1 and x_{i,j} - y_{i,c} + y_{j,c} <= 1
                m.rows.push_back(LinearInequality{
                    {{edge(i, j), 1.0}, {y(i, c), 1.0}, {y(j, c), -1.0}}, Sense::LessEqual, 1.0, Family::Link});
                m.rows.push_back(LinearInequality{
                    {{edge(i, j), 1.0}, {y(i, c), -1.0}, {y(j, c), 1.0}}, Sense::LessEqual, 1.0, Family::Link});
            }
    add_triangles(m.rows, n, edge);
    return m;
}

namespace {

std::string format_number(double v)
{
    std::ostringstream out;
    if (v == std::floor(v) && std::abs(v) < 1e15)
        out << static_cast<long long>(v);
    else
        out << std::setprecision(17) << v;
    return out.str();
}

void write_expr(std::ostringstream& out, const Model& m, const std::vector<Term>& terms)
{
    bool first = true;
    for (const auto& t : terms) {
        const double c = t.coef;
        if (first) {
            if (c < 0) out << "- ";
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        const double a = std::abs(c);
        if (a != 1.0) out << format_number(a) << " ";
        out << m.names[t.var];
        first = false;
    }
    if (first) out << "0 " << (m.names.empty() ? "x" : m.names.front());
}

} // namespace

std::string to_lp_text(const Model& m)
{
    std::ostringstream out;
    out << "\\ " << m.label << "\n";
    out << "Minimize\n obj: ";
    std::vector<Term> obj;
    for (int j = 0; j < m.num_vars(); ++j)
        if (m.objective[j] != 0.0) obj.push_back({j, m.objective[j]});
    write_expr(out, m, obj);
    out << "\nSubject To\n";
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        const auto& row = m.rows[r];
        out << " " << family_name(row.family) << "_" << r << ": ";
        write_expr(out, m, row.terms);
        const char* sense = row.sense == Sense::LessEqual ? " <= " : row.sense == Sense::GreaterEqual ? " >= " : " = ";
        out << sense << format_number(row.rhs) << "\n";
    }
    out << "Bounds\n";
    for (int j = 0; j < m.num_vars(); ++j)
        out << " " << format_number(m.lower[j]) << " <= " << m.names[j] << " <= " << format_number(m.upper[j]) << "\n";
    out << "Generals\n";
    for (int j = 0; j < m.num_vars(); ++j)
        if (m.integral[j]) out << " " << m.names[j] << "\n";
    out << "End\n";
    return out.str();
}

} // namespace kpart
