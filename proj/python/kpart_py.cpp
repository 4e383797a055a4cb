#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kpart/cutting_plane.hpp"
#include "kpart/formulation.hpp"
#include "kpart/instance.hpp"
#include "kpart/lp.hpp"
#include "kpart/partition.hpp"
#include "kpart/polyhedral.hpp"
#include "kpart/separation.hpp"

namespace py = pybind11;
using namespace kpart;

namespace {

LinearInequality make_row(const std::map<int, double>& coefs, const std::string& sense, double rhs)
{
    LinearInequality row;
    for (const auto& [var, c] : coefs)
        if (c != 0.0) row.terms.push_back({var, c});
    if (sense == "<=") row.sense = Sense::LessEqual;
    else if (sense == ">=") row.sense = Sense::GreaterEqual;
    else if (sense == "==") row.sense = Sense::Equal;
    else throw std::invalid_argument("sense must be '<=', '>=' or '=='");
    row.rhs = rhs;
    return row;
}

std::string sense_text(Sense s)
{
    switch (s) {
    case Sense::LessEqual: return "<=";
    case Sense::GreaterEqual: return ">=";
    case Sense::Equal: return "==";
    }
    return "?";
}

Model build_model(const WeightedInstance& inst, const std::string& formulation)
{
    if (formulation == "p2") return build_p2_model(inst);
    if (formulation == "node-cluster") return build_node_cluster_model(inst);
    throw std::invalid_argument("formulation must be 'p2' or 'node-cluster'");
}

py::dict solve_relaxation(const WeightedInstance& inst, const std::string& formulation)
{
    const auto model = build_model(inst, formulation);
    const auto sol = solve_lp(LpProblem::from_model(model));
    py::dict d;
    d["status"] = status_name(sol.status);
    d["objective"] = sol.objective;
    d["x"] = sol.x;
    return d;
}

py::dict solve(const WeightedInstance& inst, std::int64_t node_limit)
{
    const auto model = build_p2_model(inst);
    MipLimits limits;
    limits.node_limit = node_limit;
    const auto res = solve_mip(LpProblem::from_model(model), model.integral, limits);
    py::dict d;
    d["status"] = status_name(res.status);
    d["nodes"] = res.nodes;
    d["bound"] = res.bound;
    d["cost"] = py::none();
    d["clusters"] = py::none();
    if (res.has_incumbent) {
        const auto part = decode_partition(VarSpace(inst), res.x);
        if (!part) throw std::runtime_error("incumbent does not decode to a K-partition");
        Weight cost = 0;
        for (int i = 1; i <= inst.n(); ++i)
            for (int j = i + 1; j <= inst.n(); ++j)
                if (part->together(i, j)) cost += inst.weight(i, j);
        d["cost"] = cost;
        d["clusters"] = part->clusters();
    }
    return d;
}

std::vector<Family> families_from(const std::vector<std::string>& names)
{
    std::vector<Family> out;
    for (const auto& n : names) out.push_back(parse_family(n));
    return out;
}

} // namespace

PYBIND11_MODULE(kpart, m)
{
    m.doc() = "K-partitioning polytope toolkit";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::enum_<Regime>(m, "Regime").value("D1", Regime::D1).value("D2", Regime::D2).value("D3", Regime::D3);

    py::class_<WeightedInstance>(m, "WeightedInstance")
        .def(py::init<std::string, int, int, std::vector<Weight>>(), py::arg("name"), py::arg("n"), py::arg("k"),
             py::arg("weights"))
        .def_property_readonly("name", &WeightedInstance::name)
        .def_property_readonly("n", &WeightedInstance::n)
        .def_property_readonly("k", &WeightedInstance::k)
        .def_property_readonly("weights",
                               [](const WeightedInstance& w) {
                                   return std::vector<Weight>(w.weights().begin(), w.weights().end());
                               })
        .def("weight", &WeightedInstance::weight, py::arg("i"), py::arg("j"))
        .def("with_k", &WeightedInstance::with_k, py::arg("k"))
        .def("to_json", [](const WeightedInstance& w) { return instance_to_json(w); })
        .def_static("from_json", &instance_from_json, py::arg("text"))
        .def("__eq__", [](const WeightedInstance& a, const WeightedInstance& b) { return a == b; })
        .def("__repr__", [](const WeightedInstance& w) {
            return "WeightedInstance('" + w.name() + "', n=" + std::to_string(w.n()) + ", k=" + std::to_string(w.k()) +
                   ")";
        });

    py::class_<DatasetSpec>(m, "DatasetSpec")
        .def(py::init<>())
        .def_readwrite("regime", &DatasetSpec::regime)
        .def_readwrite("count", &DatasetSpec::count)
        .def_readwrite("n_min", &DatasetSpec::n_min)
        .def_readwrite("n_max", &DatasetSpec::n_max)
        .def_readwrite("k_min", &DatasetSpec::k_min)
        .def_readwrite("k_max", &DatasetSpec::k_max)
        .def_readwrite("seed", &DatasetSpec::seed);

    m.def("generate", &generate, py::arg("spec"), "Generate a batch ordered by n, K, index.");
    m.def("generate_weights", &generate_weights, py::arg("regime"), py::arg("seed"), py::arg("n"), py::arg("index"));
    m.def("edge_position", &edge_position, py::arg("n"), py::arg("i"), py::arg("j"));

    py::class_<KPartition>(m, "KPartition")
        .def(py::init<int, std::vector<VertexSet>>(), py::arg("n"), py::arg("clusters"))
        .def_static("from_labels", [](const std::vector<int>& l) { return KPartition::from_labels(l); })
        .def_property_readonly("n", &KPartition::n)
        .def_property_readonly("k", &KPartition::k)
        .def_property_readonly("clusters", &KPartition::clusters)
        .def("together", &KPartition::together)
        .def("is_representative", &KPartition::is_representative)
        .def("char_vector", [](const KPartition& p) {
            const auto v = char_vector(p);
            return std::vector<int>(v.begin(), v.end());
        });

    m.def(
        "enumerate_partitions",
        [](int n, int k) {
            std::vector<std::vector<int>> out;
            for_each_partition(n, k, [&](std::span<const int> l) { out.emplace_back(l.begin(), l.end()); });
            return out;
        },
        py::arg("n"), py::arg("k"), "Label strings of every K-partition of {1..n}.");

    py::class_<VarSpace>(m, "VarSpace")
        .def(py::init<int, int>(), py::arg("n"), py::arg("k"))
        .def_property_readonly("n", &VarSpace::n)
        .def_property_readonly("k", &VarSpace::k)
        .def_property_readonly("dim", &VarSpace::dim)
        .def("rep", &VarSpace::rep)
        .def("edge", &VarSpace::edge)
        .def("name", &VarSpace::name);

    py::class_<LinearInequality>(m, "LinearInequality")
        .def_property_readonly("terms",
                               [](const LinearInequality& r) {
                                   std::vector<std::pair<int, double>> t;
                                   for (const auto& x : r.terms) t.emplace_back(x.var, x.coef);
                                   return t;
                               })
        .def_property_readonly("sense", [](const LinearInequality& r) { return sense_text(r.sense); })
        .def_readonly("rhs", &LinearInequality::rhs)
        .def_property_readonly("family", [](const LinearInequality& r) { return family_name(r.family); })
        .def("activity", [](const LinearInequality& r, const std::vector<double>& x) { return r.activity(x); })
        .def("violation", [](const LinearInequality& r, const std::vector<double>& x) { return r.violation(x); });

    m.def("solve_relaxation", &solve_relaxation, py::arg("instance"), py::arg("formulation") = "p2",
          "LP relaxation value and point.");
    m.def("solve", &solve, py::arg("instance"), py::arg("node_limit") = 1'000'000,
          "Exact optimum by branch and bound on the reduced model.");

    m.def("cut_families", [] {
        std::vector<std::string> out;
        for (auto f : cut_families()) out.push_back(family_name(f));
        return out;
    });
    m.def(
        "separate",
        [](const std::string& family, int n, int k, const std::vector<double>& x, double viol_tol, int max_cuts) {
            SeparationOptions opt;
            opt.viol_tol = viol_tol;
            opt.max_cuts = max_cuts;
            const VarSpace space(n, k);
            const auto rep = separate(parse_family(family), space, x, opt);
            py::list out;
            for (const auto& c : rep.cuts) out.append(py::make_tuple(c.cut, c.violation, cut_to_text(space, c.cut)));
            return out;
        },
        py::arg("family"), py::arg("n"), py::arg("k"), py::arg("x"), py::arg("viol_tol") = 1e-6,
        py::arg("max_cuts") = 200, "Violated cuts as (inequality, violation, text) tuples.");

    m.def("gain_percent", &gain_percent, py::arg("z_root"), py::arg("z_cut"));
    m.def(
        "run_cut_loop",
        [](const WeightedInstance& inst, const std::vector<std::string>& families, int max_rounds, bool keep_all_cuts) {
            CutLoopConfig cfg;
            cfg.families = families_from(families);
            cfg.max_rounds = max_rounds;
            cfg.keep_all_cuts = keep_all_cuts;
            const auto r = run_cut_loop(inst, cfg);
            py::dict d;
            d["z_root"] = r.z_root;
            d["z_cut"] = r.z_cut;
            d["gain"] = r.gain ? py::cast(*r.gain) : py::none();
            d["rounds"] = r.rounds;
            std::map<std::string, int> cuts;
            for (const auto& [f, c] : r.cuts_added) cuts[family_name(f)] = c;
            d["cuts_added"] = cuts;
            d["initial_integral"] = r.initial_integral;
            d["root_integral"] = r.root_integral;
            d["trace"] = r.trace;
            return d;
        },
        py::arg("instance"), py::arg("families"), py::arg("max_rounds") = 50, py::arg("keep_all_cuts") = true);

    m.def("polytope_dimension", [](int n, int k) { return polytope_dimension(n, k); }, py::arg("n"), py::arg("k"));
    m.def(
        "certify_face",
        [](int n, int k, const std::map<int, double>& coefs, const std::string& sense, double rhs) {
            const auto r = certify_face(n, k, FaceSpec{make_row(coefs, sense, rhs), "python"});
            py::dict d;
            d["verdict"] = verdict_name(r.verdict);
            d["tight_count"] = r.tight_count;
            d["face_dim"] = r.face_dim;
            d["polytope_dim"] = r.polytope_dim;
            d["witness"] = r.witness ? py::cast(r.witness->clusters()) : py::none();
            return d;
        },
        py::arg("n"), py::arg("k"), py::arg("coefs"), py::arg("sense"), py::arg("rhs"),
        "Verdict for sum(coefs[i] * x[i]) <sense> rhs on the reduced variable space.");
    m.def("theorem_labels", &theorem_labels);
    m.def(
        "theorem_suite",
        [](int n, int k, const std::vector<std::string>& theorems) {
            SuiteOptions opt;
            opt.theorems = theorems;
            py::list out;
            for (const auto& c : theorem_suite(n, k, opt)) {
                py::dict d;
                d["theorem"] = c.theorem;
                d["side"] = c.side;
                d["face"] = c.face;
                d["verdict"] = verdict_name(c.verdict);
                d["expected"] = c.expected;
                d["match"] = c.match;
                out.append(d);
            }
            return out;
        },
        py::arg("n"), py::arg("k"), py::arg("theorems") = std::vector<std::string>{});
}
