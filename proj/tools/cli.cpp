#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <boost/uuid/detail/sha1.hpp>
#include <json.hpp>

#include "kpart/cutting_plane.hpp"
#include "kpart/formulation.hpp"
#include "kpart/instance.hpp"
#include "kpart/lp.hpp"
#include "kpart/partition.hpp"
#include "kpart/polyhedral.hpp"
#include "kpart/separation.hpp"

namespace kpart::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string git_blob_hash(const std::string& content)
{
    boost::uuids::detail::sha1 h;
    const std::string header = "blob " + std::to_string(content.size());
    h.process_bytes(header.data(), header.size() + 1); // includes the terminating NUL
    h.process_bytes(content.data(), content.size());
    boost::uuids::detail::sha1::digest_type d;
    h.get_digest(d);
    std::ostringstream out;
    for (unsigned word : d) out << std::hex << std::setw(8) << std::setfill('0') << word;
    return out.str();
}

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::pair<int, int> parse_range(const std::string& text, const std::string& flag)
{
    try {
        const auto colon = text.find(':');
        std::size_t used = 0;
        if (colon == std::string::npos) {
            const int v = std::stoi(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return {v, v};
        }
        const std::string a = text.substr(0, colon);
        const std::string b = text.substr(colon + 1);
        const int lo = std::stoi(a, &used);
        if (used != a.size()) throw std::invalid_argument(text);
        const int hi = std::stoi(b, &used);
        if (used != b.size()) throw std::invalid_argument(text);
        if (lo > hi) throw std::invalid_argument(text);
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw UsageError(flag + ": expected an integer or a range lo:hi, got '" + text + "'");
    }
}

std::vector<std::string> split(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct DatasetFlags {
    std::string regime = "d1";
    std::string n = "10:20";
    std::string k = "2:10";
    int count = 100;
    std::uint64_t seed = 1;

    void add_to(CLI::App* app)
    {
        app->add_option("--regime", regime, "Weight regime: d1, d2 or d3")->capture_default_str();
        app->add_option("--n", n, "Vertex count or range lo:hi")->capture_default_str();
        app->add_option("--k", k, "Cluster count or range lo:hi")->capture_default_str();
        app->add_option("--count", count, "Instances per (n, K)")->capture_default_str();
        app->add_option("--seed", seed, "Base seed")->capture_default_str();
    }

    DatasetSpec spec() const
    {
        DatasetSpec s;
        try {
            s.regime = parse_regime(regime);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        std::tie(s.n_min, s.n_max) = parse_range(n, "--n");
        std::tie(s.k_min, s.k_max) = parse_range(k, "--k");
        s.count = count;
        s.seed = seed;
        try {
            s.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        return s;
    }

    json to_json() const
    {
        return {{"regime", regime}, {"n", n}, {"k", k}, {"count", count}, {"seed", seed}};
    }
};

std::string dataset_hash(const DatasetSpec& spec)
{
    std::string all;
    for (const auto& inst : generate(spec)) all += instance_to_json(inst);
    return git_blob_hash(all);
}

/// Run record written to <out>/manifest.json whatever the outcome.
class Manifest {
public:
    Manifest(std::string command, fs::path dir) : dir_(std::move(dir))
    {
        doc_["command"] = std::move(command);
        doc_["status"] = "running";
        doc_["config"] = json::object();
        doc_["input_hash"] = nullptr;
        doc_["outputs"] = json::array();
        doc_["timings"] = json::object();
        doc_["errors"] = json::array();
    }

    json& config() { return doc_["config"]; }
    void set_input_hash(const std::string& h) { doc_["input_hash"] = h; }
    void time(const std::string& stage, double seconds) { doc_["timings"][stage] = seconds; }
    void error(const std::string& e) { doc_["errors"].push_back(e); }
    void set_status(const std::string& s) { doc_["status"] = s; }

    void write_output(const std::string& name, const std::string& content)
    {
        const fs::path p = dir_ / name;
        fs::create_directories(p.parent_path());
        std::ofstream f(p);
        if (!f) throw std::runtime_error("cannot write " + p.string());
        f << content;
        doc_["outputs"].push_back(p.string());
    }

    void write()
    {
        fs::create_directories(dir_);
        std::ofstream f(dir_ / "manifest.json");
        f << doc_.dump(2) << '\n';
    }

private:
    fs::path dir_;
    json doc_;
};

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string instance_file(const WeightedInstance& inst, int index, Regime r)
{
    return "instances/" + regime_name(r) + "_n" + std::to_string(inst.n()) + "_k" + std::to_string(inst.k()) + "_" +
           std::to_string(index) + ".json";
}

int cmd_gen(const DatasetFlags& flags, Manifest& m, std::ostream& out)
{
    const auto spec = flags.spec();
    m.config() = flags.to_json();
    Stopwatch sw;
    const auto batch = generate(spec);
    std::string all;
    int index = 0;
    int prev_n = -1;
    int prev_k = -1;
    for (const auto& inst : batch) {
        if (inst.n() != prev_n || inst.k() != prev_k) index = 0;
        prev_n = inst.n();
        prev_k = inst.k();
        const auto text = instance_to_json(inst);
        all += text;
        m.write_output(instance_file(inst, index++, spec.regime), text);
    }
    m.set_input_hash(git_blob_hash(all));
    m.time("generate", sw.seconds());
    out << "wrote " << batch.size() << " instances\n";
    return 0;
}

int cmd_relax(const DatasetFlags& flags, int threads, Manifest& m, std::ostream& out)
{
    const auto spec = flags.spec();
    m.config() = flags.to_json();
    m.config()["threads"] = threads;
    m.set_input_hash(dataset_hash(spec));
    Stopwatch sw;
    const auto rows = run_relaxation_study(spec, {}, threads);
    m.time("relaxation", sw.seconds());
    m.write_output("relax.csv", relax_csv(rows));
    const auto md = relax_markdown(rows);
    m.write_output("relax.md", md);
    out << md;
    int failures = 0;
    for (const auto& r : rows) failures += r.failures;
    if (failures) m.error(std::to_string(failures) + " relaxation solves failed");
    return failures ? 1 : 0;
}

std::vector<Family> parse_families(const std::string& text)
{
    if (text == "all") return cut_families();
    std::vector<Family> out;
    for (const auto& name : split(text)) {
        Family f;
        try {
            f = parse_family(name);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        if (std::find(cut_families().begin(), cut_families().end(), f) == cut_families().end())
            throw UsageError("'" + name + "' is not a separable cut family");
        out.push_back(f);
    }
    if (out.empty()) throw UsageError("--families: no family given");
    return out;
}

std::string records_csv(const DatasetResult& res)
{
    std::ostringstream out;
    out << std::setprecision(10);
    out << "instance,n,K,family,z_root,z_cut,gain,rounds,cuts,initial_integral,root_integral\n";
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        const auto& r = res.records[i];
        out << r.instance << ',' << r.n << ',' << r.k << ',' << res.record_families[i] << ',';
        if (r.trace.empty()) {
            out << ",,,,,,\n";
            continue;
        }
        out << r.z_root << ',' << r.z_cut << ',';
        if (r.gain) out << *r.gain;
        out << ',' << r.rounds << ',' << r.total_cuts() << ',' << r.initial_integral << ',' << r.root_integral
            << '\n';
    }
    return out.str();
}

int cmd_cut(const DatasetFlags& flags, const std::string& families, int max_rounds, bool combined, bool keep_all,
            int threads, Manifest& m, std::ostream& out)
{
    const auto spec = flags.spec();
    CutLoopConfig cfg;
    cfg.families = parse_families(families);
    cfg.max_rounds = max_rounds;
    cfg.keep_all_cuts = keep_all;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    m.config() = flags.to_json();
    json fam = json::array();
    for (auto f : cfg.families) fam.push_back(family_name(f));
    m.config()["families"] = fam;
    m.config()["max_rounds"] = max_rounds;
    m.config()["combined"] = combined;
    m.config()["keep_all_cuts"] = keep_all;
    m.config()["threads"] = threads;
    m.set_input_hash(dataset_hash(spec));
    Stopwatch sw;
    const auto res = run_dataset(spec, cfg, combined, threads);
    m.time("cutting_plane", sw.seconds());
    m.write_output("cuts.csv", dataset_csv(res.rows));
    m.write_output("records.csv", records_csv(res));
    const auto md = dataset_markdown(res.rows);
    m.write_output("cuts.md", md);
    out << md;
    for (const auto& e : res.errors) m.error(e);
    return res.errors.empty() ? 0 : 1;
}

int cmd_certify(const std::string& n_text, const std::string& k_text, const std::string& theorems, Manifest& m,
                std::ostream& out)
{
    std::vector<std::pair<int, int>> grid;
    if (n_text.empty() != k_text.empty()) throw UsageError("certify: give both --n and --k, or neither");
    if (n_text.empty()) {
        grid = default_certification_grid();
    } else {
        const auto [n0, n1] = parse_range(n_text, "--n");
        const auto [k0, k1] = parse_range(k_text, "--k");
        for (int n = n0; n <= n1; ++n)
            for (int k = k0; k <= k1; ++k) grid.emplace_back(n, k);
    }
    SuiteOptions opt;
    opt.theorems = split(theorems);
    for (const auto& t : opt.theorems)
        if (std::find(theorem_labels().begin(), theorem_labels().end(), t) == theorem_labels().end())
            throw UsageError("unknown theorem label '" + t + "'");
    for (auto [n, k] : grid) {
        if (n > kMaxPolytopeN) throw UsageError("certify: n=" + std::to_string(n) + " exceeds the enumeration cap");
        if (k < 3 || k > n - 2) throw UsageError("certify: (n, K) must satisfy 3 <= K <= n-2");
    }
    json g = json::array();
    for (auto [n, k] : grid) g.push_back({n, k});
    m.config() = {{"grid", g}, {"theorems", opt.theorems}};
    m.set_input_hash(git_blob_hash(m.config().dump()));

    std::vector<TheoremCheck> all;
    for (auto [n, k] : grid) {
        Stopwatch sw;
        auto checks = theorem_suite(n, k, opt);
        m.time("n" + std::to_string(n) + "_k" + std::to_string(k), sw.seconds());
        all.insert(all.end(), checks.begin(), checks.end());
    }
    m.write_output("certify.csv", certification_csv(all));

    std::map<std::string, std::pair<int, int>> tally;
    int mismatches = 0;
    for (const auto& c : all) {
        auto& t = tally[c.theorem];
        ++t.first;
        if (!c.match) {
            ++t.second;
            ++mismatches;
            m.error("mismatch: " + c.theorem + " (n=" + std::to_string(c.n) + ", K=" + std::to_string(c.k) + ") " +
                    c.face + ": expected " + c.expected + ", got " + verdict_name(c.verdict));
        }
    }
    out << "| theorem | checks | mismatches |\n|---|---|---|\n";
    for (const auto& [name, t] : tally) out << "| " << name << " | " << t.first << " | " << t.second << " |\n";
    out << "total mismatches: " << mismatches << '\n';
    return mismatches ? 1 : 0;
}

struct SolveFlags {
    std::string instance;
    std::string regime = "d1";
    int n = 7;
    int k = 3;
    std::uint64_t seed = 1;
    int index = 0;
    std::int64_t node_limit = 1'000'000;
};

int cmd_solve(const SolveFlags& f, Manifest& m, std::ostream& out)
{
    std::optional<WeightedInstance> inst;
    if (!f.instance.empty()) {
        std::ifstream in(f.instance);
        if (!in) throw UsageError("cannot read instance file " + f.instance);
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            inst = instance_from_json(ss.str());
        } catch (const std::exception& e) {
            throw UsageError(f.instance + ": " + e.what());
        }
        m.set_input_hash(git_blob_hash(ss.str()));
        m.config() = {{"instance", f.instance}};
    } else {
        Regime r;
        try {
            r = parse_regime(f.regime);
            inst = WeightedInstance(regime_name(r) + "_n" + std::to_string(f.n) + "_" + std::to_string(f.index), f.n,
                                    f.k, generate_weights(r, f.seed, f.n, f.index));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        m.set_input_hash(git_blob_hash(instance_to_json(*inst)));
        m.config() = {{"regime", f.regime}, {"n", f.n}, {"k", f.k}, {"seed", f.seed}, {"index", f.index}};
    }
    m.config()["node_limit"] = f.node_limit;

    Stopwatch sw;
    const auto model = build_p2_model(*inst);
    MipLimits limits;
    limits.node_limit = f.node_limit;
    const auto res = solve_mip(LpProblem::from_model(model), model.integral, limits);
    m.time("solve", sw.seconds());

    json sol = {{"instance", inst->name()}, {"n", inst->n()}, {"K", inst->k()}, {"status", status_name(res.status)},
                {"nodes", res.nodes}, {"bound", res.bound}};
    int code = 0;
    if (res.has_incumbent) {
        const auto part = decode_partition(VarSpace(inst->n(), inst->k()), res.x);
        if (!part) throw std::runtime_error("incumbent does not decode to a K-partition");
        Weight cost = 0;
        for (int i = 1; i <= inst->n(); ++i)
            for (int j = i + 1; j <= inst->n(); ++j)
                if (part->together(i, j)) cost += inst->weight(i, j);
        sol["cost"] = cost;
        sol["clusters"] = part->clusters();
        out << "status " << status_name(res.status) << ", cost " << cost << ", nodes " << res.nodes << '\n';
        for (const auto& c : part->clusters()) {
            out << '{';
            for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << c[i];
            out << "} ";
        }
        out << '\n';
    } else {
        out << "status " << status_name(res.status) << ", no solution\n";
    }
    if (res.status != MipStatus::Optimal) {
        m.error("solver status " + status_name(res.status));
        code = 1;
    }
    m.write_output("solution.json", sol.dump(2) + "\n");
    return code;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"K-partitioning polytope toolkit: datasets, relaxations, cutting planes, facet checks, exact solves"};
    app.require_subcommand(1);
    std::string out_dir = "out";
    int threads = 0;
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads (0 = hardware, capped by KPART_THREADS)");

    DatasetFlags gen_flags, relax_flags, cut_flags;
    auto* gen = app.add_subcommand("gen", "Generate a dataset as JSON instance files");
    gen_flags.add_to(gen);
    auto* relax = app.add_subcommand("relax", "Relaxation values of the reduced and node-cluster models");
    relax_flags.add_to(relax);

    auto* cut = app.add_subcommand("cut", "Root cutting-plane gains per cut family");
    cut_flags.add_to(cut);
    std::string families = "all";
    int max_rounds = 50;
    bool combined = false;
    bool purge = false;
    cut->add_option("--families", families, "Comma-separated families, or all")->capture_default_str();
    cut->add_option("--max-rounds", max_rounds, "Separation rounds per instance")->capture_default_str();
    cut->add_flag("--combined", combined, "Run all selected families together instead of one at a time");
    cut->add_flag("--purge", purge, "Drop cuts that are slack at the new optimum");

    auto* certify = app.add_subcommand("certify", "Compare facet characterisations with exhaustive rank checks");
    std::string cert_n, cert_k, theorems;
    certify->add_option("--n", cert_n, "Vertex count or range (default: built-in grid)");
    certify->add_option("--k", cert_k, "Cluster count or range (default: built-in grid)");
    certify->add_option("--theorems", theorems, "Comma-separated theorem labels (default: all)");

    auto* solve = app.add_subcommand("solve", "Solve one instance to optimality by branch and bound");
    SolveFlags sf;
    solve->add_option("--instance", sf.instance, "Instance JSON file (otherwise generated)");
    solve->add_option("--regime", sf.regime)->capture_default_str();
    solve->add_option("--n", sf.n)->capture_default_str();
    solve->add_option("--k", sf.k)->capture_default_str();
    solve->add_option("--seed", sf.seed)->capture_default_str();
    solve->add_option("--index", sf.index, "Instance index within the generated batch")->capture_default_str();
    solve->add_option("--node-limit", sf.node_limit)->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    if (threads < 0) {
        err << "--threads must be non-negative\n";
        return 2;
    }

    auto* sub = app.get_subcommands().front();
    Manifest m(sub->get_name(), out_dir);
    Stopwatch total;
    int code = 0;
    try {
        if (sub == gen) code = cmd_gen(gen_flags, m, out);
        else if (sub == relax) code = cmd_relax(relax_flags, threads, m, out);
        else if (sub == cut) code = cmd_cut(cut_flags, families, max_rounds, combined, purge == false, threads, m, out);
        else if (sub == certify) code = cmd_certify(cert_n, cert_k, theorems, m, out);
        else code = cmd_solve(sf, m, out);
        m.set_status(code == 0 ? "ok" : "partial");
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        m.error(e.what());
        m.set_status("usage-error");
        code = 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        m.error(e.what());
        m.set_status("failed");
        code = 1;
    }
    m.time("total", total.seconds());
    try {
        m.write();
    } catch (const std::exception& e) {
        err << "error: cannot write manifest: " << e.what() << '\n';
        if (code == 0) code = 1;
    }
    return code;
}

} // namespace kpart::cli
