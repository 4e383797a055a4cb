#include "kpart/cutting_plane.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "kpart/formulation.hpp"
#include "kpart/partition.hpp"

namespace kpart {

void CutLoopConfig::validate() const
{
    if (max_rounds < 1) throw std::invalid_argument("max rounds must be at least 1");
    if (separation.max_cuts < 1) throw std::invalid_argument("max cuts per round must be at least 1");
    if (!(separation.viol_tol > 0)) throw std::invalid_argument("violation tolerance must be positive");
    for (auto f : families) {
        const auto& all = cut_families();
        if (std::find(all.begin(), all.end(), f) == all.end())
            throw std::invalid_argument("family " + family_name(f) + " has no separator");
    }
}

int GainRecord::total_cuts() const
{
    int t = 0;
    for (const auto& [f, c] : cuts_added) t += c;
    return t;
}

std::optional<double> gain_percent(double z_root, double z_cut)
{
    if (std::abs(z_root) < 1e-6) return std::nullopt;
    return 100.0 * (z_cut - z_root) / std::abs(z_root);
}

bool is_integral_optimum(const WeightedInstance& inst, std::span<const double> x, double z, double tol)
{
    const VarSpace space(inst);
    const auto p = decode_partition(space, x, tol);
    if (!p) return false;
    double cost = 0.0;
    for (int i = 1; i <= inst.n(); ++i)
        for (int j = i + 1; j <= inst.n(); ++j)
            if (p->together(i, j)) cost += static_cast<double>(inst.weight(i, j));
    return std::abs(cost - z) <= tol * std::max(1.0, std::abs(z));
}

GainRecord run_cut_loop(const WeightedInstance& inst, const CutLoopConfig& cfg)
{
    cfg.validate();
    const VarSpace space(inst);
    const auto problem = LpProblem::from_model(build_p2_model(inst));
    auto session = std::make_unique<LpSession>(problem, cfg.lp);

    GainRecord rec;
    rec.instance = inst.name();
    rec.n = inst.n();
    rec.k = inst.k();
    for (auto f : cfg.families) rec.cuts_added[f] = 0;

    auto sol = session->solve();
    if (sol.status != LpStatus::Optimal)
        throw std::runtime_error(inst.name() + ": root LP " + status_name(sol.status));
    rec.z_root = sol.objective;
    rec.trace.push_back(sol.objective);
    rec.initial_integral = is_integral_optimum(inst, sol.x, sol.objective);

    for (int round = 1; round <= cfg.max_rounds; ++round) {
        std::vector<LinearInequality> found;
        for (auto f : cfg.families) {
            auto rep = separate(f, space, sol.x, cfg.separation);
            rec.cuts_added[f] += static_cast<int>(rep.cuts.size());
            for (auto& c : rep.cuts) found.push_back(std::move(c.cut));
        }
        if (found.empty()) break;
        rec.rounds = round;
        for (const auto& c : found) {
            session->add_cut(c);
            rec.cuts.push_back(c);
        }
        sol = session->solve();
        if (sol.status != LpStatus::Optimal)
            throw std::runtime_error(inst.name() + ": LP " + status_name(sol.status) + " in round " + std::to_string(round));
        if (!cfg.keep_all_cuts) {
            std::vector<LinearInequality> kept;
            for (const auto& c : rec.cuts)
                if (std::abs(c.violation(sol.x)) <= 1e-6) kept.push_back(c);
            if (kept.size() != rec.cuts.size()) {
                rec.cuts = std::move(kept);
                session = std::make_unique<LpSession>(problem, cfg.lp);
                for (const auto& c : rec.cuts) session->add_cut(c);
                sol = session->solve();
                if (sol.status != LpStatus::Optimal)
                    throw std::runtime_error(inst.name() + ": LP " + status_name(sol.status) + " after purge in round " +
                                             std::to_string(round));
            }
        }
        rec.trace.push_back(sol.objective);
    }
    rec.z_cut = rec.trace.back();
    rec.gain = gain_percent(rec.z_root, rec.z_cut);
    rec.root_integral = is_integral_optimum(inst, sol.x, sol.objective);
    return rec;
}

int worker_count(int requested)
{
    int w = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (w < 1) w = 1;
    if (const char* env = std::getenv("KPART_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) w = std::min<int>(w, static_cast<int>(cap));
    }
    return w;
}

void parallel_for(int count, int workers, const std::function<void(int)>& fn)
{
    workers = std::max(1, std::min(workers, count));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto body = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(failure_lock);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

namespace {

std::string families_label(const std::vector<Family>& fs)
{
    std::string s;
    for (auto f : fs) s += (s.empty() ? "" : "+") + family_name(f);
    return s;
}

std::string format_value(double v, int digits = 1)
{
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

} // namespace

DatasetResult run_dataset(const DatasetSpec& spec, const CutLoopConfig& cfg, bool combined, int workers)
{
    cfg.validate();
    if (cfg.families.empty()) throw std::invalid_argument("no cut family selected");
    const auto instances = generate(spec);
    std::vector<std::vector<Family>> groups;
    if (combined)
        groups.push_back(cfg.families);
    else
        for (auto f : cfg.families) groups.push_back({f});

    const int jobs = static_cast<int>(instances.size() * groups.size());
    DatasetResult result;
    result.records.resize(jobs);
    result.record_families.resize(jobs);
    std::vector<std::string> errors(jobs);
    parallel_for(jobs, worker_count(workers), [&](int job) {
        const auto& inst = instances[job / groups.size()];
        const auto& fam = groups[job % groups.size()];
        CutLoopConfig c = cfg;
        c.families = fam;
        result.record_families[job] = families_label(fam);
        try {
            result.records[job] = run_cut_loop(inst, c);
        } catch (const std::exception& e) {
            errors[job] = e.what();
            result.records[job].instance = inst.name();
            result.records[job].n = inst.n();
            result.records[job].k = inst.k();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) result.errors.push_back(e);

    // aggregate keyed by (n, K, family) in generation order
    std::map<std::tuple<int, int, std::size_t>, std::size_t> index;
    std::vector<double> sums;
    for (int job = 0; job < jobs; ++job) {
        const auto& r = result.records[job];
        const std::size_t g = job % groups.size();
        const auto key = std::make_tuple(r.n, r.k, g);
        auto it = index.find(key);
        if (it == index.end()) {
            DatasetRow row;
            row.n = r.n;
            row.k = r.k;
            row.family = families_label(groups[g]);
            row.regime = regime_name(spec.regime);
            it = index.emplace(key, result.rows.size()).first;
            result.rows.push_back(row);
            sums.push_back(0.0);
        }
        auto& row = result.rows[it->second];
        ++row.instances;
        if (!errors[job].empty()) {
            ++row.failures;
            continue;
        }
        if (r.root_integral) ++row.root_integral_count;
        if (r.total_cuts() > 0) ++row.with_cuts;
        if (r.gain)
            sums[it->second] += *r.gain;
        else
            ++row.undefined_gain;
    }
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        auto& row = result.rows[i];
        const int defined = row.instances - row.failures - row.undefined_gain;
        if (defined > 0) row.mean_gain = sums[i] / defined;
    }
    std::stable_sort(result.rows.begin(), result.rows.end(), [](const DatasetRow& a, const DatasetRow& b) {
        return std::tie(a.family, a.n, a.k) < std::tie(b.family, b.n, b.k);
    });
    return result;
}

std::string dataset_csv(const std::vector<DatasetRow>& rows)
{
    std::ostringstream out;
    out << "n,K,family,regime,mean_gain,root_integral_count,instances\n";
    for (const auto& r : rows) {
        out << r.n << ',' << r.k << ',' << r.family << ',' << r.regime << ','
            << (r.mean_gain ? format_value(*r.mean_gain, 3) : (r.failures ? "failed" : "undefined")) << ','
            << r.root_integral_count << ',' << r.instances << '\n';
    }
    return out.str();
}

namespace {

template <class Row, class Cell>
std::string grid_markdown(const std::vector<Row>& rows, const std::string& title, Cell cell)
{
    std::set<int> ns, ks;
    for (const auto& r : rows) {
        ns.insert(r.n);
        ks.insert(r.k);
    }
    std::ostringstream out;
    out << "### " << title << "\n\n| n |";
    for (int k : ks) out << " K=" << k << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < ks.size(); ++i) out << "---|";
    out << '\n';
    for (int n : ns) {
        out << "| " << n << " |";
        for (int k : ks) {
            auto it = std::find_if(rows.begin(), rows.end(), [&](const Row& r) { return r.n == n && r.k == k; });
            out << ' ' << (it == rows.end() ? std::string("-") : cell(*it)) << " |";
        }
        out << '\n';
    }
    out << '\n';
    return out.str();
}

} // namespace

std::string dataset_markdown(const std::vector<DatasetRow>& rows)
{
    std::map<std::string, std::vector<DatasetRow>> by_family;
    for (const auto& r : rows) by_family[r.family].push_back(r);
    std::string out;
    for (const auto& [fam, rs] : by_family) {
        const std::string regime = rs.empty() ? "" : rs.front().regime;
        out += grid_markdown(rs, "Mean gain (%), " + fam + ", " + regime, [](const DatasetRow& r) {
            std::string s = r.mean_gain ? format_value(*r.mean_gain) : std::string("n/a");
            if (r.failures) s += " (" + std::to_string(r.failures) + " failed)";
            return s;
        });
        out += grid_markdown(rs, "Root-integral instances, " + fam + ", " + regime,
                             [](const DatasetRow& r) { return std::to_string(r.root_integral_count); });
    }
    return out;
}

std::vector<RelaxRow> run_relaxation_study(const DatasetSpec& spec, const LpOptions& lp, int workers)
{
    const auto instances = generate(spec);
    const int count = static_cast<int>(instances.size());
    std::vector<double> p2(count, 0.0), nc(count, 0.0);
    std::vector<bool> ok(count, false), integral(count, false);
    parallel_for(count, worker_count(workers), [&](int i) {
        const auto& inst = instances[i];
        const auto a = solve_lp(LpProblem::from_model(build_p2_model(inst)), lp);
        const auto b = solve_lp(LpProblem::from_model(build_node_cluster_model(inst)), lp);
        if (a.status != LpStatus::Optimal || b.status != LpStatus::Optimal) return;
        p2[i] = a.objective;
        nc[i] = b.objective;
        integral[i] = is_integral_optimum(inst, a.x, a.objective);
        ok[i] = true;
    });
    std::vector<RelaxRow> rows;
    std::map<std::pair<int, int>, std::size_t> index;
    for (int i = 0; i < count; ++i) {
        const auto& inst = instances[i];
        const auto key = std::make_pair(inst.n(), inst.k());
        auto it = index.find(key);
        if (it == index.end()) {
            RelaxRow r;
            r.n = inst.n();
            r.k = inst.k();
            r.regime = regime_name(spec.regime);
            it = index.emplace(key, rows.size()).first;
            rows.push_back(r);
        }
        auto& r = rows[it->second];
        ++r.instances;
        if (!ok[i]) {
            ++r.failures;
            continue;
        }
        r.mean_p2 += p2[i];
        r.mean_node_cluster += nc[i];
        if (p2[i] > nc[i] + 1e-6 * std::max(1.0, std::abs(nc[i]))) ++r.p2_better;
        if (integral[i]) ++r.root_integral_count;
    }
    for (auto& r : rows) {
        const int solved = r.instances - r.failures;
        if (solved > 0) {
            r.mean_p2 /= solved;
            r.mean_node_cluster /= solved;
        }
    }
    return rows;
}

std::string relax_csv(const std::vector<RelaxRow>& rows)
{
    std::ostringstream out;
    out << "n,K,regime,mean_p2,mean_node_cluster,p2_better,root_integral_count,instances,failures\n";
    for (const auto& r : rows)
        out << r.n << ',' << r.k << ',' << r.regime << ',' << format_value(r.mean_p2, 3) << ','
            << format_value(r.mean_node_cluster, 3) << ',' << r.p2_better << ',' << r.root_integral_count << ','
            << r.instances << ',' << r.failures << '\n';
    return out.str();
}

std::string relax_markdown(const std::vector<RelaxRow>& rows)
{
    const std::string regime = rows.empty() ? "" : rows.front().regime;
    std::string out;
    out += grid_markdown(rows, "Mean LP value, reduced model, " + regime,
                         [](const RelaxRow& r) { return format_value(r.mean_p2); });
    out += grid_markdown(rows, "Mean LP value, node-cluster model, " + regime,
                         [](const RelaxRow& r) { return format_value(r.mean_node_cluster); });
    out += grid_markdown(rows, "Root-integral instances, reduced model, " + regime,
                         [](const RelaxRow& r) { return std::to_string(r.root_integral_count); });
    return out;
}

} // namespace kpart
