#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpart/instance.hpp"
#include "kpart/lp.hpp"
#include "kpart/separation.hpp"

namespace kpart {

struct CutLoopConfig {
    std::vector<Family> families;
    int max_rounds = 50;
    SeparationOptions separation;
    /// Keep every cut added so far; otherwise cuts that are slack at the new optimum are dropped.
    bool keep_all_cuts = true;
    LpOptions lp;

    void validate() const;
};

struct GainRecord {
    std::string instance;
    int n = 0;
    int k = 0;
    double z_root = 0.0;
    double z_cut = 0.0;
    /// 100 (z_cut - z_root) / |z_root|; empty when |z_root| < 1e-6.
    std::optional<double> gain;
    int rounds = 0;
    std::map<Family, int> cuts_added;
    /// Integrality of the relaxation before any cut and after the last round.
    bool initial_integral = false;
    bool root_integral = false;
    /// LP value after each solve, starting with z_root.
    std::vector<double> trace;
    /// Cuts present in the final relaxation.
    std::vector<LinearInequality> cuts;

    int total_cuts() const;
};

/// 100 (z_cut - z_root) / |z_root|, or nothing when |z_root| < 1e-6.
std::optional<double> gain_percent(double z_root, double z_cut);

/// Edge values within `tol` of 0/1, decoding to a K-partition whose cost matches z.
bool is_integral_optimum(const WeightedInstance& inst, std::span<const double> x, double z, double tol = 1e-6);

/// Root cutting-plane loop on the reduced model. Throws std::runtime_error when an LP fails.
GainRecord run_cut_loop(const WeightedInstance& inst, const CutLoopConfig& cfg);

/// Worker count: `requested` if positive, else hardware concurrency, capped by KPART_THREADS.
int worker_count(int requested = 0);

/// Runs fn(i) for i in [0, count) on a pool of workers. Exceptions are rethrown after all jobs finish.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

struct DatasetRow {
    int n = 0;
    int k = 0;
    std::string family;
    std::string regime;
    std::optional<double> mean_gain;
    int root_integral_count = 0;
    int instances = 0;
    int undefined_gain = 0;
    int failures = 0;
    /// Instances where the family produced at least one cut.
    int with_cuts = 0;
};

struct DatasetResult {
    std::vector<DatasetRow> rows;
    /// Per (instance, family) records in generation order; failed runs carry an empty trace.
    std::vector<GainRecord> records;
    std::vector<std::string> record_families;
    std::vector<std::string> errors;
};

/// Runs the loop for every generated instance, once per family in cfg.families
/// (or once with all of them together when `combined`).
DatasetResult run_dataset(const DatasetSpec& spec, const CutLoopConfig& cfg, bool combined = false, int workers = 0);

std::string dataset_csv(const std::vector<DatasetRow>& rows);
/// One table per family: rows n, columns K, cells mean gain.
std::string dataset_markdown(const std::vector<DatasetRow>& rows);

struct RelaxRow {
    int n = 0;
    int k = 0;
    std::string regime;
    double mean_p2 = 0.0;
    double mean_node_cluster = 0.0;
    /// Instances with P2 value strictly above the node-cluster value.
    int p2_better = 0;
    int root_integral_count = 0;
    int instances = 0;
    int failures = 0;
};

/// Relaxation values of the reduced model and the node-cluster model over a dataset.
std::vector<RelaxRow> run_relaxation_study(const DatasetSpec& spec, const LpOptions& lp = {}, int workers = 0);
std::string relax_csv(const std::vector<RelaxRow>& rows);
std::string relax_markdown(const std::vector<RelaxRow>& rows);

} // namespace kpart
