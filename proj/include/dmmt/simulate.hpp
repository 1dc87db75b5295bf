#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dmmt/prior.hpp"
#include "dmmt/region.hpp"
#include "dmmt/rng.hpp"

namespace dmmt {

// One Gaussian mixture component; 1D uses mean[0] and cov[0] (variance),
// 2D uses cov = (var_x, cov_xy, var_y).
struct MixtureComponent {
    double weight = 1.0;
    std::array<double, 2> mean{};
    std::array<double, 3> cov{};
};

struct Scenario {
    std::string id;
    int dims = 1;
    int n1 = 0;
    int n2 = 0;
    std::vector<MixtureComponent> group1;
    std::vector<MixtureComponent> group2;
};

// The eight built-in two-sample scenarios; throws on unknown id.
Scenario scenario_by_id(const std::string& id);
std::vector<std::string> scenario_ids();

using RawGroup = std::vector<std::vector<double>>;

// i.i.d. draws from the scenario's mixtures. n1/n2 overrides of 0 keep
// the scenario defaults.
std::pair<RawGroup, RawGroup> generate(const Scenario& scenario, Rng& rng,
                                       int n1_override = 0, int n2_override = 0);

// Pooled points randomly reassigned to groups of the original sizes.
std::pair<RawGroup, RawGroup> permute_labels(const RawGroup& group1,
                                             const RawGroup& group2, Rng& rng);

struct ReplicateResult {
    int index = 0;
    std::uint64_t seed = 0;
    std::string scenario;
    bool is_null = false;
    double statistic = 0.0;  // 1 - Pr(H0)
    double fit_millis = 0.0;
    std::string top_region_key;
    double top_effect_size = 0.0;
};

// For each replicate: generate data, fit on original labels and on
// permuted labels. Per-replicate seeds are derived from base_seed, so the
// statistics are reproducible bit-for-bit. Replicates may run in parallel
// (DMMT_THREADS caps the worker count); results are ordered by index.
std::vector<ReplicateResult> run_replicates(const Scenario& scenario, int replicates,
                                            const PriorSpec& prior,
                                            std::uint64_t base_seed,
                                            int n1_override = 0,
                                            int n2_override = 0);

// Mann-Whitney AUC: fraction of (null, alt) pairs with alt > null, ties
// counted one half.
double roc_auc(const std::vector<double>& null_stats,
               const std::vector<double>& alt_stats);

struct SweepCell {
    double beta = 0.0;
    double gamma = 0.0;
    double median_null = 0.0;  // median Pr(H0) over permuted-label runs
    double median_alt = 0.0;   // median Pr(H0) over original-label runs
};

std::vector<SweepCell> sensitivity_sweep(const Scenario& scenario,
                                         const std::vector<double>& betas,
                                         const std::vector<double>& gammas,
                                         int replicates, const PriorSpec& base_prior,
                                         std::uint64_t base_seed);

struct BenchPoint {
    int n = 0;  // per-group sample size
    double median_fit_millis = 0.0;
};

struct BenchResult {
    std::vector<BenchPoint> points;
    double log_log_slope = 0.0;
};

// Median fit time per sample size with a least-squares log-log slope.
BenchResult bench(const Scenario& scenario, const std::vector<int>& sizes,
                  int replicates, const PriorSpec& prior, std::uint64_t base_seed);

double median(std::vector<double> values);

std::string replicates_csv(const std::vector<ReplicateResult>& results);

}  // namespace dmmt
