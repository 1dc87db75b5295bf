// End-to-end acceptance checks. Each check prints one PASS/FAIL line;
// the process exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dmmt/engine.hpp"
#include "dmmt/inference.hpp"
#include "dmmt/rng.hpp"
#include "dmmt/simulate.hpp"
#include "oracle.hpp"

using namespace dmmt;

namespace {

struct Check {
    std::string name;
    std::function<bool(std::string&)> run;
};

Dataset unit_dataset(const oracle::Points& g1, const oracle::Points& g2) {
    Dataset ds;
    ds.dims = static_cast<int>((g1.empty() ? g2 : g1)[0].size());
    ds.group1 = g1;
    ds.group2 = g2;
    ds.ranges.assign(ds.dims, Interval{0.0, 1.0});
    return ds;
}

PriorSpec prior_with_cap(int cap) {
    PriorSpec spec;
    spec.depth_cap = cap;
    return spec;
}

// ---------------------------------------------------------------- 1
bool check_oracle_equivalence(std::string& detail) {
    const std::vector<std::pair<oracle::Points, oracle::Points>> datasets{
        {{{0.2}}, {{0.8}}},
        {{{0.1}, {0.3}, {0.7}}, {{0.4}, {0.6}, {0.9}}},
        {{{0.25}, {0.25}, {0.75}}, {{0.25}}},          // duplicates
        {{{0.05}, {0.5}, {0.55}, {0.6}, {0.95}}, {}},  // empty group 2
        {{}, {{0.33}, {0.66}}},                        // empty group 1
        {{{0.5}, {0.5}}, {{0.5}, {0.5}}},              // all points coincide
        {{{0.12}, {0.88}, {0.46}}, {{0.52}, {0.13}, {0.81}}},
    };
    double worst = 0.0;
    for (int cap : {1, 2, 3}) {
        const PriorSpec prior = prior_with_cap(cap);
        for (const auto& [x1, x2] : datasets) {
            const PosteriorModel model = fit(unit_dataset(x1, x2), prior);
            const NodeEvaluation* nd = model.node(root(1));
            for (State g : {State::divide, State::merge}) {
                const double ref = oracle::phi(root(1), x1, x2, g, prior);
                const double got = std::exp(nd->log_phi[idx(g)]);
                worst = std::max(worst, std::abs(got - ref) / std::abs(ref));
            }
            const double ref0 = oracle::prob_null(1, x1, x2, prior);
            const double got0 = prob_null(model);
            worst = std::max(worst, std::abs(got0 - ref0) / std::abs(ref0));
        }
    }
    detail = "max relative error " + std::to_string(worst);
    return worst < 1e-10;
}

// ---------------------------------------------------------------- 2
bool check_sampling_consistency(std::string& detail) {
    struct ModelSpec {
        int n1, n2, dims, cap;
        unsigned data_seed;
    };
    const std::vector<ModelSpec> specs{
        {8, 8, 1, 4, 101}, {15, 10, 1, 5, 102}, {6, 9, 2, 4, 103},
        {20, 20, 1, 12, 104}, {12, 12, 2, 12, 105},
    };
    const int draws = 10000;
    double worst_z = 0.0;
    for (const auto& s : specs) {
        std::mt19937 gen(s.data_seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        oracle::Points x1, x2;
        for (int i = 0; i < s.n1; ++i) {
            std::vector<double> x(s.dims);
            for (double& v : x) v = unif(gen);
            x1.push_back(x);
        }
        for (int i = 0; i < s.n2; ++i) {
            std::vector<double> x(s.dims);
            for (double& v : x) v = 0.5 * unif(gen) + 0.25;
            x2.push_back(x);
        }
        const PosteriorModel model =
            fit(unit_dataset(x1, x2), prior_with_cap(s.cap));
        const double exact = prob_null(model);

        Rng rng(derive_seed(777, s.data_seed));
        int never = 0;
        for (int b = 0; b < draws; ++b)
            if (!sample_state_tree(model, rng).ever_divided) ++never;
        const double mc = static_cast<double>(never) / draws;
        const double se = std::sqrt(std::max(exact * (1.0 - exact), 1e-12) / draws);
        worst_z = std::max(worst_z, std::abs(mc - exact) / se);
    }
    detail = "max |z| " + std::to_string(worst_z) + " (limit 3)";
    return worst_z < 3.0;
}

// ---------------------------------------------------------------- 3
bool check_normalization(std::string& detail) {
    std::mt19937 gen(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0.0;
    int terminal_checked = 0;
    bool terminal_exact = true;
    bool psi_in_range = true;

    for (int rep = 0; rep < 200 && terminal_checked < 1200; ++rep) {
        const int dims = 1 + rep % 2;
        const int n1 = 2 + static_cast<int>(gen() % 12);
        const int n2 = 2 + static_cast<int>(gen() % 12);
        oracle::Points x1, x2;
        for (int i = 0; i < n1; ++i) {
            std::vector<double> x(dims);
            for (double& v : x) v = unif(gen);
            x1.push_back(x);
        }
        for (int i = 0; i < n2; ++i) {
            std::vector<double> x(dims);
            for (double& v : x) v = unif(gen);
            x2.push_back(x);
        }
        const PriorSpec prior = prior_with_cap(4 + static_cast<int>(gen() % 5));
        const PosteriorModel model = fit(unit_dataset(x1, x2), prior);

        // random walks down the partition tree
        for (int walk = 0; walk < 4; ++walk) {
        std::vector<RegionKey> path{root(dims)};
        for (int step = 0; step < prior.depth_cap; ++step) {
            const RegionKey& key = path.back();

            for (State g : kStates) {
                const auto row = model.posterior_transition(key, g);
                worst = std::max(worst, std::abs(row[0] + row[1] + row[2] - 1.0));
            }
            for (State g : {State::divide, State::merge}) {
                const auto lam = model.posterior_direction(key, g);
                double sum = 0.0;
                for (double v : lam) sum += v;
                worst = std::max(worst, std::abs(sum - 1.0));
                const double ps = psi(model, key, g);
                if (ps < 0.0 || ps > 1.0 + 1e-12) psi_in_range = false;
            }
            const auto rs = rho_star(model, path);
            worst = std::max(worst, std::abs(rs[0] + rs[1] + rs[2] - 1.0));

            // terminal values on empty/singleton regions: the stored
            // marginal likelihood is exactly 2^(level * n)
            const NodeEvaluation* nd = model.node(key);
            if (nd && nd->n() <= 1) {
                const double want =
                    static_cast<double>(key.level()) * static_cast<double>(nd->n()) * M_LN2;
                for (State g : kStates)
                    if (nd->log_phi[idx(g)] != want) terminal_exact = false;
                ++terminal_checked;
            } else if (!nd) {
                // unvisited regions sit in data-free subtrees: the
                // posterior must coincide exactly with the prior there
                const auto rho = transition_matrix(key.level(), prior);
                for (State g : kStates) {
                    const auto row = model.posterior_transition(key, g);
                    for (State h : kStates)
                        if (row[idx(h)] != rho(g, h)) terminal_exact = false;
                }
                ++terminal_checked;
            }

            const int j = 1 + static_cast<int>(gen() % dims);
            const auto [l, r] = split(key, j);
            path.push_back(gen() % 2 ? l : r);
        }
        }
    }
    detail = "max normalization error " + std::to_string(worst) + ", " +
             std::to_string(terminal_checked) + " terminal nodes";
    return worst < 1e-10 && psi_in_range && terminal_exact &&
           terminal_checked >= 1000;
}

// ---------------------------------------------------------------- 4
bool check_prior_null(std::string& detail) {
    const PriorSpec prior;  // defaults: beta 0.3, gamma 0.2, cap 12
    const double via_psi = prior_prob_null(prior);
    const double via_enum = oracle::prior_prob_null_enumerated(prior, 4);
    detail = "Pr(H0) = " + std::to_string(via_psi) + ", enumeration gap " +
             std::to_string(std::abs(via_psi - via_enum));
    return std::abs(via_psi - via_enum) < 1e-10 && via_psi > 0.40 && via_psi < 0.60;
}

// ---------------------------------------------------------------- 5
double scenario_auc(const std::string& id, int replicates, std::uint64_t seed) {
    const auto results =
        run_replicates(scenario_by_id(id), replicates, PriorSpec{}, seed);
    std::vector<double> nulls, alts;
    for (const auto& r : results) (r.is_null ? nulls : alts).push_back(r.statistic);
    return roc_auc(nulls, alts);
}

bool check_power(std::string& detail) {
    const double auc_local = scenario_auc("1d-local-shift", 200, 20250101);
    const double auc_global = scenario_auc("1d-global-shift", 200, 20250102);
    detail = "local-shift auc " + std::to_string(auc_local) + " (>= 0.90), " +
             "global-shift auc " + std::to_string(auc_global) + " (>= 0.80)";
    return auc_local >= 0.90 && auc_global >= 0.80;
}

// ---------------------------------------------------------------- 6
bool check_consistency_trend(std::string& detail) {
    const Scenario sc = scenario_by_id("1d-local-shift");
    std::vector<double> null_medians, alt_medians;
    for (int n : {100, 400, 1600}) {
        const auto results = run_replicates(sc, 50, PriorSpec{}, 31337 + n, n, n);
        std::vector<double> nulls, alts;
        for (const auto& r : results)
            (r.is_null ? nulls : alts).push_back(1.0 - r.statistic);  // Pr(H0)
        null_medians.push_back(median(nulls));
        alt_medians.push_back(median(alts));
    }
    detail = "null medians";
    for (double v : null_medians) detail += " " + std::to_string(v);
    detail += "; alt medians";
    for (double v : alt_medians) detail += " " + std::to_string(v);
    return null_medians[0] <= null_medians[1] && null_medians[1] <= null_medians[2] &&
           alt_medians[0] >= alt_medians[1] && alt_medians[1] >= alt_medians[2] &&
           alt_medians[2] < 0.05;
}

// ---------------------------------------------------------------- 7
bool check_localization(std::string& detail) {
    const Scenario sc = scenario_by_id("1d-local-shift");
    const PriorSpec prior;  // delta_star 0.8
    const int replicates = 100;
    int hits = 0, flagged = 0;
    for (int r = 0; r < replicates; ++r) {
        Rng rng(derive_seed(555, r));
        const auto [raw1, raw2] = generate(sc, rng);
        const Dataset ds = rescale(raw1, raw2);
        const PosteriorModel model = fit(ds, prior);
        const RepTree tree = representative_tree(model, prior.delta_star);
        const auto regions = divergent_regions(tree, model, prior.delta_star);
        if (regions.empty()) continue;
        ++flagged;
        // map the top region back to raw coordinates; the differential
        // mixture component lives in (0.85, 0.95)
        const auto box = bounds(regions.front().key);
        const Interval range = ds.ranges[0];
        const double width = (range.hi - range.lo) * (1.0 + 1e-9);
        const double raw_lo = range.lo + box[0].lo * width;
        const double raw_hi = range.lo + box[0].hi * width;
        if (raw_hi > 0.85 && raw_lo < 0.95) ++hits;
    }
    detail = std::to_string(hits) + "/" + std::to_string(replicates) +
             " top regions intersect the differential component (>= 80); " +
             std::to_string(flagged) + " replicates flagged any region, " +
             std::to_string(hits) + " of those localized correctly";
    return hits >= 80;
}

// ---------------------------------------------------------------- 8
bool check_runtime_scaling(std::string& detail) {
    const Scenario sc = scenario_by_id("1d-local-shift");
    const std::vector<int> sizes{200, 400, 800, 1600};
    // with the default depth cap the 1D tree saturates (~2^13 nodes) near
    // n=1600 and the timing curve flattens; a deeper cap keeps the workload
    // in the regime where cost tracks n
    const BenchResult res = bench(sc, sizes, 5, prior_with_cap(16), 424242);

    // bit-identical rerun of a fixed-seed replicate batch
    const auto a = run_replicates(sc, 10, PriorSpec{}, 616161);
    const auto b = run_replicates(sc, 10, PriorSpec{}, 616161);
    bool identical = a.size() == b.size();
    for (std::size_t i = 0; identical && i < a.size(); ++i)
        identical = a[i].statistic == b[i].statistic &&
                    a[i].seed == b[i].seed &&
                    a[i].top_region_key == b[i].top_region_key &&
                    a[i].top_effect_size == b[i].top_effect_size;

    detail = "log-log slope " + std::to_string(res.log_log_slope) +
             " (in [0.8, 1.3]), rerun " + (identical ? "bit-identical" : "DIFFERS");
    return res.log_log_slope >= 0.8 && res.log_log_slope <= 1.3 && identical;
}

}  // namespace

int main() {
    const std::vector<Check> checks{
        {"01 forward recursion matches brute-force enumeration", check_oracle_equivalence},
        {"02 analytic null probability matches posterior sampling", check_sampling_consistency},
        {"03 normalization and terminal-value suite", check_normalization},
        {"04 prior null probability near one half", check_prior_null},
        {"05 power separation on shift scenarios", check_power},
        {"06 consistency trend with sample size", check_consistency_trend},
        {"07 differential region localization", check_localization},
        {"08 runtime scaling and reproducibility", check_runtime_scaling},
    };

    int failures = 0;
    for (const auto& check : checks) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = check.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        std::printf("[%s] %s — %s (%.1fs)\n", ok ? "PASS" : "FAIL",
                    check.name.c_str(), detail.c_str(), secs);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
