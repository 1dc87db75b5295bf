#include "dmmt/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dmmt/engine.hpp"
#include "dmmt/inference.hpp"

namespace dmmt {

namespace {

std::vector<MixtureComponent> mixture1d(
    const std::vector<std::array<double, 3>>& rows) {
    // rows: (weight, mean, sd)
    std::vector<MixtureComponent> out;
    for (const auto& r : rows) {
        MixtureComponent c;
        c.weight = r[0];
        c.mean = {r[1], 0.0};
        c.cov = {r[2] * r[2], 0.0, 0.0};
        out.push_back(c);
    }
    return out;
}

MixtureComponent comp2d(double w, double mx, double my, double vxx, double vxy,
                        double vyy) {
    MixtureComponent c;
    c.weight = w;
    c.mean = {mx, my};
    c.cov = {vxx, vxy, vyy};
    return c;
}

std::vector<MixtureComponent> local2d_base() {
    return {comp2d(0.11, 9.0, 9.9, 2.9, 0.5, 1.1),
            comp2d(0.16, 0.0, 4.4, 1.2, -0.6, 2.8),
            comp2d(0.25, -2.3, -9.7, 2.3, -1.0, 1.7),
            comp2d(0.39, 3.4, 5.9, 1.1, -0.4, 2.9),
            comp2d(0.09, 5.8, -9.5, 3.0, 0.2, 1.0)};
}

std::vector<MixtureComponent> dispersion2d_base() {
    return {comp2d(0.19, 0.9, -7.2, 0.5, -0.1, 0.3),
            comp2d(0.08, -5.7, 3.3, 1.3, 0.7, 2.7),
            comp2d(0.33, -6.3, -2.1, 1.0, -0.3, 3.0),
            comp2d(0.27, 7.5, -3.1, 2.9, 0.5, 1.1),
            comp2d(0.13, -3.1, 9.5, 2.4, -0.9, 1.6)};
}

}  // namespace

std::vector<std::string> scenario_ids() {
    return {"1d-local-shift",  "1d-local-dispersion",  "1d-global-shift",
            "1d-global-dispersion", "2d-local-shift", "2d-local-dispersion",
            "2d-global-shift", "2d-global-dispersion"};
}

Scenario scenario_by_id(const std::string& id) {
    Scenario s;
    s.id = id;
    if (id == "1d-local-shift") {
        s.dims = 1;
        s.n1 = s.n2 = 200;
        s.group1 = mixture1d({{0.9, 0.2, 0.05}, {0.1, 0.9, 0.01}});
        s.group2 = mixture1d({{0.9, 0.2, 0.05}, {0.1, 0.88, 0.01}});
    } else if (id == "1d-local-dispersion") {
        s.dims = 1;
        s.n1 = s.n2 = 200;
        s.group1 = mixture1d({{0.9, 0.2, 0.05}, {0.1, 0.8, 0.01}});
        s.group2 = mixture1d({{0.9, 0.2, 0.05}, {0.1, 0.8, 0.04}});
    } else if (id == "1d-global-shift") {
        s.dims = 1;
        s.n1 = s.n2 = 100;
        s.group1 = mixture1d({{1.0, -0.5, 2.0}});
        s.group2 = mixture1d({{1.0, 0.5, 2.0}});
    } else if (id == "1d-global-dispersion") {
        s.dims = 1;
        s.n1 = s.n2 = 50;
        s.group1 = mixture1d({{1.0, 0.0, 1.0}});
        s.group2 = mixture1d({{1.0, 0.0, 2.0}});
    } else if (id == "2d-local-shift") {
        s.dims = 2;
        s.n1 = s.n2 = 400;
        s.group1 = local2d_base();
        s.group2 = local2d_base();
        s.group2[0].mean[0] += 1.0;  // delta = (1, 1) on the first component
        s.group2[0].mean[1] += 1.0;
    } else if (id == "2d-local-dispersion") {
        s.dims = 2;
        s.n1 = s.n2 = 400;
        s.group1 = dispersion2d_base();
        s.group2 = dispersion2d_base();
        for (double& v : s.group2[0].cov) v *= 5.0;
    } else if (id == "2d-global-shift") {
        s.dims = 2;
        s.n1 = s.n2 = 100;
        s.group1 = {comp2d(1.0, 0.0, 0.0, 2.9, 0.4, 1.1)};
        s.group2 = {comp2d(1.0, 1.0, 0.0, 2.9, 0.4, 1.1)};
    } else if (id == "2d-global-dispersion") {
        s.dims = 2;
        s.n1 = s.n2 = 50;
        s.group1 = {comp2d(1.0, 0.0, 0.0, 1.0, 0.0, 1.0)};
        s.group2 = {comp2d(1.0, 0.0, 0.0, 3.0, 0.0, 3.0)};
    } else {
        throw std::invalid_argument("unknown scenario id: " + id);
    }
    return s;
}

namespace {

std::vector<double> draw_point(const std::vector<MixtureComponent>& mix, int dims,
                               Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    const MixtureComponent* c = &mix.back();
    for (const auto& comp : mix) {
        acc += comp.weight;
        if (u < acc) {
            c = &comp;
            break;
        }
    }
    if (dims == 1) return {c->mean[0] + std::sqrt(c->cov[0]) * rng.normal()};
    // 2x2 Cholesky: cov = (vxx, vxy, vyy)
    const double l11 = std::sqrt(c->cov[0]);
    const double l21 = c->cov[1] / l11;
    const double l22 = std::sqrt(c->cov[2] - l21 * l21);
    const double z1 = rng.normal(), z2 = rng.normal();
    return {c->mean[0] + l11 * z1, c->mean[1] + l21 * z1 + l22 * z2};
}

}  // namespace

std::pair<RawGroup, RawGroup> generate(const Scenario& scenario, Rng& rng,
                                       int n1_override, int n2_override) {
    const int n1 = n1_override > 0 ? n1_override : scenario.n1;
    const int n2 = n2_override > 0 ? n2_override : scenario.n2;
    RawGroup g1, g2;
    g1.reserve(n1);
    g2.reserve(n2);
    for (int i = 0; i < n1; ++i)
        g1.push_back(draw_point(scenario.group1, scenario.dims, rng));
    for (int i = 0; i < n2; ++i)
        g2.push_back(draw_point(scenario.group2, scenario.dims, rng));
    return {std::move(g1), std::move(g2)};
}

std::pair<RawGroup, RawGroup> permute_labels(const RawGroup& group1,
                                             const RawGroup& group2, Rng& rng) {
    RawGroup pool = group1;
    pool.insert(pool.end(), group2.begin(), group2.end());
    // Fisher-Yates on the pooled points
    for (std::size_t i = pool.size(); i > 1; --i)
        std::swap(pool[i - 1], pool[rng.below(i)]);
    RawGroup g1(pool.begin(), pool.begin() + group1.size());
    RawGroup g2(pool.begin() + group1.size(), pool.end());
    return {std::move(g1), std::move(g2)};
}

namespace {

int thread_budget() {
    if (const char* env = std::getenv("DMMT_THREADS")) {
        const int t = std::atoi(env);
        if (t >= 1) return t;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::mutex err_mutex;
    std::exception_ptr err;
    const int workers = std::min(threads, count);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(err_mutex);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

ReplicateResult fit_one(const Scenario& scenario, const RawGroup& raw1,
                        const RawGroup& raw2, const PriorSpec& prior, int index,
                        std::uint64_t seed, bool is_null) {
    ReplicateResult res;
    res.index = index;
    res.seed = seed;
    res.scenario = scenario.id;
    res.is_null = is_null;
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset ds = rescale(raw1, raw2);
    const PosteriorModel model = fit(ds, prior);
    res.statistic = 1.0 - prob_null(model);
    const RepTree tree = representative_tree(model, prior.delta_star);
    const auto regions = divergent_regions(tree, model, prior.delta_star);
    if (!regions.empty()) {
        res.top_region_key = to_text(regions.front().key);
        res.top_effect_size = regions.front().effect;
    }
    const auto t1 = std::chrono::steady_clock::now();
    res.fit_millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return res;
}

}  // namespace

std::vector<ReplicateResult> run_replicates(const Scenario& scenario, int replicates,
                                            const PriorSpec& prior,
                                            std::uint64_t base_seed, int n1_override,
                                            int n2_override) {
    if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    prior.validate();
    // two results per replicate: original labels then permuted labels
    std::vector<ReplicateResult> results(2 * static_cast<std::size_t>(replicates));
    parallel_for(replicates, thread_budget(), [&](int r) {
        const std::uint64_t gen_seed = derive_seed(base_seed, 2 * r);
        const std::uint64_t perm_seed = derive_seed(base_seed, 2 * r + 1);
        Rng rng(gen_seed);
        auto [raw1, raw2] = generate(scenario, rng, n1_override, n2_override);
        try {
            results[2 * r] = fit_one(scenario, raw1, raw2, prior, r, gen_seed, false);
            Rng prng(perm_seed);
            auto [null1, null2] = permute_labels(raw1, raw2, prng);
            results[2 * r + 1] =
                fit_one(scenario, null1, null2, prior, r, perm_seed, true);
        } catch (const std::exception& e) {
            throw std::runtime_error("replicate " + std::to_string(r) + ": " +
                                     e.what());
        }
    });
    return results;
}

double roc_auc(const std::vector<double>& null_stats,
               const std::vector<double>& alt_stats) {
    if (null_stats.empty() || alt_stats.empty())
        throw std::invalid_argument("roc_auc: empty input");
    double wins = 0.0;
    for (double a : alt_stats)
        for (double b : null_stats) {
            if (a > b)
                wins += 1.0;
            else if (a == b)
                wins += 0.5;
        }
    return wins / (static_cast<double>(null_stats.size()) *
                   static_cast<double>(alt_stats.size()));
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty list");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<SweepCell> sensitivity_sweep(const Scenario& scenario,
                                         const std::vector<double>& betas,
                                         const std::vector<double>& gammas,
                                         int replicates, const PriorSpec& base_prior,
                                         std::uint64_t base_seed) {
    std::vector<SweepCell> table;
    for (double beta : betas)
        for (double gamma : gammas) {
            PriorSpec prior = base_prior;
            prior.beta = beta;
            prior.gamma = gamma;
            prior.validate();
            const auto results =
                run_replicates(scenario, replicates, prior, base_seed);
            std::vector<double> null_p, alt_p;
            for (const auto& r : results)
                (r.is_null ? null_p : alt_p).push_back(1.0 - r.statistic);
            SweepCell cell;
            cell.beta = beta;
            cell.gamma = gamma;
            cell.median_null = median(null_p);
            cell.median_alt = median(alt_p);
            table.push_back(cell);
        }
    return table;
}

BenchResult bench(const Scenario& scenario, const std::vector<int>& sizes,
                  int replicates, const PriorSpec& prior, std::uint64_t base_seed) {
    BenchResult out;
    for (int n : sizes) {
        const auto results =
            run_replicates(scenario, replicates, prior, derive_seed(base_seed, n), n, n);
        std::vector<double> times;
        for (const auto& r : results)
            if (!r.is_null) times.push_back(r.fit_millis);
        out.points.push_back({n, median(times)});
    }
    // least-squares slope of log(median time) against log(n)
    if (out.points.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& pt : out.points) {
            const double x = std::log(static_cast<double>(pt.n));
            const double y = std::log(pt.median_fit_millis);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double m = static_cast<double>(out.points.size());
        out.log_log_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    return out;
}

std::string replicates_csv(const std::vector<ReplicateResult>& results) {
    std::ostringstream out;
    out.precision(17);
    out << "replicate_index,seed,scenario,is_null,statistic,fit_millis,"
           "top_region_key,top_effect_size\n";
    for (const auto& r : results)
        out << r.index << ',' << r.seed << ',' << r.scenario << ','
            << (r.is_null ? 1 : 0) << ',' << r.statistic << ',' << r.fit_millis
            << ',' << r.top_region_key << ',' << r.top_effect_size << '\n';
    return out.str();
}

}  // namespace dmmt
