#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmmt/csv.hpp"
#include "dmmt/engine.hpp"
#include "dmmt/inference.hpp"
#include "dmmt/prior.hpp"
#include "dmmt/simulate.hpp"

namespace {

using nlohmann::json;

struct CommonOpts {
    std::string input_a, input_b, input, group_col;
    std::string config_path;
    std::string out_dir = ".";
    double beta = -1.0, gamma = -1.0, delta_star = -1.0;
    int depth_cap = -1;
};

void add_prior_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "prior config file (key=value)");
    cmd->add_option("--beta", o.beta, "divide self-persistence, overrides config");
    cmd->add_option("--gamma", o.gamma, "merge-to-divide scale, overrides config");
    cmd->add_option("--depth-cap", o.depth_cap, "forced stop level K");
    cmd->add_option("--delta-star", o.delta_star, "representative-tree threshold");
    cmd->add_option("--out", o.out_dir, "output directory");
}

void add_input_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--input-a", o.input_a, "CSV with group 1 points");
    cmd->add_option("--input-b", o.input_b, "CSV with group 2 points");
    cmd->add_option("--input", o.input, "single CSV with a group column");
    cmd->add_option("--group-col", o.group_col, "group column name for --input");
}

dmmt::PriorSpec resolve_prior(const CommonOpts& o) {
    dmmt::PriorSpec prior;
    if (!o.config_path.empty()) prior = dmmt::load_prior_config(o.config_path);
    if (o.beta >= 0.0) prior.beta = o.beta;
    if (o.gamma >= 0.0) prior.gamma = o.gamma;
    if (o.depth_cap >= 0) prior.depth_cap = o.depth_cap;
    if (o.delta_star >= 0.0) prior.delta_star = o.delta_star;
    prior.validate();
    return prior;
}

dmmt::Dataset load_dataset(const CommonOpts& o) {
    const bool two_files = !o.input_a.empty() || !o.input_b.empty();
    const bool grouped = !o.input.empty() || !o.group_col.empty();
    if (two_files == grouped)
        throw CLI::ValidationError(
            "inputs", "use either --input-a/--input-b or --input with --group-col");
    if (two_files) {
        if (o.input_a.empty() || o.input_b.empty())
            throw CLI::ValidationError("inputs", "both --input-a and --input-b required");
        auto a = dmmt::csv_to_points(dmmt::read_csv(o.input_a), o.input_a);
        auto b = dmmt::csv_to_points(dmmt::read_csv(o.input_b), o.input_b);
        if (!a.empty() && !b.empty() && a[0].size() != b[0].size())
            throw dmmt::DataError("dimension mismatch between input files");
        try {
            return dmmt::rescale(a, b);
        } catch (const std::invalid_argument& e) {
            throw dmmt::DataError(e.what());
        }
    }
    if (o.input.empty() || o.group_col.empty())
        throw CLI::ValidationError("inputs", "--input requires --group-col");
    auto [a, b] = dmmt::csv_to_grouped_points(dmmt::read_csv(o.input), o.group_col,
                                              o.input);
    try {
        return dmmt::rescale(a, b);
    } catch (const std::invalid_argument& e) {
        throw dmmt::DataError(e.what());
    }
}

json prior_to_json(const dmmt::PriorSpec& p) {
    return json{{"beta", p.beta},
                {"gamma", p.gamma},
                {"rho0", p.rho0},
                {"depth_cap", p.depth_cap},
                {"delta_star", p.delta_star}};
}

json ranges_to_json(const dmmt::Dataset& ds) {
    json out = json::array();
    for (const auto& r : ds.ranges) out.push_back({r.lo, r.hi});
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string format_bounds(const dmmt::RegionKey& key) {
    std::ostringstream out;
    out.precision(17);
    const auto box = dmmt::bounds(key);
    for (std::size_t d = 0; d < box.size(); ++d) {
        if (d) out << 'x';
        out << '[' << box[d].lo << ',' << box[d].hi << ')';
    }
    return out.str();
}

int cmd_test(const CommonOpts& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const dmmt::PriorSpec prior = resolve_prior(o);
    const dmmt::Dataset ds = load_dataset(o);
    const dmmt::PosteriorModel model = dmmt::fit(ds, prior);
    const double p0 = dmmt::prob_null(model);
    const auto t1 = std::chrono::steady_clock::now();

    json result;
    result["schema_version"] = 1;
    result["prob_null"] = p0;
    result["log_odds"] = std::log(p0 / (1.0 - p0));
    result["statistic"] = 1.0 - p0;
    result["n1"] = ds.n1();
    result["n2"] = ds.n2();
    result["p"] = ds.dims;
    result["prior"] = prior_to_json(prior);
    result["rescale_ranges"] = ranges_to_json(ds);

    std::filesystem::create_directories(o.out_dir);
    write_file(std::filesystem::path(o.out_dir) / "result.json", result.dump(2) + "\n");
    // timing lives in a separate metadata file so result.json is reproducible
    json meta;
    meta["wall_ms"] = std::chrono::duration<double, std::milli>(t1 - t0).count();
    write_file(std::filesystem::path(o.out_dir) / "meta.json", meta.dump(2) + "\n");
    std::cout << "prob_null " << p0 << "\n";
    return 0;
}

int cmd_summarize(const CommonOpts& o) {
    const dmmt::PriorSpec prior = resolve_prior(o);
    const dmmt::Dataset ds = load_dataset(o);
    const dmmt::PosteriorModel model = dmmt::fit(ds, prior);
    const dmmt::RepTree tree = dmmt::representative_tree(model, prior.delta_star);

    json doc = dmmt::rep_tree_to_json(tree, model);
    doc["rescale_ranges"] = ranges_to_json(ds);
    std::filesystem::create_directories(o.out_dir);
    write_file(std::filesystem::path(o.out_dir) / "tree.json", doc.dump(2) + "\n");

    const auto regions = dmmt::divergent_regions(tree, model, prior.delta_star);
    std::ostringstream csv;
    csv.precision(17);
    csv << "key,level,bounds,rho_star_d,effect_size,frac_group1,frac_group2\n";
    for (const auto& r : regions)
        csv << dmmt::to_text(r.key) << ',' << r.level << ",\"" << format_bounds(r.key)
            << "\"," << r.rho_star_d << ',' << r.effect << ',' << r.frac_group1
            << ',' << r.frac_group2 << '\n';
    write_file(std::filesystem::path(o.out_dir) / "regions.csv", csv.str());
    std::cout << regions.size() << " region(s) with rho*_d > " << prior.delta_star
              << "\n";
    return 0;
}

struct SimOpts {
    std::string scenario;
    int replicates = 200;
    std::uint64_t seed = 1;
};

int cmd_simulate(const CommonOpts& o, const SimOpts& s) {
    const dmmt::PriorSpec prior = resolve_prior(o);
    const dmmt::Scenario scenario = dmmt::scenario_by_id(s.scenario);
    const auto results =
        dmmt::run_replicates(scenario, s.replicates, prior, s.seed);

    std::vector<double> null_stats, alt_stats;
    for (const auto& r : results)
        (r.is_null ? null_stats : alt_stats).push_back(r.statistic);

    json summary;
    summary["schema_version"] = 1;
    summary["scenario"] = s.scenario;
    summary["replicates"] = s.replicates;
    summary["seed"] = s.seed;
    summary["prior"] = prior_to_json(prior);
    summary["auc"] = dmmt::roc_auc(null_stats, alt_stats);
    auto to_prob = [](std::vector<double> v) {
        for (double& x : v) x = 1.0 - x;
        return dmmt::median(v);
    };
    summary["median_prob_null_alt"] = to_prob(alt_stats);
    summary["median_prob_null_null"] = to_prob(null_stats);

    std::filesystem::create_directories(o.out_dir);
    write_file(std::filesystem::path(o.out_dir) / "replicates.csv",
               dmmt::replicates_csv(results));
    write_file(std::filesystem::path(o.out_dir) / "summary.json",
               summary.dump(2) + "\n");
    std::cout << "auc " << summary["auc"] << "\n";
    return 0;
}

int cmd_bench(const CommonOpts& o, const SimOpts& s, std::vector<int> sizes) {
    const dmmt::PriorSpec prior = resolve_prior(o);
    const dmmt::Scenario scenario = dmmt::scenario_by_id(s.scenario);
    const auto result = dmmt::bench(scenario, sizes, s.replicates, prior, s.seed);

    std::ostringstream csv;
    csv.precision(17);
    csv << "n,median_fit_millis\n";
    for (const auto& pt : result.points)
        csv << pt.n << ',' << pt.median_fit_millis << '\n';
    json summary;
    summary["schema_version"] = 1;
    summary["scenario"] = s.scenario;
    summary["log_log_slope"] = result.log_log_slope;
    std::filesystem::create_directories(o.out_dir);
    write_file(std::filesystem::path(o.out_dir) / "bench.csv", csv.str());
    write_file(std::filesystem::path(o.out_dir) / "bench_summary.json",
               summary.dump(2) + "\n");
    std::cout << "log_log_slope " << result.log_log_slope << "\n";
    return 0;
}

int cmd_sweep(const CommonOpts& o, const SimOpts& s, const std::vector<double>& betas,
              const std::vector<double>& gammas) {
    const dmmt::PriorSpec prior = resolve_prior(o);
    const dmmt::Scenario scenario = dmmt::scenario_by_id(s.scenario);
    const auto table =
        dmmt::sensitivity_sweep(scenario, betas, gammas, s.replicates, prior, s.seed);
    std::ostringstream csv;
    csv.precision(17);
    csv << "beta,gamma,median_prob_null_null,median_prob_null_alt\n";
    for (const auto& cell : table)
        csv << cell.beta << ',' << cell.gamma << ',' << cell.median_null << ','
            << cell.median_alt << '\n';
    std::filesystem::create_directories(o.out_dir);
    write_file(std::filesystem::path(o.out_dir) / "sweep.csv", csv.str());
    std::cout << table.size() << " sweep cells\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian nonparametric two-sample comparison (divide-merge Markov tree)"};
    app.require_subcommand(1);

    CommonOpts test_o, summ_o, sim_o, bench_o, sweep_o;
    SimOpts sim_s, bench_s, sweep_s;
    std::vector<int> bench_sizes{200, 400, 800, 1600};
    std::vector<double> sweep_betas{0.2, 0.3, 0.4};
    std::vector<double> sweep_gammas{0.1, 0.2, 0.4};

    auto* test = app.add_subcommand("test", "two-sample test on CSV input");
    add_input_flags(test, test_o);
    add_prior_flags(test, test_o);

    auto* summ = app.add_subcommand("summarize",
                                    "representative tree and differential regions");
    add_input_flags(summ, summ_o);
    add_prior_flags(summ, summ_o);

    auto* sim = app.add_subcommand("simulate", "replicate study on a scenario");
    add_prior_flags(sim, sim_o);
    sim->add_option("--scenario", sim_s.scenario, "scenario id")->required();
    sim->add_option("--replicates", sim_s.replicates, "replicate count");
    sim->add_option("--seed", sim_s.seed, "base seed");

    auto* bn = app.add_subcommand("bench", "runtime scaling benchmark");
    add_prior_flags(bn, bench_o);
    bn->add_option("--scenario", bench_s.scenario, "scenario id")->required();
    bn->add_option("--replicates", bench_s.replicates, "replicates per size");
    bn->add_option("--seed", bench_s.seed, "base seed");
    bn->add_option("--sizes", bench_sizes, "per-group sample sizes");

    auto* sw = app.add_subcommand("sweep", "prior sensitivity sweep");
    add_prior_flags(sw, sweep_o);
    sw->add_option("--scenario", sweep_s.scenario, "scenario id")->required();
    sw->add_option("--replicates", sweep_s.replicates, "replicates per cell");
    sw->add_option("--seed", sweep_s.seed, "base seed");
    sw->add_option("--betas", sweep_betas, "beta grid");
    sw->add_option("--gammas", sweep_gammas, "gamma grid");

    bench_s.replicates = 5;
    sweep_s.replicates = 20;

    try {
        app.parse(argc, argv);
        if (test->parsed()) return cmd_test(test_o);
        if (summ->parsed()) return cmd_summarize(summ_o);
        if (sim->parsed()) return cmd_simulate(sim_o, sim_s);
        if (bn->parsed()) return cmd_bench(bench_o, bench_s, bench_sizes);
        if (sw->parsed()) return cmd_sweep(sweep_o, sweep_s, sweep_betas, sweep_gammas);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const dmmt::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
