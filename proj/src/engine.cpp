#include "dmmt/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace dmmt {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_sum_exp(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("log_sum_exp of empty set");
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

double log_sum_exp3(double a, double b, double c) {
    const double m = std::max(a, std::max(b, c));
    if (m == kNegInf) return kNegInf;
    return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

PosteriorModel::PosteriorModel(Dataset dataset, PriorSpec prior, FitOptions options)
    : dataset_(std::move(dataset)), prior_(std::move(prior)), options_(options) {
    prior_.validate();
    if (dataset_.n1() + dataset_.n2() == 0)
        throw std::invalid_argument("fit: dataset is empty");
    std::vector<std::uint32_t> idx1(dataset_.n1()), idx2(dataset_.n2());
    for (std::uint32_t i = 0; i < idx1.size(); ++i) idx1[i] = i;
    for (std::uint32_t i = 0; i < idx2.size(); ++i) idx2[i] = i;
    eval(root(dataset_.dims), idx1, idx2);
}

PosteriorModel fit(const Dataset& dataset, const PriorSpec& prior,
                   const FitOptions& options) {
    return PosteriorModel(dataset, prior, options);
}

const NodeEvaluation* PosteriorModel::node(const RegionKey& key) const {
    auto it = memo_.find(key);
    return it == memo_.end() ? nullptr : &it->second;
}

const NodeEvaluation& PosteriorModel::eval(const RegionKey& key,
                                           const std::vector<std::uint32_t>& idx1,
                                           const std::vector<std::uint32_t>& idx2) {
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (memo_.size() >= options_.memo_cap)
        throw std::runtime_error("memo table exceeded cap of " +
                                 std::to_string(options_.memo_cap) + " entries");

    const int p = key.dims();
    const int level = key.level();
    const int cap = prior_.depth_cap;
    const std::uint32_t n1 = static_cast<std::uint32_t>(idx1.size());
    const std::uint32_t n2 = static_cast<std::uint32_t>(idx2.size());
    const std::uint32_t n = n1 + n2;

    NodeEvaluation node;
    node.key = key;
    node.n1 = n1;
    node.n2 = n2;
    node.log_zj_d.assign(static_cast<std::size_t>(p), kNegInf);
    node.log_zj_m.assign(static_cast<std::size_t>(p), kNegInf);

    const double log_uniform_dir = -std::log(static_cast<double>(p));

    if (n == 0) {
        // Empty region: every marginal likelihood is 1.
        node.log_z = {0.0, 0.0, 0.0};
        node.log_phi = {0.0, 0.0, 0.0};
        for (int j = 0; j < p; ++j) {
            node.log_zj_d[j] = log_uniform_dir;
            node.log_zj_m[j] = log_uniform_dir;
        }
    } else if (level >= cap) {
        // Forced stop at the depth cap.
        const double lz = log_baseline_density(level, n);
        node.log_z = {kNegInf, kNegInf, lz};
        node.log_phi = {lz, lz, lz};
    } else if (n == 1) {
        // Singleton region under centering: the predictive density
        // q0(x|A) = 2^level for every state and parent state.
        const double lz = log_baseline_density(level, 1);
        node.log_z = {lz, lz, lz};
        node.log_phi = {lz, lz, lz};
        for (int j = 0; j < p; ++j) {
            node.log_zj_d[j] = log_uniform_dir + lz;
            node.log_zj_m[j] = log_uniform_dir + lz;
        }
    } else {
        for (int j = 1; j <= p; ++j) {
            auto [l1, r1] = partition_points(dataset_.group1, idx1, key, j);
            auto [l2, r2] = partition_points(dataset_.group2, idx2, key, j);
            auto [lkey, rkey] = split(key, j);

            const auto& left = eval(lkey, l1, l2);
            const double phi_l_d = left.log_phi[idx(State::divide)];
            const double phi_l_m = left.log_phi[idx(State::merge)];
            const std::uint32_t nl1 = left.n1, nl2 = left.n2;
            const auto& right = eval(rkey, r1, r2);
            const double phi_r_d = right.log_phi[idx(State::divide)];
            const double phi_r_m = right.log_phi[idx(State::merge)];

            const double log_lambda = std::log(direction_prob(key, j, State::merge, prior_));
            const auto [al, ar] = pseudo_counts(key, j, 1, State::merge, prior_);
            const double log_d0 = log_beta_function(al, ar);

            // merge: one shared Beta-binomial factor on the pooled counts
            const double bb_m =
                log_beta_function(al + static_cast<double>(nl1 + nl2),
                                  ar + static_cast<double>(n - nl1 - nl2)) -
                log_d0;
            node.log_zj_m[j - 1] = log_lambda + bb_m + phi_l_m + phi_r_m;

            // divide: independent Beta-binomial factors per group
            const double bb_d =
                log_beta_function(al + static_cast<double>(nl1),
                                  ar + static_cast<double>(n1 - nl1)) -
                log_d0 +
                log_beta_function(al + static_cast<double>(nl2),
                                  ar + static_cast<double>(n2 - nl2)) -
                log_d0;
            node.log_zj_d[j - 1] = log_lambda + bb_d + phi_l_d + phi_r_d;
        }
        node.log_z[idx(State::divide)] = log_sum_exp(node.log_zj_d);
        node.log_z[idx(State::merge)] = log_sum_exp(node.log_zj_m);
        node.log_z[idx(State::stop)] = log_baseline_density(level, n);

        const auto rho = transition_matrix(level, prior_);
        for (State g : kStates) {
            const auto& row = rho.row(g);
            node.log_phi[idx(g)] = log_sum_exp3(
                row[0] == 0.0 ? kNegInf : std::log(row[0]) + node.log_z[0],
                row[1] == 0.0 ? kNegInf : std::log(row[1]) + node.log_z[1],
                row[2] == 0.0 ? kNegInf : std::log(row[2]) + node.log_z[2]);
        }
        for (double v : node.log_phi)
            if (std::isnan(v)) throw std::runtime_error("NaN in forward recursion");
    }

    auto [it, inserted] = memo_.emplace(key, std::move(node));
    (void)inserted;
    return it->second;
}

std::array<double, 3> PosteriorModel::posterior_transition(const RegionKey& key,
                                                           State g) const {
    if (g == State::stop) return {0.0, 0.0, 1.0};
    const auto rho = transition_matrix(key.level(), prior_);
    const NodeEvaluation* nd = node(key);
    if (!nd) return rho.row(g);  // empty/singleton subtree: posterior == prior
    std::array<double, 3> out{};
    const double lphi = nd->log_phi[idx(g)];
    for (State h : kStates) {
        const double r = rho(g, h);
        out[idx(h)] = r == 0.0 ? 0.0 : r * std::exp(nd->log_z[idx(h)] - lphi);
    }
    return out;
}

std::vector<double> PosteriorModel::posterior_direction(const RegionKey& key,
                                                        State g) const {
    if (g == State::stop)
        throw std::invalid_argument("posterior_direction: no direction in stop state");
    const int p = key.dims();
    const std::vector<double> uniform(static_cast<std::size_t>(p),
                                      1.0 / static_cast<double>(p));
    const NodeEvaluation* nd = node(key);
    if (!nd) return uniform;
    const double lz = nd->log_z[idx(g)];
    if (lz == kNegInf) return uniform;  // capped node, direction is vacuous
    const auto& lzj = g == State::divide ? nd->log_zj_d : nd->log_zj_m;
    std::vector<double> out(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) out[j] = std::exp(lzj[j] - lz);
    return out;
}

double PosteriorModel::posterior_pseudo_count(const RegionKey& key, int group,
                                              State g) const {
    if (g == State::stop)
        throw std::invalid_argument("posterior_pseudo_count: stop state");
    auto [c1, c2] = region_counts(key);
    const double prior_count = 0.5;
    if (g == State::merge) return prior_count + static_cast<double>(c1 + c2);
    return prior_count + static_cast<double>(group == 1 ? c1 : c2);
}

std::pair<std::uint32_t, std::uint32_t>
PosteriorModel::region_counts(const RegionKey& key) const {
    if (const NodeEvaluation* nd = node(key)) return {nd->n1, nd->n2};
    const auto box = bounds(key);
    std::uint32_t c1 = 0, c2 = 0;
    for (const auto& x : dataset_.group1) c1 += contains(box, x);
    for (const auto& x : dataset_.group2) c2 += contains(box, x);
    return {c1, c2};
}

void PosteriorModel::dump_memo(std::ostream& out) const {
    std::vector<const NodeEvaluation*> nodes;
    nodes.reserve(memo_.size());
    for (const auto& [key, nd] : memo_) nodes.push_back(&nd);
    std::sort(nodes.begin(), nodes.end(),
              [](const NodeEvaluation* a, const NodeEvaluation* b) {
                  return to_text(a->key) < to_text(b->key);
              });
    for (const NodeEvaluation* nd : nodes) {
        out << to_text(nd->key) << ' ' << nd->n1 << ' ' << nd->n2;
        for (double v : nd->log_z) out << ' ' << v;
        for (double v : nd->log_phi) out << ' ' << v;
        out << '\n';
    }
}

}  // namespace dmmt
