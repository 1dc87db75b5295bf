#include "dmmt/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmmt/rng.hpp"

namespace dmmt {

namespace {

// Level-indexed closed forms of Psi on data-free subtrees. On empty and
// singleton subtrees the posterior equals the prior, so Psi depends only
// on the level and on whether a lone observation is present.
struct PsiTables {
    std::vector<std::array<double, 3>> empty;      // Psi(level, g), no data below
    std::vector<std::array<double, 3>> singleton;  // Psi(level, g), one point below

    PsiTables(const PriorSpec& prior) {
        const int cap = prior.depth_cap;
        empty.assign(cap + 1, {1.0, 1.0, 1.0});
        singleton.assign(cap + 1, {1.0, 1.0, 1.0});
        for (int k = cap - 1; k >= 0; --k) {
            const auto rho = transition_matrix(k, prior);
            const double em = empty[k + 1][idx(State::merge)];
            const double sm = singleton[k + 1][idx(State::merge)];
            for (State g : kStates) {
                empty[k][idx(g)] = rho(g, State::stop) + rho(g, State::merge) * em * em;
                // one child holds the point, the other is empty, any direction
                singleton[k][idx(g)] =
                    rho(g, State::stop) + rho(g, State::merge) * sm * em;
            }
        }
    }
};

class PsiEvaluator {
  public:
    explicit PsiEvaluator(const PosteriorModel& model)
        : model_(model), tables_(model.prior()) {}

    double operator()(const RegionKey& key, State g) {
        if (g == State::stop) return 1.0;
        const int level = key.level();
        const int cap = model_.prior().depth_cap;
        if (level >= cap) return 1.0;
        const NodeEvaluation* nd = model_.node(key);
        if (!nd || nd->n() == 0) return tables_.empty[level][idx(g)];
        if (nd->n() == 1) return tables_.singleton[level][idx(g)];

        const auto row = model_.posterior_transition(key, g);
        return row[idx(State::stop)] + row[idx(State::merge)] * merge_descent(key);
    }

  private:
    // sum_j lambda_j(A,m|x) * Psi(A_l^j,m) * Psi(A_r^j,m); independent of
    // the parent state, so cached per region.
    double merge_descent(const RegionKey& key) {
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        const auto lambda = model_.posterior_direction(key, State::merge);
        double total = 0.0;
        for (int j = 1; j <= key.dims(); ++j) {
            const auto [lkey, rkey] = split(key, j);
            total += lambda[j - 1] * (*this)(lkey, State::merge) *
                     (*this)(rkey, State::merge);
        }
        cache_.emplace(key, total);
        return total;
    }

    const PosteriorModel& model_;
    PsiTables tables_;
    std::unordered_map<RegionKey, double, RegionKeyHash> cache_;
};

int pick_category(double u, const double* probs, int n) {
    double acc = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return n - 1;
}

}  // namespace

double psi(const PosteriorModel& model, const RegionKey& key, State g) {
    PsiEvaluator eval(model);
    return eval(key, g);
}

double prob_null(const PosteriorModel& model) {
    PsiEvaluator eval(model);
    const RegionKey omega = root(model.dataset().dims);
    const auto& rho0 = model.prior().rho0;
    double total = 0.0;
    for (State g : kStates)
        if (rho0[idx(g)] > 0.0) total += rho0[idx(g)] * eval(omega, g);
    return total;
}

double prior_prob_null(const PriorSpec& prior) {
    prior.validate();
    const PsiTables tables(prior);
    double total = 0.0;
    for (State g : kStates)
        total += prior.rho0[idx(g)] * tables.empty[0][idx(g)];
    return total;
}

namespace {

std::unique_ptr<SampledStateTree::Node> sample_node(const PosteriorModel& model,
                                                    const RegionKey& key,
                                                    State parent, Rng& rng,
                                                    bool& ever_divided,
                                                    int& depth) {
    auto node = std::make_unique<SampledStateTree::Node>();
    node->key = key;
    const auto row = model.posterior_transition(key, parent);
    node->state = kStates[pick_category(rng.uniform(), row.data(), 3)];
    depth = std::max(depth, key.level());
    if (node->state == State::stop) return node;
    if (node->state == State::divide) ever_divided = true;

    const auto lambda = model.posterior_direction(key, node->state);
    const int j =
        pick_category(rng.uniform(), lambda.data(), static_cast<int>(lambda.size())) + 1;
    node->direction = j;
    const auto [lkey, rkey] = split(key, j);
    node->left = sample_node(model, lkey, node->state, rng, ever_divided, depth);
    node->right = sample_node(model, rkey, node->state, rng, ever_divided, depth);
    return node;
}

}  // namespace

SampledStateTree sample_state_tree(const PosteriorModel& model, Rng& rng) {
    SampledStateTree tree;
    const auto& rho0 = model.prior().rho0;
    const State parent = kStates[pick_category(rng.uniform(), rho0.data(), 3)];
    tree.root = sample_node(model, root(model.dataset().dims), parent, rng,
                            tree.ever_divided, tree.depth);
    return tree;
}

std::array<double, 3> rho_star(const PosteriorModel& model,
                               const std::vector<RegionKey>& path) {
    if (path.empty()) throw std::invalid_argument("rho_star: empty path");
    std::array<double, 3> v = model.prior().rho0;
    for (const RegionKey& key : path) {
        std::array<double, 3> w{};
        for (State h : kStates) {
            if (v[idx(h)] == 0.0) continue;
            const auto row = model.posterior_transition(key, h);
            for (int g = 0; g < 3; ++g) w[g] += v[idx(h)] * row[g];
        }
        v = w;
    }
    return v;
}

std::vector<double> lambda_star(const PosteriorModel& model, const RegionKey& key,
                                const std::array<double, 3>& rho_star_at_key) {
    const double mass =
        rho_star_at_key[idx(State::divide)] + rho_star_at_key[idx(State::merge)];
    if (mass <= 0.0)
        throw std::invalid_argument("lambda_star: node is fully stopped");
    const auto ld = model.posterior_direction(key, State::divide);
    const auto lm = model.posterior_direction(key, State::merge);
    std::vector<double> out(ld.size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = (rho_star_at_key[idx(State::divide)] * ld[j] +
                  rho_star_at_key[idx(State::merge)] * lm[j]) /
                 mass;
    return out;
}

double effect_size(const PosteriorModel& model, const RegionKey& key) {
    double best = 0.0;
    for (int j = 1; j <= key.dims(); ++j) {
        const auto [lkey, rkey] = split(key, j);
        const auto [l1, l2] = model.region_counts(lkey);
        const auto [r1, r2] = model.region_counts(rkey);
        const double odds1 = (0.5 + l1) / (0.5 + r1);
        const double odds2 = (0.5 + l2) / (0.5 + r2);
        best = std::max(best, std::abs(std::log(odds1 / odds2)));
    }
    return best;
}

namespace {

std::unique_ptr<RepTreeNode> build_rep_node(const PosteriorModel& model,
                                            const RegionKey& key,
                                            const std::array<double, 3>& parent_rho,
                                            double delta_star) {
    auto node = std::make_unique<RepTreeNode>();
    node->key = key;

    std::array<double, 3>& rs = node->rho_star;
    rs = {};
    for (State h : kStates) {
        if (parent_rho[idx(h)] == 0.0) continue;
        const auto row = model.posterior_transition(key, h);
        for (int g = 0; g < 3; ++g) rs[g] += parent_rho[idx(h)] * row[g];
    }
    std::tie(node->n1, node->n2) = model.region_counts(key);
    node->effect_size = effect_size(model, key);

    const int cap = model.prior().depth_cap;
    node->stopped =
        rs[idx(State::stop)] > 1.0 - delta_star || key.level() >= cap;
    if (node->stopped) return node;

    node->lambda_star = lambda_star(model, key, rs);
    int best_j = 1;
    for (int j = 2; j <= key.dims(); ++j)
        if (node->lambda_star[j - 1] > node->lambda_star[best_j - 1]) best_j = j;
    node->chosen_direction = best_j;

    const auto [lkey, rkey] = split(key, best_j);
    node->left = build_rep_node(model, lkey, rs, delta_star);
    node->right = build_rep_node(model, rkey, rs, delta_star);
    return node;
}

}  // namespace

RepTree representative_tree(const PosteriorModel& model, double delta_star) {
    if (!(delta_star > 0.0 && delta_star < 1.0))
        throw std::invalid_argument("delta_star must be in (0,1)");
    RepTree tree;
    tree.delta_star = delta_star;
    tree.root = build_rep_node(model, root(model.dataset().dims),
                               model.prior().rho0, delta_star);
    return tree;
}

RepTree representative_tree(const PosteriorModel& model) {
    return representative_tree(model, model.prior().delta_star);
}

namespace {

nlohmann::json rep_node_to_json(const RepTreeNode& node) {
    nlohmann::json j;
    j["key"] = to_text(node.key);
    j["level"] = node.key.level();
    auto box = bounds(node.key);
    nlohmann::json jb = nlohmann::json::array();
    for (const auto& iv : box) jb.push_back({iv.lo, iv.hi});
    j["bounds"] = jb;
    j["rho_star"] = node.rho_star;
    j["lambda_star"] = node.lambda_star;
    if (node.chosen_direction)
        j["chosen_direction"] = *node.chosen_direction;
    else
        j["chosen_direction"] = nullptr;
    j["stopped"] = node.stopped;
    j["effect_size"] = node.effect_size;
    j["n1"] = node.n1;
    j["n2"] = node.n2;
    j["children"] = nlohmann::json::array();
    if (node.left) {
        j["children"].push_back(rep_node_to_json(*node.left));
        j["children"].push_back(rep_node_to_json(*node.right));
    }
    return j;
}

void collect_regions(const RepTreeNode& node, const PosteriorModel& model,
                     double threshold, std::vector<RegionReport>& out) {
    if (node.rho_star[idx(State::divide)] > threshold) {
        RegionReport r;
        r.key = node.key;
        r.level = node.key.level();
        r.rho_star_d = node.rho_star[idx(State::divide)];
        r.effect = node.effect_size;
        const auto n1 = model.dataset().n1();
        const auto n2 = model.dataset().n2();
        r.frac_group1 = n1 ? static_cast<double>(node.n1) / n1 : 0.0;
        r.frac_group2 = n2 ? static_cast<double>(node.n2) / n2 : 0.0;
        out.push_back(std::move(r));
    }
    if (node.left) {
        collect_regions(*node.left, model, threshold, out);
        collect_regions(*node.right, model, threshold, out);
    }
}

}  // namespace

nlohmann::json rep_tree_to_json(const RepTree& tree, const PosteriorModel& model) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["delta_star"] = tree.delta_star;
    j["depth_cap"] = model.prior().depth_cap;
    j["dims"] = model.dataset().dims;
    j["root"] = rep_node_to_json(*tree.root);
    return j;
}

std::vector<RegionReport> divergent_regions(const RepTree& tree,
                                            const PosteriorModel& model,
                                            double threshold) {
    std::vector<RegionReport> out;
    collect_regions(*tree.root, model, threshold, out);
    std::stable_sort(out.begin(), out.end(),
                     [](const RegionReport& a, const RegionReport& b) {
                         return a.effect > b.effect;
                     });
    return out;
}

}  // namespace dmmt
