#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dmmt/engine.hpp"

#include "json.hpp"

namespace dmmt {

class Rng;  // simulate.hpp

// Posterior probability that both distributions agree on the subtree
// rooted at key, given parent state g. Exact: the recursion terminates at
// the depth cap and uses closed forms on empty and singleton subtrees.
double psi(const PosteriorModel& model, const RegionKey& key, State g);

// Pr(H0 | data) = sum_g rho0_g * Psi(root, g).
double prob_null(const PosteriorModel& model);

// Prior marginal null probability: the same Psi recursion evaluated with
// no data, i.e. Pr(H0) before observing anything.
double prior_prob_null(const PriorSpec& prior);

// One posterior draw of the state tree (states and directions only).
struct SampledStateTree {
    struct Node {
        RegionKey key;
        State state;
        std::optional<int> direction;  // 1-based, set for non-stop states
        std::unique_ptr<Node> left, right;
    };
    std::unique_ptr<Node> root;
    bool ever_divided = false;
    int depth = 0;
};

SampledStateTree sample_state_tree(const PosteriorModel& model, Rng& rng);

// Branch-marginal state probabilities along a root-to-node path. The path
// lists the keys from the root down to the node of interest, inclusive.
std::array<double, 3> rho_star(const PosteriorModel& model,
                               const std::vector<RegionKey>& path);

// State-weighted direction probabilities, renormalized over the non-stop
// mass. Rejects nodes whose non-stop mass is zero.
std::vector<double> lambda_star(const PosteriorModel& model, const RegionKey& key,
                                const std::array<double, 3>& rho_star_at_key);

// Eq.-style effect size: max over directions of the absolute log
// odds-ratio of posterior left/right mass between the two groups.
double effect_size(const PosteriorModel& model, const RegionKey& key);

struct RepTreeNode {
    RegionKey key;
    std::array<double, 3> rho_star{};
    std::vector<double> lambda_star;
    std::optional<int> chosen_direction;  // 1-based
    bool stopped = false;
    double effect_size = 0.0;
    std::uint32_t n1 = 0;
    std::uint32_t n2 = 0;
    std::unique_ptr<RepTreeNode> left, right;
};

struct RepTree {
    std::unique_ptr<RepTreeNode> root;
    double delta_star = 0.0;
};

// Top-down summary tree: a branch stops when rho*_s > 1 - delta_star or
// at the depth cap; otherwise it splits along argmax_j lambda*_j (ties to
// the smallest j).
RepTree representative_tree(const PosteriorModel& model, double delta_star);
RepTree representative_tree(const PosteriorModel& model);  // prior delta_star

// Versioned nested-record document, the input contract for external
// plotting tools.
nlohmann::json rep_tree_to_json(const RepTree& tree, const PosteriorModel& model);

// Flat listing of rep-tree nodes with rho*_d above the threshold, sorted
// by effect size descending.
struct RegionReport {
    RegionKey key;
    int level = 0;
    double rho_star_d = 0.0;
    double effect = 0.0;
    double frac_group1 = 0.0;
    double frac_group2 = 0.0;
};
std::vector<RegionReport> divergent_regions(const RepTree& tree,
                                            const PosteriorModel& model,
                                            double threshold);

}  // namespace dmmt
