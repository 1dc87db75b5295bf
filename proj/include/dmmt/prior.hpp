#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>

#include "dmmt/region.hpp"

namespace dmmt {

enum class State : int { divide = 0, merge = 1, stop = 2 };
inline constexpr std::array<State, 3> kStates{State::divide, State::merge,
                                              State::stop};
inline int idx(State g) { return static_cast<int>(g); }

// Row-stochastic 3x3 matrix indexed (from-state, to-state). The stop row
// is always (0,0,1): stop is absorbing.
struct TransitionMatrix {
    std::array<std::array<double, 3>, 3> p{};

    double operator()(State from, State to) const { return p[idx(from)][idx(to)]; }
    const std::array<double, 3>& row(State from) const { return p[idx(from)]; }
};

// Prior parameters. Defaults follow the recommended choices: beta=0.3,
// gamma=0.2, initial state probabilities (1,0,0), depth cap 12 and
// representative-tree stop threshold 0.8.
struct PriorSpec {
    double beta = 0.3;                       // divide self-persistence
    double gamma = 0.2;                      // merge -> divide scale
    std::array<double, 3> rho0{1.0, 0.0, 0.0};  // initial (d, m, s)
    int depth_cap = 12;                      // forced stop level K
    double delta_star = 0.8;                 // representative-tree threshold

    void validate() const;
};

// Level-dependent transition matrix. For k < depth_cap the divide row is
// [beta, (1-beta)/2, (1-beta)/2], the merge row [gamma*2^-k,
// (1-gamma*2^-k)/2, (1-gamma*2^-k)/2]; at and beyond the cap every row is
// (0,0,1).
TransitionMatrix transition_matrix(int level, const PriorSpec& spec);

// Direction probabilities lambda_j(A,g): uniform 1/p over the axes for
// both non-stop states. Rejects g = stop.
double direction_prob(const RegionKey& key, int j, State g, const PriorSpec& spec);

// Centered pseudo-counts under the uniform baseline with midpoint cuts:
// (1/2, 1/2) for every node, direction, group and non-stop state.
std::pair<double, double> pseudo_counts(const RegionKey& key, int j, int group,
                                        State g, const PriorSpec& spec);

// log of prod q0(x|A) = 2^(level * n_points) under the uniform baseline.
double log_baseline_density(const RegionKey& key, std::size_t n_points);
double log_baseline_density(int level, std::size_t n_points);

// log D(w1, w2) = log Gamma(w1) + log Gamma(w2) - log Gamma(w1 + w2).
double log_beta_function(double w1, double w2);

// Flat key=value config: beta, gamma, rho0_d, rho0_m, rho0_s, depth_cap,
// delta_star. Missing keys keep their defaults.
PriorSpec parse_prior_config(std::istream& in);
PriorSpec load_prior_config(const std::string& path);

}  // namespace dmmt
