#pragma once

// Brute-force reference computations, independent of the forward
// recursion in the library: every state/direction configuration of the
// finite partition tree is enumerated explicitly in linear probability
// space, with Beta functions computed directly from tgamma.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "dmmt/prior.hpp"
#include "dmmt/region.hpp"

namespace oracle {

using Points = std::vector<std::vector<double>>;

struct Config {
    double prior = 1.0;   // product of transition and direction probabilities
    double lik = 1.0;     // Beta-binomial factors and stop densities
    bool has_divide = false;
};

inline double beta_fn(double a, double b) {
    return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
}

inline Points points_in(const Points& pts, const std::vector<dmmt::Interval>& box) {
    Points out;
    for (const auto& x : pts)
        if (dmmt::contains(box, x)) out.push_back(x);
    return out;
}

// All configurations of the subtree rooted at key, given that the node
// itself is in state s. Nodes at the depth cap are forced to stop.
inline std::vector<Config> enumerate_configs(const dmmt::RegionKey& key,
                                             const Points& pts1, const Points& pts2,
                                             dmmt::State s,
                                             const dmmt::PriorSpec& prior) {
    using dmmt::State;
    const int level = key.level();
    const int p = key.dims();
    const double n = static_cast<double>(pts1.size() + pts2.size());

    if (s == State::stop)
        return {Config{1.0, std::pow(2.0, level * n), false}};

    std::vector<Config> out;
    const auto child_rho = dmmt::transition_matrix(level + 1, prior);
    for (int j = 1; j <= p; ++j) {
        const auto [lkey, rkey] = dmmt::split(key, j);
        const auto lbox = dmmt::bounds(lkey);
        const Points l1 = points_in(pts1, lbox), l2 = points_in(pts2, lbox);
        Points r1, r2;
        for (const auto& x : pts1)
            if (!dmmt::contains(lbox, x)) r1.push_back(x);
        for (const auto& x : pts2)
            if (!dmmt::contains(lbox, x)) r2.push_back(x);

        const double d0 = beta_fn(0.5, 0.5);
        double bb;
        if (s == State::merge) {
            bb = beta_fn(0.5 + l1.size() + l2.size(), 0.5 + r1.size() + r2.size()) / d0;
        } else {
            bb = beta_fn(0.5 + l1.size(), 0.5 + r1.size()) / d0 *
                 beta_fn(0.5 + l2.size(), 0.5 + r2.size()) / d0;
        }
        const double lambda = 1.0 / static_cast<double>(p);

        for (State sl : dmmt::kStates) {
            const double pl = child_rho(s, sl);
            if (pl == 0.0) continue;
            const auto lconfigs = enumerate_configs(lkey, l1, l2, sl, prior);
            for (State sr : dmmt::kStates) {
                const double pr = child_rho(s, sr);
                if (pr == 0.0) continue;
                const auto rconfigs = enumerate_configs(rkey, r1, r2, sr, prior);
                for (const Config& lc : lconfigs)
                    for (const Config& rc : rconfigs)
                        out.push_back(Config{
                            lambda * pl * pr * lc.prior * rc.prior,
                            bb * lc.lik * rc.lik,
                            s == State::divide || lc.has_divide || rc.has_divide});
            }
        }
    }
    return out;
}

// Phi(A, g): conditional marginal likelihood given the parent state g.
inline double phi(const dmmt::RegionKey& key, const Points& pts1, const Points& pts2,
                  dmmt::State g, const dmmt::PriorSpec& prior) {
    const auto rho = dmmt::transition_matrix(key.level(), prior);
    double total = 0.0;
    for (dmmt::State s : dmmt::kStates) {
        const double w = rho(g, s);
        if (w == 0.0) continue;
        for (const Config& c : enumerate_configs(key, pts1, pts2, s, prior))
            total += w * c.prior * c.lik;
    }
    return total;
}

// Pr(H0 | data): posterior mass of configurations that never divide.
inline double prob_null(int dims, const Points& pts1, const Points& pts2,
                        const dmmt::PriorSpec& prior) {
    const dmmt::RegionKey omega = dmmt::root(dims);
    const auto rho = dmmt::transition_matrix(0, prior);
    double total = 0.0, never = 0.0;
    for (dmmt::State g : dmmt::kStates) {
        const double w0 = prior.rho0[dmmt::idx(g)];
        if (w0 == 0.0) continue;
        for (dmmt::State s : dmmt::kStates) {
            const double w = w0 * rho(g, s);
            if (w == 0.0) continue;
            for (const Config& c : enumerate_configs(omega, pts1, pts2, s, prior)) {
                const double mass = w * c.prior * c.lik;
                total += mass;
                if (!c.has_divide) never += mass;
            }
        }
    }
    return never / total;
}

// Prior probability of never dividing, enumerated explicitly down to
// cutoff_level and extended below it by the level-indexed table of
// never-divide probabilities on data-free subtrees.
inline double prior_prob_null_enumerated(const dmmt::PriorSpec& prior,
                                         int cutoff_level) {
    using dmmt::State;
    const int cap = prior.depth_cap;
    // table[k][g] = P(subtree at level k never divides | parent state g)
    std::vector<std::array<double, 3>> table(cap + 1, {1.0, 1.0, 1.0});
    for (int k = cap - 1; k >= 0; --k) {
        const auto rho = dmmt::transition_matrix(k, prior);
        const double cm = table[k + 1][dmmt::idx(State::merge)];
        for (State g : dmmt::kStates)
            table[k][dmmt::idx(g)] =
                rho(g, State::stop) + rho(g, State::merge) * cm * cm;
    }

    // explicit enumeration of the node states above the cutoff
    std::function<double(int, State)> never = [&](int level, State g) -> double {
        if (level >= cutoff_level || level >= cap) return table[level][dmmt::idx(g)];
        const auto rho = dmmt::transition_matrix(level, prior);
        double total = 0.0;
        for (State s : dmmt::kStates) {
            if (s == State::divide) continue;  // node itself divides
            const double w = rho(g, s);
            if (w == 0.0) continue;
            if (s == State::stop)
                total += w;
            else
                total += w * never(level + 1, State::merge) *
                         never(level + 1, State::merge);
        }
        return total;
    };

    double out = 0.0;
    for (State g : dmmt::kStates)
        out += prior.rho0[dmmt::idx(g)] * never(0, g);
    return out;
}

}  // namespace oracle
