#include "dmmt/prior.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dmmt {

void PriorSpec::validate() const {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("beta must be in (0,1)");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("gamma must be in (0,1)");
    double s = 0.0;
    for (double r : rho0) {
        if (r < 0.0 || r > 1.0)
            throw std::invalid_argument("rho0 entries must be in [0,1]");
        s += r;
    }
    if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("rho0 must sum to 1");
    if (depth_cap < 1) throw std::invalid_argument("depth_cap must be >= 1");
    if (!(delta_star > 0.0 && delta_star < 1.0))
        throw std::invalid_argument("delta_star must be in (0,1)");
}

TransitionMatrix transition_matrix(int level, const PriorSpec& spec) {
    TransitionMatrix m;
    if (level >= spec.depth_cap) {
        for (auto& row : m.p) row = {0.0, 0.0, 1.0};
        return m;
    }
    const double b = spec.beta;
    const double g = spec.gamma * std::exp2(-static_cast<double>(level));
    m.p[idx(State::divide)] = {b, (1.0 - b) / 2.0, (1.0 - b) / 2.0};
    m.p[idx(State::merge)] = {g, (1.0 - g) / 2.0, (1.0 - g) / 2.0};
    m.p[idx(State::stop)] = {0.0, 0.0, 1.0};
    return m;
}

double direction_prob(const RegionKey& key, int j, State g, const PriorSpec&) {
    if (g == State::stop)
        throw std::invalid_argument("direction_prob: no direction in stop state");
    if (j < 1 || j > key.dims())
        throw std::out_of_range("direction_prob: direction out of range");
    return 1.0 / static_cast<double>(key.dims());
}

std::pair<double, double> pseudo_counts(const RegionKey&, int, int, State g,
                                        const PriorSpec&) {
    if (g == State::stop)
        throw std::invalid_argument("pseudo_counts: no split in stop state");
    return {0.5, 0.5};
}

double log_baseline_density(int level, std::size_t n_points) {
    return static_cast<double>(level) * static_cast<double>(n_points) * M_LN2;
}

double log_baseline_density(const RegionKey& key, std::size_t n_points) {
    return log_baseline_density(key.level(), n_points);
}

double log_beta_function(double w1, double w2) {
    if (!(w1 > 0.0) || !(w2 > 0.0))
        throw std::domain_error("log_beta_function: arguments must be positive");
    return std::lgamma(w1) + std::lgamma(w2) - std::lgamma(w1 + w2);
}

PriorSpec parse_prior_config(std::istream& in) {
    PriorSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("prior config line " +
                                        std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "beta")
                spec.beta = std::stod(val);
            else if (key == "gamma")
                spec.gamma = std::stod(val);
            else if (key == "rho0_d")
                spec.rho0[0] = std::stod(val);
            else if (key == "rho0_m")
                spec.rho0[1] = std::stod(val);
            else if (key == "rho0_s")
                spec.rho0[2] = std::stod(val);
            else if (key == "depth_cap")
                spec.depth_cap = std::stoi(val);
            else if (key == "delta_star")
                spec.delta_star = std::stod(val);
            else
                throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("prior config line " +
                                        std::to_string(lineno) + ": bad entry '" +
                                        key + "'");
        }
    }
    spec.validate();
    return spec;
}

PriorSpec load_prior_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open prior config: " + path);
    return parse_prior_config(in);
}

}  // namespace dmmt
