#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "dmmt/prior.hpp"
#include "dmmt/region.hpp"

namespace dmmt {

// Forward-summation quantities of one region, all in log space.
// log_zj holds log Z_j per direction for the divide and merge states.
struct NodeEvaluation {
    RegionKey key;
    std::uint32_t n1 = 0;
    std::uint32_t n2 = 0;
    std::array<double, 3> log_z{};    // indexed by State
    std::array<double, 3> log_phi{};  // indexed by parent State
    std::vector<double> log_zj_d;     // size p
    std::vector<double> log_zj_m;     // size p

    std::uint32_t n() const { return n1 + n2; }
};

struct FitOptions {
    std::size_t memo_cap = 50'000'000;  // fail fast before exhausting memory
};

// Posterior of a DMMT prior after observing the two samples. Holds the
// memoized forward pass; read-only and shareable across threads after
// construction.
//
// Accessors are exact for every region reachable by descending from the
// root: regions absent from the memo lie inside empty or singleton
// subtrees, where the posterior parameters coincide with the prior.
class PosteriorModel {
  public:
    PosteriorModel(Dataset dataset, PriorSpec prior, FitOptions options);

    const PriorSpec& prior() const { return prior_; }
    const Dataset& dataset() const { return dataset_; }

    const NodeEvaluation* node(const RegionKey& key) const;

    // Theorem-of-conjugacy parameters.
    std::array<double, 3> posterior_transition(const RegionKey& key, State g) const;
    std::vector<double> posterior_direction(const RegionKey& key, State g) const;
    // Posterior pseudo-counts for the given group in state g.
    double posterior_pseudo_count(const RegionKey& key, int group, State g) const;

    // Counts of each group inside an arbitrary region (scans the data).
    std::pair<std::uint32_t, std::uint32_t> region_counts(const RegionKey& key) const;

    std::size_t memo_size() const { return memo_.size(); }

    // Line-delimited debug dump: key, counts, log_Z triplet, log_Phi triplet.
    void dump_memo(std::ostream& out) const;

  private:
    friend PosteriorModel fit(const Dataset&, const PriorSpec&, const FitOptions&);

    const NodeEvaluation& eval(const RegionKey& key,
                               const std::vector<std::uint32_t>& idx1,
                               const std::vector<std::uint32_t>& idx2);

    Dataset dataset_;
    PriorSpec prior_;
    FitOptions options_;
    std::unordered_map<RegionKey, NodeEvaluation, RegionKeyHash> memo_;
};

PosteriorModel fit(const Dataset& dataset, const PriorSpec& prior,
                   const FitOptions& options = {});

// Numerically stable log(sum(exp(v))).
double log_sum_exp(const std::vector<double>& v);
double log_sum_exp3(double a, double b, double c);

}  // namespace dmmt
