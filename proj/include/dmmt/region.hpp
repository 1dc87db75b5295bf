#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dmmt {

// Identifier of a region in the dimensionwise dyadic partition tree.
// Per dimension, a bit string records the sequence of left(0)/right(1)
// cuts applied in that dimension. Region identity is independent of the
// order in which cuts across dimensions were made.
struct RegionKey {
    std::vector<std::string> bits;  // one string per dimension

    int dims() const { return static_cast<int>(bits.size()); }

    int level() const {
        std::size_t n = 0;
        for (const auto& b : bits) n += b.size();
        return static_cast<int>(n);
    }

    bool operator==(const RegionKey& other) const { return bits == other.bits; }
    bool operator!=(const RegionKey& other) const { return bits != other.bits; }
};

struct RegionKeyHash {
    std::size_t operator()(const RegionKey& k) const noexcept;
};

struct Interval {
    double lo;
    double hi;  // half-open [lo, hi)
    double mid() const { return 0.5 * (lo + hi); }
};

// Root region [0,1)^p. Rejects p < 1.
RegionKey root(int p);

// Children obtained by cutting dimension j (1-based) at its midpoint.
std::pair<RegionKey, RegionKey> split(const RegionKey& key, int j);

// Per-dimension half-open intervals of the region.
std::vector<Interval> bounds(const RegionKey& key);

// Text form: per-dimension bit strings joined by ';', '-' for empty.
std::string to_text(const RegionKey& key);
RegionKey parse_key(const std::string& text);

// Two groups of points rescaled into [0,1)^p, with the original
// per-dimension ranges kept for mapping regions back to raw coordinates.
struct Dataset {
    int dims = 0;
    std::vector<std::vector<double>> group1;
    std::vector<std::vector<double>> group2;
    std::vector<Interval> ranges;  // raw min/max per dimension

    std::size_t n1() const { return group1.size(); }
    std::size_t n2() const { return group2.size(); }
};

// Affine rescaling of the pooled sample so every coordinate lands in
// [0,1). Rejects empty pools, non-finite values and constant dimensions.
Dataset rescale(const std::vector<std::vector<double>>& raw_group1,
                const std::vector<std::vector<double>>& raw_group2);

// Splits point indices by the dyadic midpoint of key's j-th interval
// (1-based j). Points exactly on the midpoint go right.
std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>
partition_points(const std::vector<std::vector<double>>& points,
                 const std::vector<std::uint32_t>& indices,
                 const RegionKey& key, int j);

bool contains(const std::vector<Interval>& box, const std::vector<double>& x);

}  // namespace dmmt
