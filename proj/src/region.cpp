#include "dmmt/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dmmt {

std::size_t RegionKeyHash::operator()(const RegionKey& k) const noexcept {
    // FNV-1a over the bit strings with a separator per dimension
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](unsigned char c) {
        h ^= c;
        h *= 1099511628211ull;
    };
    for (const auto& b : k.bits) {
        for (char c : b) mix(static_cast<unsigned char>(c));
        mix(0xff);
    }
    return static_cast<std::size_t>(h);
}

RegionKey root(int p) {
    if (p < 1) throw std::invalid_argument("dimension count must be >= 1");
    RegionKey k;
    k.bits.resize(static_cast<std::size_t>(p));
    return k;
}

std::pair<RegionKey, RegionKey> split(const RegionKey& key, int j) {
    if (j < 1 || j > key.dims())
        throw std::out_of_range("split direction out of range");
    RegionKey left = key, right = key;
    left.bits[static_cast<std::size_t>(j - 1)].push_back('0');
    right.bits[static_cast<std::size_t>(j - 1)].push_back('1');
    return {std::move(left), std::move(right)};
}

std::vector<Interval> bounds(const RegionKey& key) {
    std::vector<Interval> box;
    box.reserve(key.bits.size());
    for (const auto& b : key.bits) {
        Interval iv{0.0, 1.0};
        for (char c : b) {
            const double mid = iv.mid();
            if (c == '0')
                iv.hi = mid;
            else if (c == '1')
                iv.lo = mid;
            else
                throw std::invalid_argument("region key bits must be 0/1");
        }
        box.push_back(iv);
    }
    return box;
}

std::string to_text(const RegionKey& key) {
    std::string out;
    for (std::size_t d = 0; d < key.bits.size(); ++d) {
        if (d) out += ';';
        out += key.bits[d].empty() ? "-" : key.bits[d];
    }
    return out;
}

RegionKey parse_key(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty region key text");
    RegionKey key;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, ';')) {
        if (part == "-") part.clear();
        for (char c : part)
            if (c != '0' && c != '1')
                throw std::invalid_argument("region key bits must be 0/1");
        key.bits.push_back(part);
    }
    if (text.back() == ';' || key.bits.empty())
        throw std::invalid_argument("malformed region key text");
    return key;
}

Dataset rescale(const std::vector<std::vector<double>>& raw_group1,
                const std::vector<std::vector<double>>& raw_group2) {
    const std::size_t n1 = raw_group1.size(), n2 = raw_group2.size();
    if (n1 + n2 == 0) throw std::invalid_argument("rescale: no data points");
    const std::size_t p = n1 ? raw_group1[0].size() : raw_group2[0].size();
    if (p == 0) throw std::invalid_argument("rescale: zero-dimensional points");

    auto check = [p](const std::vector<std::vector<double>>& g) {
        for (const auto& x : g) {
            if (x.size() != p)
                throw std::invalid_argument("rescale: inconsistent dimensions");
            for (double v : x)
                if (!std::isfinite(v))
                    throw std::invalid_argument("rescale: non-finite coordinate");
        }
    };
    check(raw_group1);
    check(raw_group2);

    Dataset ds;
    ds.dims = static_cast<int>(p);
    ds.ranges.resize(p);
    for (std::size_t d = 0; d < p; ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto* g : {&raw_group1, &raw_group2})
            for (const auto& x : *g) {
                lo = std::min(lo, x[d]);
                hi = std::max(hi, x[d]);
            }
        if (!(hi > lo))
            throw std::invalid_argument("rescale: constant dimension " +
                                        std::to_string(d + 1));
        ds.ranges[d] = Interval{lo, hi};
    }

    auto map = [&ds, p](const std::vector<std::vector<double>>& g) {
        std::vector<std::vector<double>> out;
        out.reserve(g.size());
        for (const auto& x : g) {
            std::vector<double> y(p);
            for (std::size_t d = 0; d < p; ++d) {
                const auto& r = ds.ranges[d];
                // divide by (1+1e-9)*range so the maximum lands strictly below 1
                y[d] = (x[d] - r.lo) / ((r.hi - r.lo) * (1.0 + 1e-9));
            }
            out.push_back(std::move(y));
        }
        return out;
    };
    ds.group1 = map(raw_group1);
    ds.group2 = map(raw_group2);
    return ds;
}

std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>
partition_points(const std::vector<std::vector<double>>& points,
                 const std::vector<std::uint32_t>& indices,
                 const RegionKey& key, int j) {
    if (j < 1 || j > key.dims())
        throw std::out_of_range("partition direction out of range");
    Interval iv{0.0, 1.0};
    for (char c : key.bits[static_cast<std::size_t>(j - 1)]) {
        const double mid = iv.mid();
        (c == '0' ? iv.hi : iv.lo) = mid;
    }
    const double mid = iv.mid();
    std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> out;
    for (std::uint32_t i : indices) {
        const double v = points[i][static_cast<std::size_t>(j - 1)];
        if (v < iv.lo || v >= iv.hi)
            throw std::logic_error("partition_points: point outside region");
        (v < mid ? out.first : out.second).push_back(i);
    }
    return out;
}

bool contains(const std::vector<Interval>& box, const std::vector<double>& x) {
    for (std::size_t d = 0; d < box.size(); ++d)
        if (x[d] < box[d].lo || x[d] >= box[d].hi) return false;
    return true;
}

}  // namespace dmmt
