#include "lamlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "lamlab/errors.hpp"

namespace lamlab {

int l1_norm(std::span<const int> k) {
    int n = 0;
    for (int v : k) n += std::abs(v);
    return n;
}

std::string site_string(std::span<const int> site) {
    std::string s = "(";
    for (std::size_t a = 0; a < site.size(); ++a) {
        if (a) s += ",";
        s += std::to_string(site[a]);
    }
    return s + ")";
}

Box::Box(Site lo, Site hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    require(!lo_.empty() && lo_.size() == hi_.size(), "box corners must share a positive dimension");
    strides_.assign(lo_.size(), 1);
    size_ = 1;
    for (int a = dim() - 1; a >= 0; --a) {
        require(lo_[a] <= hi_[a], "box needs lo <= hi on every axis");
        strides_[a] = static_cast<std::ptrdiff_t>(size_);
        size_ *= static_cast<std::size_t>(extent(a));
    }
}

Box Box::cube(int d, int radius) {
    require(d >= 1 && radius >= 0, "cube needs d >= 1 and radius >= 0");
    return Box(Site(d, -radius), Site(d, radius));
}

int Box::min_extent() const {
    int m = extent(0);
    for (int a = 1; a < dim(); ++a) m = std::min(m, extent(a));
    return m;
}

bool Box::contains(std::span<const int> site) const {
    if (static_cast<int>(site.size()) != dim()) return false;
    for (int a = 0; a < dim(); ++a)
        if (site[a] < lo_[a] || site[a] > hi_[a]) return false;
    return true;
}

bool Box::contains(const Box& other) const {
    return other.dim() == dim() && contains(other.lo_) && contains(other.hi_);
}

std::size_t Box::flat(std::span<const int> site) const {
    std::size_t f = 0;
    for (int a = 0; a < dim(); ++a) f += static_cast<std::size_t>(site[a] - lo_[a]) * strides_[a];
    return f;
}

Site Box::site(std::size_t flat) const {
    Site s(dim());
    for (int a = 0; a < dim(); ++a) {
        s[a] = lo_[a] + static_cast<int>(flat / strides_[a]);
        flat %= strides_[a];
    }
    return s;
}

Box Box::expanded(int r) const {
    Site lo = lo_, hi = hi_;
    for (int a = 0; a < dim(); ++a) {
        lo[a] -= r;
        hi[a] += r;
    }
    return Box(lo, hi);
}

std::optional<Box> Box::interior(int r) const {
    Site lo = lo_, hi = hi_;
    for (int a = 0; a < dim(); ++a) {
        lo[a] += r;
        hi[a] -= r;
        if (lo[a] > hi[a]) return std::nullopt;
    }
    return Box(lo, hi);
}

Box Box::shifted(std::span<const int> k) const {
    Site lo = lo_, hi = hi_;
    for (int a = 0; a < dim(); ++a) {
        lo[a] += k[a];
        hi[a] += k[a];
    }
    return Box(lo, hi);
}

std::optional<Box> Box::intersect(const Box& other) const {
    if (other.dim() != dim()) return std::nullopt;
    Site lo(dim()), hi(dim());
    for (int a = 0; a < dim(); ++a) {
        lo[a] = std::max(lo_[a], other.lo_[a]);
        hi[a] = std::min(hi_[a], other.hi_[a]);
        if (lo[a] > hi[a]) return std::nullopt;
    }
    return Box(lo, hi);
}

std::vector<std::size_t> Box::indices_in(const Box& domain) const {
    require(domain.contains(*this), "box is not inside the domain");
    std::vector<std::size_t> out;
    out.reserve(size_);
    Site s = lo_;
    std::size_t base = domain.flat(s);
    const int last = dim() - 1;
    while (true) {
        for (int i = 0; i < extent(last); ++i) out.push_back(base + static_cast<std::size_t>(i));
        int a = last - 1;
        while (a >= 0 && s[a] == hi_[a]) {
            s[a] = lo_[a];
            --a;
        }
        if (a < 0) break;
        ++s[a];
        base = domain.flat(s);
    }
    return out;
}

Configuration::Configuration(Box domain, double fill)
    : domain_(std::move(domain)), values_(domain_.size(), fill) {}

Configuration::Configuration(Box domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
    require(values_.size() == domain_.size(), "configuration size does not match its domain");
}

Configuration Configuration::restricted(const Box& sub) const {
    auto idx = sub.indices_in(domain_);
    std::vector<double> v(idx.size());
    for (std::size_t n = 0; n < idx.size(); ++n) v[n] = values_[idx[n]];
    return Configuration(sub, std::move(v));
}

double Configuration::osc(int r) const {
    double best = 0.0;
    const auto ball = l1_ball(domain_.dim(), r);
    for (std::size_t f = 0; f < values_.size(); ++f) {
        Site s = domain_.site(f);
        for (const auto& k : ball) {
            Site t = s;
            for (int a = 0; a < domain_.dim(); ++a) t[a] += k[a];
            if (domain_.contains(t)) best = std::max(best, std::abs(values_[domain_.flat(t)] - values_[f]));
        }
    }
    return best;
}

std::vector<Site> l1_ball(int d, int r) {
    std::vector<Site> out;
    Site k(d, -r);
    while (true) {
        if (l1_norm(k) <= r) out.push_back(k);
        int a = d - 1;
        while (a >= 0 && k[a] == r) {
            k[a] = -r;
            --a;
        }
        if (a < 0) break;
        ++k[a];
    }
    return out;
}

}  // namespace lamlab
