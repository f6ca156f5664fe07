#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lamlab {

using Site = std::vector<int>;

int l1_norm(std::span<const int> k);
std::string site_string(std::span<const int> site);

// Axis-aligned rectangle [lo, hi] of Z^d, inclusive on both ends, row-major flattening.
class Box {
  public:
    Box() = default;
    Box(Site lo, Site hi);
    static Box cube(int d, int radius);
    static Box interval(int lo, int hi) { return Box({lo}, {hi}); }

    int dim() const { return static_cast<int>(lo_.size()); }
    const Site& lo() const { return lo_; }
    const Site& hi() const { return hi_; }
    int extent(int axis) const { return hi_[axis] - lo_[axis] + 1; }
    int min_extent() const;
    std::size_t size() const { return size_; }
    const std::vector<std::ptrdiff_t>& strides() const { return strides_; }

    bool contains(std::span<const int> site) const;
    bool contains(const Box& other) const;
    std::size_t flat(std::span<const int> site) const;
    Site site(std::size_t flat) const;

    // Rectangle hull of the sites within L1 distance r.
    Box expanded(int r) const;
    // Sites at L1 distance > r from the complement; empty when the box is too thin.
    std::optional<Box> interior(int r) const;
    Box shifted(std::span<const int> k) const;
    std::optional<Box> intersect(const Box& other) const;

    // Domain flat indices of every site of *this, listed in this box's own order.
    std::vector<std::size_t> indices_in(const Box& domain) const;

    bool operator==(const Box& other) const { return lo_ == other.lo_ && hi_ == other.hi_; }

  private:
    Site lo_, hi_;
    std::vector<std::ptrdiff_t> strides_;
    std::size_t size_ = 0;
};

class Configuration {
  public:
    Configuration() = default;
    explicit Configuration(Box domain, double fill = 0.0);
    Configuration(Box domain, std::vector<double> values);

    const Box& domain() const { return domain_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t flat) const { return values_[flat]; }
    double& operator[](std::size_t flat) { return values_[flat]; }
    double at(std::span<const int> site) const { return values_[domain_.flat(site)]; }
    double& at(std::span<const int> site) { return values_[domain_.flat(site)]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    Configuration restricted(const Box& sub) const;
    // sup |x_j - x_i| over pairs at L1 distance <= r inside the domain
    double osc(int r) const;

  private:
    Box domain_;
    std::vector<double> values_;
};

// Offsets k with ||k||_1 <= r, lexicographic.
std::vector<Site> l1_ball(int d, int r);

}  // namespace lamlab
