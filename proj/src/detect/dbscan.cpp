#include "cirpeak/detect/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "cirpeak/errors.hpp"

namespace cirpeak::detect {
namespace {

// Points sorted by their first coordinate. Every eps-neighbourhood lies in a
// contiguous run of that order, so region queries reduce to a binary search
// plus a distance filter (exact in 1-D).
class SortedIndex {
 public:
  SortedIndex(std::span<const double> points, std::size_t dims, double eps)
      : points_(points), dims_(dims), eps_(eps), eps2_(eps * eps) {
    const std::size_t n = points.size() / dims;
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    keys_.resize(n);
    for (std::size_t r = 0; r < n; ++r) keys_[r] = key(order_[r]);
  }

  std::size_t size() const { return order_.size(); }
  std::size_t point_at(std::size_t rank) const { return order_[rank]; }

  // Sorted-rank window [lo, hi) whose first coordinate is within eps of p.
  std::pair<std::size_t, std::size_t> window(std::size_t p) const {
    const double x = key(p);
    const auto lo = std::lower_bound(keys_.begin(), keys_.end(), x - eps_);
    const auto hi = std::upper_bound(keys_.begin(), keys_.end(), x + eps_);
    return {static_cast<std::size_t>(lo - keys_.begin()), static_cast<std::size_t>(hi - keys_.begin())};
  }

  bool within(std::size_t a, std::size_t b) const {
    if (dims_ == 1) return std::abs(key(a) - key(b)) <= eps_;
    double d2 = 0.0;
    for (std::size_t j = 0; j < dims_; ++j) {
      const double d = points_[a * dims_ + j] - points_[b * dims_ + j];
      d2 += d * d;
    }
    return d2 <= eps2_;
  }

  std::size_t count_neighbours(std::size_t p) const {
    const auto [lo, hi] = window(p);
    if (dims_ == 1) return hi - lo;
    std::size_t n = 0;
    for (std::size_t r = lo; r < hi; ++r) n += within(p, order_[r]) ? 1 : 0;
    return n;
  }

 private:
  double key(std::size_t p) const { return points_[p * dims_]; }

  std::span<const double> points_;
  std::size_t dims_;
  double eps_;
  double eps2_;
  std::vector<std::size_t> order_;
  std::vector<double> keys_;
};

// Union-find "next unlabelled rank" so each point is handed out once.
class SkipList {
 public:
  explicit SkipList(std::size_t n) : next_(n + 1) { std::iota(next_.begin(), next_.end(), std::size_t{0}); }
  std::size_t find(std::size_t r) {
    while (next_[r] != r) {
      next_[r] = next_[next_[r]];
      r = next_[r];
    }
    return r;
  }
  void remove(std::size_t r) { next_[r] = r + 1; }

 private:
  std::vector<std::size_t> next_;
};

}  // namespace

std::vector<int> dbscan(std::span<const double> points, std::size_t dims, double eps, int min_samples) {
  if (dims == 0) throw ValidationError("dbscan needs at least one dimension");
  if (points.size() % dims != 0) throw ValidationError("point buffer is not a multiple of dims");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ValidationError("eps must be positive");
  if (min_samples < 1) throw ValidationError("min_samples must be >= 1");
  for (double v : points) {
    if (!std::isfinite(v)) throw ValidationError("dbscan input contains non-finite values");
  }

  const std::size_t n = points.size() / dims;
  std::vector<int> labels(n, kNoise);
  if (n == 0) return labels;

  const SortedIndex index(points, dims, eps);
  std::vector<char> core(n);
  for (std::size_t p = 0; p < n; ++p) {
    core[p] = index.count_neighbours(p) >= static_cast<std::size_t>(min_samples);
  }

  SkipList unlabelled(n);
  std::vector<std::size_t> rank_of(n);
  for (std::size_t r = 0; r < n; ++r) rank_of[index.point_at(r)] = r;

  int cluster = 0;
  std::deque<std::size_t> queue;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!core[seed] || labels[seed] != kNoise) continue;
    labels[seed] = cluster;
    unlabelled.remove(rank_of[seed]);
    queue.push_back(seed);
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      const auto [lo, hi] = index.window(p);
      for (std::size_t r = unlabelled.find(lo); r < hi; r = unlabelled.find(r + 1)) {
        const std::size_t q = index.point_at(r);
        if (!index.within(p, q)) continue;
        labels[q] = cluster;
        unlabelled.remove(r);
        if (core[q]) queue.push_back(q);
      }
    }
    ++cluster;
  }
  return labels;
}

}  // namespace cirpeak::detect
