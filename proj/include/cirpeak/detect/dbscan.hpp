#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cirpeak::detect {

inline constexpr int kNoise = -1;

/// Density-based clustering of N points stored row-major (N x dims) under
/// the Euclidean metric. A point is core when at least `min_samples` points,
/// itself included, lie within distance <= eps. Cluster ids are 0, 1, ...
/// in order of each cluster's first core point in input order; a border
/// point reachable from several clusters joins the lowest id. Unreachable
/// non-core points get kNoise.
///
/// Throws ValidationError for non-finite coordinates, dims == 0, eps <= 0,
/// min_samples < 1, or a coordinate count that is not a multiple of dims.
std::vector<int> dbscan(std::span<const double> points, std::size_t dims, double eps, int min_samples);

}  // namespace cirpeak::detect
