#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "tel/matrix.hpp"

namespace tel {

inline constexpr int kNoise = -1;

struct ClusterAssignment {
    std::vector<int> labels;            // kNoise marks density-clustering noise
    Matrix centroids;                   // K-means only
    double inertia = 0.0;               // K-means only
    std::vector<double> inertia_history;  // K-means: inertia after every assignment step
    std::size_t iterations = 0;
    std::size_t clusters = 0;
};

/// Lloyd's algorithm from k distinct seeded rows. Assignment ties go to the
/// lowest centroid index; an emptied cluster is reseeded at the point farthest
/// from its assigned centroid. Throws KOutOfRange.
ClusterAssignment kmeans(const Matrix& x, std::size_t k, std::uint64_t seed, std::size_t max_iter = 300);

/// Density clustering with Euclidean eps-neighbourhoods (self included, so a
/// point is core when its neighbourhood holds at least min_pts points).
/// Clusters are numbered in row-scan order; a border point joins the first
/// cluster that reaches it. Throws InvalidArgument for eps <= 0 or min_pts 0.
ClusterAssignment dbscan(const Matrix& x, double eps, std::size_t min_pts);

nlohmann::json to_json(const ClusterAssignment& assignment);

}  // namespace tel
