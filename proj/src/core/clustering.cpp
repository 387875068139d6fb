#include "tel/clustering.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "tel/error.hpp"
#include "tel/logistic.hpp"
#include "tel/rng.hpp"

namespace tel {

namespace {

std::size_t nearest(const Matrix& centroids, std::span<const double> point, double& best_distance) {
    std::size_t best = 0;
    best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double d = squared_distance(point, centroids.row(c));
        if (d < best_distance) {
            best_distance = d;
            best = c;
        }
    }
    return best;
}

double inertia_of(const Matrix& x, const Matrix& centroids, const std::vector<int>& labels) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        total += squared_distance(x.row(i), centroids.row(static_cast<std::size_t>(labels[i])));
    }
    return total;
}

std::vector<std::size_t> region_query(const Matrix& x, std::size_t p, double eps) {
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < x.rows(); ++q) {
        if (euclidean_distance(x.row(p), x.row(q)) <= eps) out.push_back(q);
    }
    return out;
}

}  // namespace

ClusterAssignment kmeans(const Matrix& x, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
    if (k < 1 || k > x.rows()) {
        throw Error(ErrorCode::KOutOfRange, "k must lie in [1, " + std::to_string(x.rows()) + "]");
    }
    check_finite(x);
    Rng rng(seed);
    const auto initial = rng.sample_without_replacement(x.rows(), k);
    ClusterAssignment out;
    out.centroids = x.select_rows(initial);
    out.clusters = k;
    out.labels.assign(x.rows(), -1);

    for (std::size_t iter = 0; iter < std::max<std::size_t>(max_iter, 1); ++iter) {
        bool changed = false;
        double inertia = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double d = 0.0;
            const int label = static_cast<int>(nearest(out.centroids, x.row(i), d));
            changed |= label != out.labels[i];
            out.labels[i] = label;
            inertia += d;
        }
        out.inertia_history.push_back(inertia);
        out.iterations = iter + 1;
        if (!changed && iter > 0) break;

        Matrix sums(k, x.cols());
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const auto c = static_cast<std::size_t>(out.labels[i]);
            ++counts[c];
            auto row = x.row(i);
            for (std::size_t j = 0; j < x.cols(); ++j) sums(c, j) += row[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t j = 0; j < x.cols(); ++j) out.centroids(c, j) = sums(c, j) / static_cast<double>(counts[c]);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            // Farthest point from its own centroid, excluding points that anchor a singleton.
            std::size_t far = x.rows();
            double far_d = -1.0;
            for (std::size_t i = 0; i < x.rows(); ++i) {
                const auto owner = static_cast<std::size_t>(out.labels[i]);
                if (counts[owner] <= 1) continue;
                const double d = squared_distance(x.row(i), out.centroids.row(owner));
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far == x.rows()) continue;
            --counts[static_cast<std::size_t>(out.labels[far])];
            out.labels[far] = static_cast<int>(c);
            counts[c] = 1;
            auto src = x.row(far);
            std::copy(src.begin(), src.end(), out.centroids.row(c).begin());
        }
    }
    out.inertia = inertia_of(x, out.centroids, out.labels);
    return out;
}

ClusterAssignment dbscan(const Matrix& x, double eps, std::size_t min_pts) {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be > 0");
    if (min_pts < 1) throw Error(ErrorCode::InvalidArgument, "min_pts must be >= 1");
    check_finite(x);
    constexpr int kUnvisited = -2;
    ClusterAssignment out;
    out.labels.assign(x.rows(), kUnvisited);
    int cluster = 0;
    for (std::size_t p = 0; p < x.rows(); ++p) {
        if (out.labels[p] != kUnvisited) continue;
        const auto neighbours = region_query(x, p, eps);
        if (neighbours.size() < min_pts) {
            out.labels[p] = kNoise;
            continue;
        }
        out.labels[p] = cluster;
        std::deque<std::size_t> frontier(neighbours.begin(), neighbours.end());
        while (!frontier.empty()) {
            const std::size_t q = frontier.front();
            frontier.pop_front();
            if (out.labels[q] == kNoise) out.labels[q] = cluster;  // border point
            if (out.labels[q] != kUnvisited) continue;
            out.labels[q] = cluster;
            const auto reach = region_query(x, q, eps);
            if (reach.size() >= min_pts) frontier.insert(frontier.end(), reach.begin(), reach.end());
        }
        ++cluster;
    }
    out.clusters = static_cast<std::size_t>(cluster);
    return out;
}

nlohmann::json to_json(const ClusterAssignment& a) {
    nlohmann::json centroids = nlohmann::json::array();
    for (std::size_t c = 0; c < a.centroids.rows(); ++c) {
        auto row = a.centroids.row(c);
        centroids.push_back(std::vector<double>(row.begin(), row.end()));
    }
    std::size_t noise = 0;
    for (int l : a.labels) noise += l == kNoise;
    return nlohmann::json{{"labels", a.labels},
                          {"clusters", a.clusters},
                          {"noise", noise},
                          {"centroids", std::move(centroids)},
                          {"inertia", a.inertia},
                          {"iterations", a.iterations}};
}

}  // namespace tel
