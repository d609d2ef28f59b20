#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hullforge/common.hpp"

namespace hullforge {

struct KMeansModel {
    std::size_t k = 0;
    Matrix centroids;            // k x d
    std::vector<int> labels;     // n
    double wcss = 0.0;
    std::vector<double> wcss_history; // per Lloyd iteration, non-increasing
};

// Lloyd iterations from k-means++ seeding until the assignment reaches
// a fixpoint or max_iter. Distances are Euclidean in the space the
// data is given in; callers normalize first when dimensions mix units.
KMeansModel kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, int max_iter = 300);

struct ElbowResult {
    std::vector<std::pair<std::size_t, double>> curve; // (k, wcss)
    std::size_t suggested_k = 0;
    bool confident = false;
};

// WCSS curve for k = 1..k_max with the knee picked by the largest
// second difference. confident is false when the curve is too smooth
// to carry a meaningful knee.
ElbowResult elbow_scan(const Matrix& data, std::size_t k_max, std::uint64_t seed);

struct SilhouetteResult {
    double mean = 0.0;
    std::vector<double> per_point;
};

// Standard silhouette: s = (b - a) / max(a, b), with 0/0 defined as 0.
SilhouetteResult silhouette_score(const Matrix& data, const std::vector<int>& labels);

} // namespace hullforge
