#include "hullforge/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "hullforge/errors.hpp"

namespace hullforge {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

// Lowest index wins ties so assignments are reproducible.
std::size_t nearest_centroid(const Matrix& centroids, std::span<const double> x, double* dist) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows; ++c) {
        const double d = sq_dist(centroids.row(c), x);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist) *dist = best_d;
    return best;
}

Matrix plus_plus_init(const Matrix& data, std::size_t k, RandomEngine& rng) {
    const std::size_t n = data.rows;
    Matrix centroids(k, data.cols);
    auto copy_row = [&](std::size_t c, std::size_t i) {
        const auto src = data.row(i);
        std::copy(src.begin(), src.end(), centroids.row(c).begin());
    };
    copy_row(0, rng.uniform_index(n));
    std::vector<double> d2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(data.row(i), centroids.row(0));
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (const double v : d2) total += v;
        std::size_t pick;
        if (total > 0.0) {
            const double r = rng.uniform01() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.uniform_index(n); // every point already coincides with a centroid
        }
        copy_row(c, pick);
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sq_dist(data.row(i), centroids.row(c)));
        }
    }
    return centroids;
}

// Lloyd iterations in place; history gets the assignment cost of every
// iteration, which is non-increasing by the usual two-step argument.
double lloyd(const Matrix& data, Matrix& centroids, std::vector<int>& labels,
             std::vector<double>& history, int max_iter) {
    const std::size_t n = data.rows;
    const std::size_t k = centroids.rows;
    const std::size_t dim = data.cols;
    max_iter = std::max(max_iter, 1);
    labels.assign(n, -1);
    std::vector<int> prev(n, -2);
    std::vector<double> dist(n, 0.0);
    double wcss = 0.0;

    for (int iter = 0; iter < max_iter; ++iter) {
        wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = static_cast<int>(nearest_centroid(centroids, data.row(i), &dist[i]));
            wcss += dist[i];
        }
        history.push_back(wcss);
        if (labels == prev) break;
        prev = labels;

        std::vector<double> sums(k * dim, 0.0);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(labels[i]);
            counts[c]++;
            const auto row = data.row(i);
            for (std::size_t d = 0; d < dim; ++d) sums[c * dim + d] += row[d];
        }
        std::vector<bool> reseeded(n, false);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                for (std::size_t d = 0; d < dim; ++d) {
                    centroids(c, d) = sums[c * dim + d] / static_cast<double>(counts[c]);
                }
                continue;
            }
            // A cluster that lost every member restarts at the point
            // the current solution explains worst.
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!reseeded[i] && dist[i] > far_d) {
                    far_d = dist[i];
                    far = i;
                }
            }
            reseeded[far] = true;
            const auto src = data.row(far);
            std::copy(src.begin(), src.end(), centroids.row(c).begin());
        }
    }
    return wcss;
}

} // namespace

KMeansModel kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, int max_iter) {
    if (k < 1 || k > data.rows) {
        throw KRangeError("k=" + std::to_string(k) + " outside [1, n=" +
                          std::to_string(data.rows) + "]");
    }
    RandomEngine rng(seed);
    KMeansModel model;
    model.k = k;
    model.centroids = plus_plus_init(data, k, rng);
    model.wcss = lloyd(data, model.centroids, model.labels, model.wcss_history, max_iter);
    return model;
}

ElbowResult elbow_scan(const Matrix& data, std::size_t k_max, std::uint64_t seed) {
    if (k_max < 3) throw KRangeError("elbow scan needs k_max >= 3");
    if (k_max > data.rows) {
        throw KRangeError("k_max=" + std::to_string(k_max) + " exceeds n=" +
                          std::to_string(data.rows));
    }

    ElbowResult result;
    Matrix prev_best;
    std::vector<int> scratch_labels;
    for (std::size_t k = 1; k <= k_max; ++k) {
        double best_wcss = std::numeric_limits<double>::infinity();
        Matrix best_centroids;
        for (int r = 0; r < 3; ++r) {
            RandomEngine rng(seed + 1000003ull * k + static_cast<std::uint64_t>(r));
            Matrix c = plus_plus_init(data, k, rng);
            std::vector<double> hist;
            const double w = lloyd(data, c, scratch_labels, hist, 300);
            if (w < best_wcss) {
                best_wcss = w;
                best_centroids = std::move(c);
            }
        }
        if (k > 1 && !prev_best.empty()) {
            // Warm start: previous solution plus a centroid on its worst
            // point. Guarantees the curve is non-increasing in k.
            Matrix c(k, data.cols);
            for (std::size_t r = 0; r + 1 < k; ++r) {
                const auto src = prev_best.row(r);
                std::copy(src.begin(), src.end(), c.row(r).begin());
            }
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < data.rows; ++i) {
                double d = 0.0;
                nearest_centroid(prev_best, data.row(i), &d);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            const auto src = data.row(far);
            std::copy(src.begin(), src.end(), c.row(k - 1).begin());
            std::vector<double> hist;
            const double w = lloyd(data, c, scratch_labels, hist, 300);
            if (w < best_wcss) {
                best_wcss = w;
                best_centroids = std::move(c);
            }
        }
        prev_best = best_centroids;
        result.curve.emplace_back(k, best_wcss);
    }

    // Knee = largest second difference; a knee barely above the median
    // curvature is noise, not structure.
    double best_d2 = -std::numeric_limits<double>::infinity();
    std::vector<double> mags;
    for (std::size_t j = 1; j + 1 < result.curve.size(); ++j) {
        const double d2 = result.curve[j - 1].second - 2.0 * result.curve[j].second +
                          result.curve[j + 1].second;
        mags.push_back(std::abs(d2));
        if (d2 > best_d2) {
            best_d2 = d2;
            result.suggested_k = result.curve[j].first;
        }
    }
    std::sort(mags.begin(), mags.end());
    const double median = mags.empty() ? 0.0 : mags[mags.size() / 2];
    result.confident = best_d2 > 3.0 * median && best_d2 > 0.0;
    return result;
}

SilhouetteResult silhouette_score(const Matrix& data, const std::vector<int>& labels) {
    const std::size_t n = data.rows;
    if (labels.size() != n) throw DomainError("labels size does not match data rows");

    std::map<int, std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < n; ++i) clusters[labels[i]].push_back(i);
    if (clusters.size() < 2) throw SingleClusterError("silhouette needs at least 2 clusters");

    SilhouetteResult result;
    result.per_point.assign(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        double a = 0.0;
        double b = std::numeric_limits<double>::infinity();
        const auto xi = data.row(i);
        for (const auto& [label, members] : clusters) {
            double total = 0.0;
            for (const std::size_t j : members) {
                if (j != i) total += std::sqrt(sq_dist(xi, data.row(j)));
            }
            if (label == labels[i]) {
                if (members.size() < 2) {
                    // Singleton cluster: score 0 by convention.
                    result.per_point[i] = 0.0;
                    return;
                }
                a = total / static_cast<double>(members.size() - 1);
            } else {
                b = std::min(b, total / static_cast<double>(members.size()));
            }
        }
        const double denom = std::max(a, b);
        result.per_point[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    });
    double mean = 0.0;
    for (const double s : result.per_point) mean += s;
    result.mean = mean / static_cast<double>(n);
    return result;
}

} // namespace hullforge
