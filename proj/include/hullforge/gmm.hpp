#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hullforge/common.hpp"
#include "hullforge/normalize.hpp"

namespace hullforge {

// Gaussian mixture with full covariances, fitted and stored in the
// normalizer's [0,1] space; samples and prototypes are returned in the
// original units.
struct GmmModel {
    std::size_t k = 0;
    std::size_t dim = 0;
    std::vector<double> weights;      // k, positive, sums to 1
    Matrix means;                     // k x d, normalized space
    std::vector<Matrix> covariances;  // k of d x d, SPD
    double train_loglik = 0.0;        // final average per-point ll
    std::uint64_t seed = 0;
    Normalizer normalizer;
    std::vector<double> loglik_history; // per EM iteration of the best restart

    void save(const std::string& path) const;
    static GmmModel load(const std::string& path);
};

struct GmmFitOptions {
    double tol = 1e-6;
    int max_iter = 500;
    int restarts = 3;
    double floor_scale = 1e-6; // covariance ridge: scale x mean diagonal
    // Invoked after every EM iteration of every restart with the
    // current weights and average log-likelihood; used by invariant
    // tests, never by production paths.
    std::function<void(const std::vector<double>& weights, double avg_ll)> observer;
};

// EM from a k-means++ (one Lloyd pass) initialization. Keeps the best
// of `restarts` runs by final likelihood. Data is raw; normalization
// is fitted internally and stored on the model.
GmmModel fit_gmm(const Matrix& data, std::size_t k, std::uint64_t seed,
                 const GmmFitOptions& opts = {});

struct GmmSelection {
    GmmModel best;
    std::vector<std::pair<std::size_t, double>> bic_curve; // (k, bic)
};

// Fits k in [k_min, k_max] and keeps the lowest BIC.
GmmSelection select_gmm(const Matrix& data, std::size_t k_min, std::size_t k_max,
                        std::uint64_t seed, const GmmFitOptions& opts = {});

// Posterior component probabilities for a raw-space point.
std::vector<double> responsibilities(const GmmModel& model, std::span<const double> x);

// Draws n raw-space samples: component by weight, point by Cholesky.
// No clipping or rejection; downstream validation decides acceptance.
Matrix sample_gmm(const GmmModel& model, std::size_t n, std::uint64_t seed);

// Incremental sampler for pipelines that need one draw per attempt.
class GmmSampler {
public:
    GmmSampler(const GmmModel& model, std::uint64_t seed);
    void draw(std::span<double> out); // raw space
private:
    const GmmModel* model_;
    RandomEngine rng_;
    std::vector<Matrix> chol_;      // lower factors
    std::vector<double> cum_weights_;
    std::vector<double> scratch_;
};

// Inverse-normalized component means.
Matrix component_prototypes(const GmmModel& model);

// Linear blend of two raw parameter vectors in normalized space; flag
// dimensions snap to the nearer endpoint.
std::vector<double> interpolate_designs(const GmmModel& model, std::span<const double> a,
                                        std::span<const double> b, double t);

struct OutlierReport {
    std::vector<double> scores;        // per-point mixture log-density
    std::vector<std::size_t> lowest;   // indices of the bottom quantile
};

OutlierReport outlier_scores(const GmmModel& model, const Matrix& data, double quantile = 0.01);

struct NoveltyResult {
    double nearest_distance = 0.0;
    bool is_novel = false;
};

// Nearest-neighbor distance of a raw sample to raw training rows,
// measured in the supplied normalizer's space.
NoveltyResult novelty_check(std::span<const double> sample, const Matrix& training,
                            const Normalizer& norm, double epsilon = 1e-6);
NoveltyResult novelty_check(std::span<const double> sample, const Matrix& training,
                            double epsilon = 1e-6);

} // namespace hullforge
