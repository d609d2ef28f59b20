#pragma once

#include <cstdint>

#include "hullforge/common.hpp"

namespace hullforge {

struct TsneOptions {
    double perplexity = 30.0;
    int iters = 1000;
    double learning_rate = 200.0;
    double theta = 0.5;              // Barnes-Hut accuracy knob
    int exaggeration_iters = 250;
    double exaggeration = 12.0;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch = 250;
    std::size_t exact_threshold = 5000; // above this, Barnes-Hut + sparse P
};

struct EmbeddingResult {
    Matrix coords;          // n x 2
    double final_kl = 0.0;
    double initial_kl = 0.0;
    double perplexity = 0.0;
    std::uint64_t seed = 0;
};

// Standard t-SNE to 2 dimensions. Data should be pre-normalized so
// Euclidean distances are meaningful. Deterministic per seed at any
// thread count.
EmbeddingResult tsne_embed(const Matrix& data, double perplexity, int iters,
                           std::uint64_t seed);
EmbeddingResult tsne_embed(const Matrix& data, std::uint64_t seed,
                           const TsneOptions& opts);

// Dense symmetrized joint affinities (sums to 1). Exposed for property
// tests; only valid for n at or below the exact-path threshold.
Matrix tsne_affinities(const Matrix& data, double perplexity);

} // namespace hullforge
