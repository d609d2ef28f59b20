#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hullforge/common.hpp"
#include "hullforge/gmm.hpp"
#include "hullforge/hydro.hpp"
#include "hullforge/params.hpp"

namespace hullforge {

struct GenerationConfig {
    double target_rt = 5000.0;         // N
    double speed_knots = 10.0;
    double rho = 1025.0;
    double draft_fraction = 0.6;       // of hull depth
    std::optional<double> draft_m;     // absolute override
    std::size_t count = 150;
    std::uint64_t seed = 0;
    std::size_t max_attempts = 0;      // 0 means 200 * count
    std::size_t components = 0;        // 0 means pick by BIC
    double novelty_epsilon = 1e-6;
    bool rank_by_rt = false;           // keep lowest-rt `count` instead of first-come
};

// Stage reached by one sampled candidate, in evaluation order.
enum class RejectStage {
    none,        // accepted
    range,
    feasibility,
    novelty,
    resistance,  // includes solver failures at the drag stage
};

struct GenerationRecord {
    std::size_t attempt_index = 0;
    std::array<double, kParamCount> params{};
    bool valid = false;
    bool feasible = false;
    bool accepted = false;
    RejectStage rejected_at = RejectStage::none;
    std::string reject_detail;
    double novelty_distance = 0.0;
    double rt = 0.0, rw = 0.0, rf = 0.0, fn = 0.0;
};

struct GenerationSummary {
    std::size_t accepted = 0;
    std::size_t rejected_range = 0;
    std::size_t rejected_feasibility = 0;
    std::size_t rejected_novelty = 0;
    std::size_t rejected_resistance = 0;
    std::size_t attempts = 0;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
    bool budget_exhausted = false;
};

struct GenerationResult {
    std::vector<GenerationRecord> records;
    GenerationSummary summary;
    GmmModel model;
};

// Full sampling loop: draw from the model, validate ranges, check
// feasibility and novelty against the training set, score resistance,
// accept below target. Stops at cfg.count acceptances or when the
// budget runs out (budget_exhausted flags the shortfall; partial
// results are still returned).
GenerationResult run_generation(const Matrix& training, const GenerationConfig& cfg);
GenerationResult run_generation(const Matrix& training, const GenerationConfig& cfg,
                                const GmmModel& model);

struct PersistOptions {
    bool emit_stl = false;
    bool emit_overlay = true;
    std::uint64_t overlay_seed = 0;
};

// Writes accepted.csv, attempts.csv, summary.txt and optional per-hull
// STL plus the train/generated embedding overlay into out_dir.
// Returns the paths written.
std::vector<std::string> persist_results(const GenerationResult& result,
                                         const Matrix& training, const std::string& out_dir,
                                         const PersistOptions& opts = {});

struct DistributionReport {
    double in_fraction = 0.0;   // generated points near training support
    std::string overlay_svg;
    double threshold = 0.0;     // training 95th-percentile self-NN distance
};

// Joint embedding of training + generated rows plus a 45-d nearest
// neighbor coverage fraction.
DistributionReport in_distribution_report(const Matrix& training, const Matrix& generated,
                                          std::uint64_t seed, double perplexity = 30.0);

} // namespace hullforge
