#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>

#include "hullforge/dataset.hpp"
#include "hullforge/errors.hpp"
#include "hullforge/gmm.hpp"
#include "hullforge/pipeline.hpp"

#include "support.hpp"

using namespace hullforge;
using testsupport::TempDir;

namespace {

// The committed hull dataset, shared by every case in this suite.
const Matrix& training_rows() {
    static const Matrix rows = [] {
        const std::string dir = testsupport::env_or("HULLFORGE_DATA", "data");
        LoadReport report = load_dataset(dir + "/hulls_synthetic.csv");
        REQUIRE(report.rejected.empty());
        REQUIRE(report.rows.rows >= 100);
        return std::move(report.rows);
    }();
    return rows;
}

Matrix head_rows(const Matrix& all, std::size_t n) {
    Matrix out(n, all.cols);
    for (std::size_t r = 0; r < n; ++r) {
        const auto src = all.row(r);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

GenerationConfig small_config() {
    GenerationConfig cfg;
    cfg.target_rt = 5000.0;
    cfg.speed_knots = 10.0;
    cfg.draft_fraction = 0.6;
    cfg.count = 3;
    cfg.seed = 11;
    cfg.components = 2;
    cfg.max_attempts = 120;
    return cfg;
}

} // namespace

TEST_CASE("generation accepts hulls below the resistance target") {
    const Matrix training = head_rows(training_rows(), 80);
    const GenerationConfig cfg = small_config();
    const GenerationResult result = run_generation(training, cfg);

    CHECK(result.summary.accepted == cfg.count);
    CHECK_FALSE(result.summary.budget_exhausted);
    CHECK(result.summary.seed == cfg.seed);
    CHECK(result.summary.attempts == result.records.size());
    CHECK(result.summary.attempts <= cfg.max_attempts);
    CHECK(result.summary.wall_seconds > 0.0);

    // Stage counters reconcile with the per-attempt records.
    std::size_t accepted = 0, range = 0, feas = 0, novel = 0, resist = 0;
    std::size_t prev_index = 0;
    for (const GenerationRecord& rec : result.records) {
        CHECK(rec.attempt_index >= prev_index);
        prev_index = rec.attempt_index;
        switch (rec.rejected_at) {
        case RejectStage::none: ++accepted; break;
        case RejectStage::range: ++range; break;
        case RejectStage::feasibility: ++feas; break;
        case RejectStage::novelty: ++novel; break;
        case RejectStage::resistance: ++resist; break;
        }
        if (rec.rejected_at == RejectStage::none) {
            CHECK(rec.accepted);
            CHECK(rec.valid);
            CHECK(rec.feasible);
            CHECK(rec.rt < cfg.target_rt);
            CHECK(rec.rt > 0.0);
            CHECK(rec.rw >= 0.0);
            CHECK(rec.rf > 0.0);
            CHECK(rec.fn > 0.0);
            CHECK(rec.novelty_distance > cfg.novelty_epsilon);
            CHECK_NOTHROW(validate_params(rec.params));
        } else {
            CHECK_FALSE(rec.accepted);
            CHECK(!rec.reject_detail.empty());
        }
    }
    CHECK(accepted == result.summary.accepted);
    CHECK(range == result.summary.rejected_range);
    CHECK(feas == result.summary.rejected_feasibility);
    CHECK(novel == result.summary.rejected_novelty);
    CHECK(resist == result.summary.rejected_resistance);
}

TEST_CASE("generation is deterministic per seed") {
    const Matrix training = head_rows(training_rows(), 60);
    GenerationConfig cfg = small_config();
    cfg.count = 2;
    cfg.max_attempts = 80;

    const GenerationResult a = run_generation(training, cfg);
    const GenerationResult b = run_generation(training, cfg);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].params == b.records[i].params);
        CHECK(a.records[i].rt == b.records[i].rt);
        CHECK(a.records[i].rejected_at == b.records[i].rejected_at);
        CHECK(a.records[i].novelty_distance == b.records[i].novelty_distance);
    }

    GenerationConfig other = cfg;
    other.seed = cfg.seed + 1;
    const GenerationResult c = run_generation(training, other);
    bool any_diff = c.records.size() != a.records.size();
    for (std::size_t i = 0; !any_diff && i < a.records.size(); ++i) {
        any_diff = a.records[i].params != c.records[i].params;
    }
    CHECK(any_diff);
}

TEST_CASE("an unreachable target exhausts the budget without throwing") {
    const Matrix training = head_rows(training_rows(), 60);
    GenerationConfig cfg = small_config();
    cfg.target_rt = 1.0; // no hull resists this little
    cfg.count = 2;
    cfg.max_attempts = 5;

    const GenerationResult result = run_generation(training, cfg);
    CHECK(result.summary.budget_exhausted);
    CHECK(result.summary.accepted < cfg.count);
    CHECK(result.summary.attempts == 5);
    CHECK(result.records.size() == 5);
}

TEST_CASE("configuration errors are rejected up front") {
    const Matrix training = head_rows(training_rows(), 60);
    GenerationConfig cfg = small_config();
    cfg.count = 0;
    CHECK_THROWS_AS(run_generation(training, cfg), DomainError);

    cfg = small_config();
    cfg.speed_knots = 0.0;
    CHECK_THROWS_AS(run_generation(training, cfg), DomainError);

    cfg = small_config();
    cfg.max_attempts = cfg.count - 1;
    CHECK_THROWS_AS(run_generation(training, cfg), DomainError);
}

TEST_CASE("ranked mode keeps the lowest-resistance candidates") {
    const Matrix training = head_rows(training_rows(), 60);
    GenerationConfig cfg = small_config();
    cfg.count = 2;
    cfg.max_attempts = 40;
    cfg.rank_by_rt = true;

    const GenerationResult result = run_generation(training, cfg);
    // Ranked mode spends the whole budget before picking winners.
    CHECK(result.summary.attempts == cfg.max_attempts);

    std::vector<double> kept, demoted;
    for (const GenerationRecord& rec : result.records) {
        if (rec.accepted) kept.push_back(rec.rt);
        if (rec.rejected_at == RejectStage::resistance && rec.rt > 0.0 &&
            rec.rt < cfg.target_rt) {
            demoted.push_back(rec.rt);
        }
    }
    REQUIRE(kept.size() == result.summary.accepted);
    CHECK(kept.size() <= cfg.count);
    const double worst_kept = *std::max_element(kept.begin(), kept.end());
    for (const double rt : demoted) CHECK(rt >= worst_kept);
}

TEST_CASE("persisted artifacts round trip") {
    const Matrix training = head_rows(training_rows(), 80);
    GenerationConfig cfg = small_config();
    const GenerationResult result = run_generation(training, cfg);

    TempDir dir("pipeline");
    PersistOptions popts;
    popts.emit_stl = true;
    const auto paths = persist_results(result, training, dir.str(), popts);

    auto has_file = [&](const std::string& name) {
        return std::find_if(paths.begin(), paths.end(), [&](const std::string& p) {
                   return p.size() >= name.size() &&
                          p.compare(p.size() - name.size(), name.size(), name) == 0;
               }) != paths.end();
    };
    CHECK(has_file("accepted.csv"));
    CHECK(has_file("attempts.csv"));
    CHECK(has_file("summary.txt"));
    CHECK(has_file("overlay.svg"));
    for (const std::string& p : paths) CHECK(std::filesystem::exists(p));

    // Accepted hulls reload as a valid dataset with the score columns.
    const LoadReport back = load_dataset(dir.file("accepted.csv"));
    CHECK(back.rows.rows == result.summary.accepted);
    CHECK(back.rejected.empty());

    std::size_t stl_count = 0;
    for (const std::string& p : paths) {
        if (p.size() > 4 && p.compare(p.size() - 4, 4, ".stl") == 0) ++stl_count;
    }
    CHECK(stl_count == result.summary.accepted);

    const std::string summary = testsupport::read_file(dir.file("summary.txt"));
    for (const char* key :
         {"accepted=", "rejected_range=", "rejected_feasibility=", "rejected_novelty=",
          "rejected_resistance=", "wall_seconds=", "seed="}) {
        CHECK(summary.find(key) != std::string::npos);
    }
}

TEST_CASE("distribution report separates coverage from drift") {
    const Matrix training = training_rows();

    // Generated rows drawn from the training rows themselves are fully
    // covered by the self-distance threshold.
    Matrix same(20, training.cols);
    for (std::size_t r = 0; r < 20; ++r) {
        const auto src = training.row(r * 3);
        std::copy(src.begin(), src.end(), same.row(r).begin());
    }
    const DistributionReport covered = in_distribution_report(training, same, 5, 12.0);
    CHECK(covered.in_fraction == doctest::Approx(1.0));
    CHECK(covered.threshold > 0.0);
    CHECK(covered.overlay_svg.find("<svg") != std::string::npos);
    CHECK(covered.overlay_svg.find("training") != std::string::npos);
    CHECK(covered.overlay_svg.find("generated") != std::string::npos);

    // Rows pushed far outside the hull box are all out of support.
    Matrix far = same;
    for (std::size_t r = 0; r < far.rows; ++r) {
        far(r, 0) += 1000.0; // length far beyond every training hull
    }
    const DistributionReport outside = in_distribution_report(training, far, 5, 12.0);
    CHECK(outside.in_fraction == doctest::Approx(0.0));

    Matrix empty;
    CHECK_THROWS_AS(in_distribution_report(empty, same, 5, 12.0), EmptyDataError);
    CHECK_THROWS_AS(in_distribution_report(training, empty, 5, 12.0), EmptyDataError);
    Matrix wrong(3, 7);
    CHECK_THROWS_AS(in_distribution_report(training, wrong, 5, 12.0), ArityError);
}
