#include "hullforge/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "hullforge/dataset.hpp"
#include "hullforge/errors.hpp"
#include "hullforge/geometry.hpp"
#include "hullforge/mesh.hpp"
#include "hullforge/svg.hpp"
#include "hullforge/tsne.hpp"

namespace hullforge {

namespace {

std::string stage_name(RejectStage stage) {
    switch (stage) {
    case RejectStage::none: return "accepted";
    case RejectStage::range: return "range";
    case RejectStage::feasibility: return "feasibility";
    case RejectStage::novelty: return "novelty";
    case RejectStage::resistance: return "resistance";
    }
    return "unknown";
}

std::string join_checks(const std::vector<std::string>& checks) {
    std::string out;
    for (const auto& c : checks) {
        if (!out.empty()) out += "; ";
        out += c;
    }
    return out;
}

// Commas would break the attempts CSV; the detail column is free text.
std::string csv_safe(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

} // namespace

GenerationResult run_generation(const Matrix& training, const GenerationConfig& cfg) {
    if (training.rows == 0) throw EmptyDataError("training set is empty");
    GmmModel model;
    if (cfg.components > 0) {
        model = fit_gmm(training, cfg.components, cfg.seed);
    } else {
        model = select_gmm(training, 1, std::min<std::size_t>(12, training.rows), cfg.seed).best;
    }
    return run_generation(training, cfg, model);
}

GenerationResult run_generation(const Matrix& training, const GenerationConfig& cfg,
                                const GmmModel& model) {
    if (training.rows == 0) throw EmptyDataError("training set is empty");
    if (cfg.count < 1) throw DomainError("count must be at least 1");
    if (!(cfg.speed_knots > 0.0)) throw DomainError("speed must be positive");
    const std::size_t budget = cfg.max_attempts == 0 ? 200 * cfg.count : cfg.max_attempts;
    if (budget < cfg.count) throw DomainError("attempt budget is below the requested count");

    const auto t0 = std::chrono::steady_clock::now();
    FluidEnvironment env;
    env.rho = cfg.rho;
    const double speed = cfg.speed_knots * kKnot;

    GenerationResult result;
    result.model = model;
    GenerationSummary& sum = result.summary;
    sum.seed = cfg.seed;

    GmmSampler sampler(model, cfg.seed);
    std::vector<double> draw(kParamCount);
    std::unordered_map<std::uint64_t, DragTable> table_memo;
    std::size_t accepted = 0;

    for (std::size_t attempt = 0; attempt < budget; ++attempt) {
        if (!cfg.rank_by_rt && accepted >= cfg.count) break;

        GenerationRecord rec;
        rec.attempt_index = attempt;
        sampler.draw(draw);
        std::copy(draw.begin(), draw.end(), rec.params.begin());

        HullParameters p;
        try {
            p = validate_params(draw);
            rec.valid = true;
        } catch (const Error& e) {
            rec.rejected_at = RejectStage::range;
            rec.reject_detail = e.what();
            sum.rejected_range++;
            result.records.push_back(std::move(rec));
            continue;
        }

        const FeasibilityReport feas = feasibility_check(p);
        rec.feasible = feas.feasible;
        if (!feas.feasible) {
            rec.rejected_at = RejectStage::feasibility;
            rec.reject_detail = join_checks(feas.violated_checks);
            sum.rejected_feasibility++;
            result.records.push_back(std::move(rec));
            continue;
        }

        const NoveltyResult novelty =
            novelty_check(draw, training, model.normalizer, cfg.novelty_epsilon);
        rec.novelty_distance = novelty.nearest_distance;
        if (!novelty.is_novel) {
            rec.rejected_at = RejectStage::novelty;
            rec.reject_detail = "nearest training distance at or below epsilon";
            sum.rejected_novelty++;
            result.records.push_back(std::move(rec));
            continue;
        }

        const double draft =
            cfg.draft_m ? *cfg.draft_m : cfg.draft_fraction * p.depth();
        try {
            auto it = table_memo.find(p.hash());
            if (it == table_memo.end()) {
                it = table_memo.emplace(p.hash(), build_drag_table(p, env)).first;
            }
            const DragResult drag = calc_drag(p, it->second, speed, draft, env);
            rec.rt = drag.rt;
            rec.rw = drag.rw;
            rec.rf = drag.rf;
            rec.fn = drag.fn;
        } catch (const Error& e) {
            // Solver and draft failures count as resistance rejections:
            // the candidate could not demonstrate rt below target.
            rec.rejected_at = RejectStage::resistance;
            rec.reject_detail = e.what();
            sum.rejected_resistance++;
            result.records.push_back(std::move(rec));
            continue;
        }

        if (rec.rt < cfg.target_rt) {
            rec.accepted = true;
            ++accepted;
        } else {
            rec.rejected_at = RejectStage::resistance;
            rec.reject_detail = "rt at or above target";
            sum.rejected_resistance++;
        }
        result.records.push_back(std::move(rec));
    }

    if (cfg.rank_by_rt && accepted > cfg.count) {
        // Keep the lowest-resistance `count`; the rest fold back into
        // resistance rejections.
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < result.records.size(); ++i) {
            if (result.records[i].accepted) idx.push_back(i);
        }
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (result.records[a].rt != result.records[b].rt) {
                return result.records[a].rt < result.records[b].rt;
            }
            return a < b;
        });
        for (std::size_t r = cfg.count; r < idx.size(); ++r) {
            GenerationRecord& rec = result.records[idx[r]];
            rec.accepted = false;
            rec.rejected_at = RejectStage::resistance;
            rec.reject_detail = "outranked by lower-resistance candidates";
            sum.rejected_resistance++;
        }
        accepted = cfg.count;
    }

    sum.accepted = accepted;
    sum.attempts = result.records.size();
    sum.budget_exhausted = accepted < cfg.count;
    sum.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

DistributionReport in_distribution_report(const Matrix& training, const Matrix& generated,
                                          std::uint64_t seed, double perplexity) {
    if (training.rows == 0 || generated.rows == 0) {
        throw EmptyDataError("distribution report needs both datasets");
    }
    if (training.cols != generated.cols) {
        throw ArityError("training and generated dimensionality differ");
    }
    const Normalizer norm = Normalizer::fit(training);
    const std::size_t d = training.cols;
    const std::size_t n_train = training.rows;
    const std::size_t n_gen = generated.rows;

    Matrix joint(n_train + n_gen, d);
    for (std::size_t r = 0; r < n_train; ++r) norm.apply(training.row(r), joint.row(r));
    for (std::size_t r = 0; r < n_gen; ++r) {
        norm.apply(generated.row(r), joint.row(n_train + r));
    }

    DistributionReport report;

    // Training self-NN scale, then generated coverage against it.
    auto nn_dist = [&](std::span<const double> x, std::size_t skip) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < n_train; ++r) {
            if (r == skip) continue;
            double s = 0.0;
            const auto row = joint.row(r);
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = x[c] - row[c];
                s += diff * diff;
            }
            best = std::min(best, s);
        }
        return std::isfinite(best) ? std::sqrt(best) : 0.0;
    };
    std::vector<double> self_nn(n_train, 0.0);
    parallel_for(n_train, [&](std::size_t r) { self_nn[r] = nn_dist(joint.row(r), r); });
    std::sort(self_nn.begin(), self_nn.end());
    const std::size_t q_idx = std::min(
        n_train - 1, static_cast<std::size_t>(std::floor(0.95 * static_cast<double>(n_train))));
    report.threshold = self_nn[q_idx];

    std::vector<char> covered(n_gen, 0);
    parallel_for(n_gen, [&](std::size_t r) {
        covered[r] = nn_dist(joint.row(n_train + r), n_train) <= report.threshold ? 1 : 0;
    });
    std::size_t hits = 0;
    for (const char c : covered) hits += static_cast<std::size_t>(c);
    report.in_fraction = static_cast<double>(hits) / static_cast<double>(n_gen);

    const EmbeddingResult emb = tsne_embed(joint, perplexity, 1000, seed);
    SvgSeries train_series, gen_series;
    train_series.label = "training (" + std::to_string(n_train) + ")";
    train_series.color = "#1f77b4";
    gen_series.label = "generated (" + std::to_string(n_gen) + ")";
    gen_series.color = "#d62728";
    for (std::size_t r = 0; r < n_train; ++r) {
        train_series.x.push_back(emb.coords(r, 0));
        train_series.y.push_back(emb.coords(r, 1));
    }
    for (std::size_t r = 0; r < n_gen; ++r) {
        gen_series.x.push_back(emb.coords(n_train + r, 0));
        gen_series.y.push_back(emb.coords(n_train + r, 1));
    }
    report.overlay_svg = svg_scatter("Training vs generated embedding", "tsne_1", "tsne_2",
                                     {train_series, gen_series});
    return report;
}

std::vector<std::string> persist_results(const GenerationResult& result, const Matrix& training,
                                         const std::string& out_dir, const PersistOptions& opts) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

    std::vector<std::string> written;
    std::vector<const GenerationRecord*> accepted;
    for (const auto& rec : result.records) {
        if (rec.accepted) accepted.push_back(&rec);
    }

    // accepted.csv: canonical schema plus the scoring columns.
    Matrix rows(accepted.size(), kParamCount);
    Matrix extra(accepted.size(), 5);
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        std::copy(accepted[i]->params.begin(), accepted[i]->params.end(), rows.row(i).begin());
        extra(i, 0) = accepted[i]->rt;
        extra(i, 1) = accepted[i]->rw;
        extra(i, 2) = accepted[i]->rf;
        extra(i, 3) = accepted[i]->fn;
        extra(i, 4) = accepted[i]->novelty_distance;
    }
    const std::string accepted_path = (fs::path(out_dir) / "accepted.csv").string();
    save_dataset(accepted_path, rows, {"Rt_N", "Rw_N", "Rf_N", "Fn", "novelty_dist"}, extra);
    written.push_back(accepted_path);

    // attempts.csv: one row per sampled candidate.
    const std::string attempts_path = (fs::path(out_dir) / "attempts.csv").string();
    {
        std::ofstream os(attempts_path);
        if (!os) throw IoError("cannot open for writing: " + attempts_path);
        os << "attempt,stage,accepted,novelty_dist,Rt_N,Rw_N,Rf_N,Fn";
        for (const auto& name : param_names()) os << "," << name;
        os << ",detail\n";
        for (const auto& rec : result.records) {
            os << rec.attempt_index << "," << stage_name(rec.rejected_at) << ","
               << (rec.accepted ? 1 : 0) << "," << format_double(rec.novelty_distance) << ","
               << format_double(rec.rt) << "," << format_double(rec.rw) << ","
               << format_double(rec.rf) << "," << format_double(rec.fn);
            for (const double v : rec.params) os << "," << format_double(v);
            os << "," << csv_safe(rec.reject_detail) << "\n";
        }
        if (!os) throw IoError("write failed: " + attempts_path);
    }
    written.push_back(attempts_path);

    // summary.txt: wall_seconds varies run to run by nature; every other
    // artifact is byte-stable for a fixed seed.
    const std::string summary_path = (fs::path(out_dir) / "summary.txt").string();
    {
        const GenerationSummary& s = result.summary;
        std::ofstream os(summary_path);
        if (!os) throw IoError("cannot open for writing: " + summary_path);
        os << "accepted=" << s.accepted << "\n";
        os << "rejected_range=" << s.rejected_range << "\n";
        os << "rejected_feasibility=" << s.rejected_feasibility << "\n";
        os << "rejected_novelty=" << s.rejected_novelty << "\n";
        os << "rejected_resistance=" << s.rejected_resistance << "\n";
        os << "wall_seconds=" << format_double(s.wall_seconds) << "\n";
        os << "seed=" << s.seed << "\n";
        os << "attempts=" << s.attempts << "\n";
        const double rate = s.attempts == 0
                                ? 0.0
                                : static_cast<double>(s.accepted) / static_cast<double>(s.attempts);
        os << "acceptance_rate=" << format_double(rate) << "\n";
        os << "budget_exhausted=" << (s.budget_exhausted ? "true" : "false") << "\n";
        if (!os) throw IoError("write failed: " + summary_path);
    }
    written.push_back(summary_path);

    if (opts.emit_stl) {
        for (std::size_t i = 0; i < accepted.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "hull_%04zu.stl", i);
            const std::string stl_path = (fs::path(out_dir) / name).string();
            const HullParameters p = validate_params(
                std::span<const double>(accepted[i]->params.data(), kParamCount));
            write_stl(build_mesh(p), stl_path);
            written.push_back(stl_path);
        }
    }

    if (opts.emit_overlay && !accepted.empty()) {
        const std::size_t n_joint = training.rows + accepted.size();
        // Perplexity must leave room: n >= 3*perplexity.
        const double perp =
            std::min(30.0, std::floor(static_cast<double>(n_joint) / 3.0));
        if (perp >= 2.0) {
            const DistributionReport rep =
                in_distribution_report(training, rows, opts.overlay_seed, perp);
            const std::string overlay_path = (fs::path(out_dir) / "overlay.svg").string();
            write_text_file(overlay_path, rep.overlay_svg);
            written.push_back(overlay_path);
            const std::string dist_path = (fs::path(out_dir) / "distribution.txt").string();
            std::ofstream os(dist_path);
            if (!os) throw IoError("cannot open for writing: " + dist_path);
            os << "in_fraction=" << format_double(rep.in_fraction) << "\n";
            os << "threshold=" << format_double(rep.threshold) << "\n";
            written.push_back(dist_path);
        }
    }
    return written;
}

} // namespace hullforge
