// Release gate: one self-checking criterion per line, tolerances pinned
// here. Exit status 0 only when every criterion passes.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hullforge/common.hpp"
#include "hullforge/dataset.hpp"
#include "hullforge/errors.hpp"
#include "hullforge/geometry.hpp"
#include "hullforge/gmm.hpp"
#include "hullforge/hydro.hpp"
#include "hullforge/kmeans.hpp"
#include "hullforge/mesh.hpp"
#include "hullforge/normalize.hpp"
#include "hullforge/params.hpp"
#include "hullforge/pipeline.hpp"
#include "hullforge/tsne.hpp"

#include "support.hpp"

using namespace hullforge;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    std::ostringstream ss;
    ss.precision(3);
    ss << std::scientific << v;
    return ss.str();
}

int g_failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("unexpected exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++g_failures;
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << " " << (id < 10 ? "0" : "") << id << " " << name
         << ": " << o.detail << " (" << std::fixed;
    line.precision(1);
    line << secs << "s)";
    std::cout << line.str() << "\n" << std::flush;
}

PointGrid zero_grid() {
    PointGrid g;
    const int nx = 30, nz = 15;
    for (int i = 0; i < nx; ++i) g.x.push_back(10.0 * i / (nx - 1));
    for (int j = 0; j < nz; ++j) g.z.push_back(-0.6 + 0.6 * j / (nz - 1));
    g.y.assign(nx, std::vector<double>(nz, 0.0));
    g.draft = 0.6;
    g.lwl = 10.0;
    return g;
}

// ---- shared CLI plumbing for the determinism criterion ----

const std::string& cli_binary() {
    static const std::string bin = testsupport::env_or("HULLFORGE_BIN", "build/hullforge");
    return bin;
}

const std::string& data_dir() {
    static const std::string dir = testsupport::env_or("HULLFORGE_DATA", "data");
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = "\"" + cli_binary() + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---- criteria ----

Outcome c1_friction_line() {
    const double cf = ittc_cf(1e7);
    const double diff = std::abs(cf - 0.003);
    return {diff <= 1e-12, "|Cf(1e7)-0.003|=" + num(diff) + " <= 1e-12"};
}

Outcome c2_beam_scaling() {
    const double L = 10.0, T = 0.625;
    double worst = 0.0;
    for (const double fn : {0.2, 0.3, 0.4}) {
        const double speed = fn * std::sqrt(9.80665 * L);
        const PointGrid narrow = wigley_grid(L, 1.0, T, 60, 30);
        const PointGrid wide = wigley_grid(L, 2.0, T, 60, 30);
        const double cw1 = michell_cw(narrow, speed);
        const double cw2 = michell_cw(wide, speed);
        worst = std::max(worst, std::abs(cw2 / cw1 - 4.0) / 4.0);
    }
    return {worst <= 1e-9,
            "doubled beam quadruples Cw, worst rel err " + num(worst) + " <= 1e-9"};
}

Outcome c3_zero_hull() {
    const double cw = michell_cw(zero_grid(), 3.0);
    return {std::abs(cw) <= 1e-12, "flat grid Cw=" + num(cw) + ", |Cw| <= 1e-12"};
}

Outcome c4_quadrature_convergence() {
    const double speed = 0.3 * std::sqrt(9.80665 * 10.0);
    const PointGrid grid = wigley_grid(10.0, 1.0, 0.625, 60, 30);
    MichellOptions coarse;
    coarse.adaptive = false;
    coarse.panels = 16;
    coarse.points_per_panel = 16;
    MichellOptions fine = coarse;
    fine.panels = 32;
    fine.points_per_panel = 32;
    const double a = michell_cw(grid, speed, {}, coarse);
    const double b = michell_cw(grid, speed, {}, fine);
    const double rel = std::abs(b - a) / std::abs(a);
    return {rel < 0.01, "doubling quadrature nodes moves Cw by " + num(rel) + " < 1e-2"};
}

Outcome c5_em_recovery() {
    const std::size_t n = 2000, d = 45;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        RandomEngine rng(seed * 7919);
        Matrix data(n, d);
        for (std::size_t i = 0; i < n; ++i) {
            const bool heavy = i % 10 < 7; // true weights 0.3 / 0.7
            for (std::size_t j = 0; j < d; ++j) {
                data(i, j) = (heavy ? 5.0 : 0.0) + rng.normal();
            }
        }
        const GmmModel model = fit_gmm(data, 2, seed);

        for (std::size_t i = 1; i < model.loglik_history.size(); ++i) {
            if (model.loglik_history[i] < model.loglik_history[i - 1] - 1e-9) {
                return {false, "seed " + std::to_string(seed) + ": log-likelihood fell at EM step " +
                                   std::to_string(i)};
            }
        }

        const std::size_t light = model.weights[0] <= model.weights[1] ? 0 : 1;
        const double w_err = std::abs(model.weights[light] - 0.3);
        if (w_err > 0.05) {
            return {false, "seed " + std::to_string(seed) + ": weight error " + num(w_err) +
                               " > 0.05"};
        }

        // True centers, pushed through the fitted normalizer.
        std::vector<double> zeros(d, 0.0), fives(d, 5.0), n0(d), n5(d);
        model.normalizer.apply(zeros, n0);
        model.normalizer.apply(fives, n5);
        double m_err = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            m_err = std::max(m_err, std::abs(model.means(light, j) - n0[j]));
            m_err = std::max(m_err, std::abs(model.means(1 - light, j) - n5[j]));
        }
        if (m_err > 0.1) {
            return {false, "seed " + std::to_string(seed) + ": normalized mean error " +
                               num(m_err) + " > 0.1"};
        }
    }
    return {true, "5 seeds: ll monotone (slack 1e-9), weights within 0.05, means within 0.1"};
}

Outcome c6_cluster_count() {
    int both_right = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto [raw, truth] = testsupport::make_blobs(3000, 45, 6, 10.0, seed * 104729);
        (void)truth;
        const Matrix data = Normalizer::fit(raw).apply(raw);

        const ElbowResult elbow = elbow_scan(data, 10, seed);

        std::size_t sil_k = 2;
        double sil_best = -2.0;
        for (std::size_t k = 2; k <= 10; ++k) {
            const KMeansModel km = kmeans(data, k, seed);
            const double score = silhouette_score(data, km.labels).mean;
            if (score > sil_best) {
                sil_best = score;
                sil_k = k;
            }
        }
        if (elbow.suggested_k == 6 && sil_k == 6) ++both_right;
    }
    if (both_right < 4) {
        return {false, "elbow+silhouette agreed on k=6 in only " + std::to_string(both_right) +
                           "/5 seeds (need >= 4)"};
    }

    std::string note = std::to_string(both_right) + "/5 seeds picked k=6";
    if (const char* ship_csv = std::getenv("HULLFORGE_SHIPD_CSV")) {
        const LoadReport rep = load_dataset(ship_csv);
        const Matrix data = Normalizer::fit(rep.rows).apply(rep.rows);
        const ElbowResult elbow = elbow_scan(data, 10, 0);
        if (elbow.suggested_k != 6) {
            return {false, note + "; supplied reference dataset elbow_k=" +
                               std::to_string(elbow.suggested_k) + " != 6"};
        }
        note += "; reference dataset elbow_k=6";
    } else {
        note += "; no reference dataset supplied, external check skipped";
    }
    return {true, note};
}

Outcome c7_pipeline_soundness() {
    const auto t0 = std::chrono::steady_clock::now();
    const LoadReport rep = load_dataset(data_dir() + "/hulls_synthetic.csv");
    if (rep.rows.rows == 0) return {false, "training dataset is empty"};

    GenerationConfig cfg;
    cfg.target_rt = 5000.0;
    cfg.speed_knots = 10.0;
    cfg.rho = 1025.0;
    cfg.draft_fraction = 0.6;
    cfg.count = 150;
    cfg.seed = 42;
    const GenerationResult result = run_generation(rep.rows, cfg);

    if (result.summary.budget_exhausted || result.summary.accepted != cfg.count) {
        return {false, "accepted " + std::to_string(result.summary.accepted) + " of 150"};
    }

    // Re-score every accepted hull from scratch.
    FluidEnvironment env;
    env.rho = cfg.rho;
    const double speed = cfg.speed_knots * kKnot;
    std::size_t checked = 0;
    for (const GenerationRecord& rec : result.records) {
        if (!rec.accepted) continue;
        const HullParameters p = validate_params(rec.params);
        if (!feasibility_check(p).feasible) {
            return {false, "accepted hull " + std::to_string(rec.attempt_index) +
                               " fails the feasibility re-check"};
        }
        const NoveltyResult nov =
            novelty_check(rec.params, rep.rows, result.model.normalizer, cfg.novelty_epsilon);
        if (!nov.is_novel) {
            return {false, "accepted hull " + std::to_string(rec.attempt_index) +
                               " is a training-set duplicate"};
        }
        const DragTable table = build_drag_table(p, env);
        const DragResult drag = calc_drag(p, table, speed, cfg.draft_fraction * p.depth(), env);
        if (!(drag.rt < cfg.target_rt)) {
            return {false, "accepted hull " + std::to_string(rec.attempt_index) +
                               " re-scores rt=" + num(drag.rt) + " >= 5000"};
        }
        ++checked;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 600.0) {
        return {false, "pipeline plus re-score took " + num(secs) + "s >= 600s"};
    }
    return {true, "150/150 accepted hulls re-score rt<5000N, feasible and novel, in " +
                      std::to_string(static_cast<int>(secs)) + "s"};
}

Outcome c8_watertight_export() {
    RandomEngine rng(2024);
    testsupport::TempDir dir("acceptance-stl");
    std::size_t meshed = 0, attempts = 0;
    while (meshed < 100 && attempts < 1000) {
        ++attempts;
        std::vector<double> raw = testsupport::jitter_base(rng);
        if (attempts % 3 == 1) raw = testsupport::set_named(raw, "bit_BB", 1.0);
        if (attempts % 3 == 2) {
            raw = testsupport::set_named(raw, "bit_SB", 1.0);
            raw = testsupport::set_named(raw, "bit_EP_T", 1.0);
        }
        HullParameters p = validate_params(raw);
        if (!feasibility_check(p).feasible) continue;

        const TriMesh mesh = build_mesh(p, 64, 32);
        const std::string path = dir.file("hull.stl");
        write_stl(mesh, path);
        const TriMesh back = read_stl(path);
        const ManifoldReport m = check_manifold(back);
        if (!m.closed) {
            return {false, "hull " + std::to_string(attempts) +
                               ": exported STL has edges not shared by exactly 2 triangles"};
        }
        if (m.euler_characteristic != 2) {
            return {false, "hull " + std::to_string(attempts) + ": V-E+F=" +
                               std::to_string(m.euler_characteristic) + " != 2"};
        }
        ++meshed;
    }
    if (meshed < 100) {
        return {false, "only " + std::to_string(meshed) + " feasible hulls in " +
                           std::to_string(attempts) + " draws"};
    }
    return {true, "100/100 exported hulls closed with V-E+F=2 (" + std::to_string(attempts) +
                      " draws)"};
}

Outcome c9_embedding_sanity() {
    const auto [raw, truth] = testsupport::make_blobs(300, 45, 3, 10.0, 12345);
    const Matrix data = Normalizer::fit(raw).apply(raw);
    const EmbeddingResult emb = tsne_embed(data, 15.0, 500, 7);
    if (!(emb.final_kl < emb.initial_kl)) {
        return {false, "KL did not drop: " + num(emb.initial_kl) + " -> " + num(emb.final_kl)};
    }
    const double sil = silhouette_score(emb.coords, truth).mean;
    if (!(sil > 0.5)) {
        return {false, "embedding silhouette " + num(sil) + " <= 0.5"};
    }
    return {true, "KL " + num(emb.initial_kl) + " -> " + num(emb.final_kl) +
                      ", embedding silhouette " + num(sil) + " > 0.5"};
}

Outcome c10_determinism() {
    testsupport::TempDir dir("acceptance-det");

    // 60-row training slice keeps the repeated runs quick.
    const LoadReport rep = load_dataset(data_dir() + "/hulls_synthetic.csv");
    if (rep.rows.rows < 60) return {false, "training dataset too small"};
    Matrix subset(60, rep.rows.cols);
    for (std::size_t r = 0; r < 60; ++r) {
        const auto src = rep.rows.row(r);
        std::copy(src.begin(), src.end(), subset.row(r).begin());
    }
    const std::string csv = dir.file("train.csv");
    save_dataset(csv, subset);

    struct Step {
        std::string name;
        std::string args;                  // {out} replaced per run
        std::vector<std::string> artifacts; // relative to the out slot
    };
    const std::vector<Step> steps = {
        {"fit", "fit \"" + csv + "\" --components 2 --seed 9 --out-dir \"{out}\"",
         {"model.gmm"}},
        {"sample", "sample \"{model}\" --count 6 --seed 3 --out-dir \"{out}\"",
         {"samples.csv"}},
        {"embed", "embed \"" + csv + "\" --iters 300 --seed 5 --out-dir \"{out}\"",
         {"embedding.csv", "embedding.svg"}},
        {"generate",
         "generate \"" + csv + "\" --count 2 --components 2 --max-attempts 80 --no-overlay "
         "--seed 4242 --out-dir \"{out}\"",
         {"accepted.csv", "attempts.csv"}},
    };
    const std::vector<std::string> variants = {"", " --threads 1", " --threads 2"};

    std::string first_model;
    for (const Step& step : steps) {
        std::vector<std::string> baseline;
        for (std::size_t v = 0; v < variants.size(); ++v) {
            const std::string out = dir.file(step.name + "-" + std::to_string(v));
            std::string args = step.args + variants[v];
            auto sub = [&args](const std::string& key, const std::string& value) {
                for (auto pos = args.find(key); pos != std::string::npos;
                     pos = args.find(key)) {
                    args.replace(pos, key.size(), value);
                }
            };
            sub("{out}", out);
            sub("{model}", first_model);
            if (run_cli(args) != 0) {
                return {false, step.name + " run " + std::to_string(v) + " failed"};
            }
            for (std::size_t a = 0; a < step.artifacts.size(); ++a) {
                const std::string bytes =
                    testsupport::read_file(out + "/" + step.artifacts[a]);
                if (bytes.empty()) {
                    return {false, step.name + " wrote an empty " + step.artifacts[a]};
                }
                if (v == 0) {
                    baseline.push_back(bytes);
                } else if (bytes != baseline[a]) {
                    return {false, step.name + " " + step.artifacts[a] +
                                       " differs between identical-seed runs (variant " +
                                       std::to_string(v) + ")"};
                }
            }
            if (step.name == "fit" && v == 0) first_model = out + "/model.gmm";
        }
    }
    return {true, "fit/sample/embed/generate byte-identical across reruns and thread counts"};
}

Outcome c11_interpolation_exactness() {
    const HullParameters p = validate_params(testsupport::valid_base());
    const DragTable table = build_drag_table(p);
    if (table.froude_numbers.size() != 8 || table.draft_fractions.size() != 4) {
        return {false, "table is not 8x4"};
    }

    double node_err = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double v = interp_cw(table, table.froude_numbers[i], table.draft_fractions[j]);
            const double ref = table.cw(i, j);
            node_err = std::max(node_err,
                                std::abs(v - ref) / std::max(1.0, std::abs(ref)));
        }
    }
    if (node_err > 1e-15) {
        return {false, "node reproduction error " + num(node_err) + " > 1e-15"};
    }

    double mid_err = 0.0;
    for (std::size_t i = 0; i + 1 < 8; ++i) {
        for (std::size_t j = 0; j + 1 < 4; ++j) {
            const double fn = 0.5 * (table.froude_numbers[i] + table.froude_numbers[i + 1]);
            const double fr = 0.5 * (table.draft_fractions[j] + table.draft_fractions[j + 1]);
            const double v = interp_cw(table, fn, fr);
            const double mean4 = 0.25 * (table.cw(i, j) + table.cw(i + 1, j) +
                                         table.cw(i, j + 1) + table.cw(i + 1, j + 1));
            mid_err = std::max(mid_err,
                               std::abs(v - mean4) / std::max(1.0, std::abs(mean4)));
        }
    }
    if (mid_err > 1e-14) {
        return {false, "midpoint identity error " + num(mid_err) + " > 1e-14"};
    }
    return {true, "32 nodes exact to 1e-15, midpoint identity to 1e-14 on all interior cells"};
}

} // namespace

int main() {
    std::cout << "acceptance gate: 11 criteria\n";
    criterion(1, "friction line anchor", c1_friction_line);
    criterion(2, "wave drag beam scaling", c2_beam_scaling);
    criterion(3, "zero hull null result", c3_zero_hull);
    criterion(4, "quadrature self-convergence", c4_quadrature_convergence);
    criterion(5, "mixture recovery across seeds", c5_em_recovery);
    criterion(6, "cluster count reproduction", c6_cluster_count);
    criterion(7, "pipeline soundness end to end", c7_pipeline_soundness);
    criterion(8, "watertight mesh export", c8_watertight_export);
    criterion(9, "embedding sanity", c9_embedding_sanity);
    criterion(10, "artifact determinism", c10_determinism);
    criterion(11, "drag table interpolation exactness", c11_interpolation_exactness);

    std::cout << "passed=" << (11 - g_failures) << "/11\n";
    return g_failures == 0 ? 0 : 1;
}
