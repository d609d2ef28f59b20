#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

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
#include "hullforge/svg.hpp"
#include "hullforge/tsne.hpp"

namespace hf = hullforge;
namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool quiet = false;
};

void diag(const GlobalOpts& g, const std::string& line) {
    if (!g.quiet) std::cerr << line << "\n";
}

// Loads a dataset and insists on at least one valid row; dropped rows
// are reported on stderr so downstream indices stay explainable.
hf::Matrix load_rows(const std::string& path, const GlobalOpts& g) {
    const hf::LoadReport rep = hf::load_dataset(path);
    for (const auto& issue : rep.rejected) {
        diag(g, "dropped line " + std::to_string(issue.line) + ": " + issue.message);
    }
    if (rep.rows.rows == 0) throw hf::EmptyDataError("no valid rows in " + path);
    return rep.rows;
}

hf::HullParameters row_params(const hf::Matrix& rows, std::size_t row) {
    if (row >= rows.rows) {
        throw hf::DomainError("row " + std::to_string(row) + " out of range (" +
                              std::to_string(rows.rows) + " valid rows)");
    }
    return hf::validate_params(rows.row(row));
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw hf::IoError("cannot create output directory " + dir + ": " + ec.message());
}

int cmd_validate(const std::string& path, const GlobalOpts& g) {
    const hf::LoadReport rep = hf::load_dataset(path);
    for (const auto& issue : rep.rejected) {
        if (!g.quiet) std::cout << "row_" << issue.line << "=invalid\n";
        diag(g, "line " + std::to_string(issue.line) + ": " + issue.message);
    }
    std::cout << "valid=" << rep.rows.rows << " invalid=" << rep.rejected.size() << "\n";
    return 0;
}

int cmd_mesh(const std::string& path, std::size_t row, int nx, int nz,
             const std::string& out_dir, const GlobalOpts& g) {
    const hf::Matrix rows = load_rows(path, g);
    const hf::HullParameters p = row_params(rows, row);
    const hf::TriMesh mesh = hf::build_mesh(p, nx, nz);
    ensure_dir(out_dir);
    char name[32];
    std::snprintf(name, sizeof(name), "hull_%04zu.stl", row);
    const std::string stl_path = join_path(out_dir, name);
    hf::write_stl(mesh, stl_path);
    std::cout << "vertices=" << mesh.vertices.size() << " triangles=" << mesh.triangles.size()
              << " volume=" << hf::format_double(mesh.signed_volume())
              << " path=" << stl_path << "\n";
    return 0;
}

int cmd_cluster(const std::string& path, std::size_t k_max, const std::string& out_dir,
                const GlobalOpts& g) {
    const hf::Matrix rows = load_rows(path, g);
    const hf::Normalizer norm = hf::Normalizer::fit(rows);
    const hf::Matrix data = norm.apply(rows);

    const hf::ElbowResult elbow = hf::elbow_scan(data, k_max, g.seed);

    std::vector<double> sil_scores;
    std::vector<std::string> sil_labels;
    std::size_t sil_k = 2;
    double sil_best = -2.0;
    for (std::size_t k = 2; k <= k_max; ++k) {
        const hf::KMeansModel km = hf::kmeans(data, k, g.seed);
        const double score = hf::silhouette_score(data, km.labels).mean;
        sil_scores.push_back(score);
        sil_labels.push_back(std::to_string(k));
        if (score > sil_best) {
            sil_best = score;
            sil_k = k;
        }
    }

    ensure_dir(out_dir);
    {
        hf::SvgSeries wcss;
        wcss.label = "wcss";
        wcss.color = "#1f77b4";
        for (const auto& [k, v] : elbow.curve) {
            wcss.x.push_back(static_cast<double>(k));
            wcss.y.push_back(v);
        }
        const int marked = static_cast<int>(elbow.suggested_k) - 1;
        hf::write_text_file(join_path(out_dir, "elbow.svg"),
                            hf::svg_line_chart("Within-cluster sum of squares", "k", "wcss",
                                               {wcss}, marked));
    }
    {
        const int marked = static_cast<int>(sil_k) - 2;
        hf::write_text_file(join_path(out_dir, "silhouette.svg"),
                            hf::svg_bar_chart("Mean silhouette by cluster count", "k",
                                              "mean silhouette", sil_scores, sil_labels, marked));
    }
    {
        std::string report;
        report += "elbow_k=" + std::to_string(elbow.suggested_k) + "\n";
        report += "elbow_confident=" + std::string(elbow.confident ? "true" : "false") + "\n";
        report += "silhouette_k=" + std::to_string(sil_k) + "\n";
        for (std::size_t i = 0; i < elbow.curve.size(); ++i) {
            report += "wcss_k" + std::to_string(elbow.curve[i].first) + "=" +
                      hf::format_double(elbow.curve[i].second) + "\n";
        }
        for (std::size_t i = 0; i < sil_scores.size(); ++i) {
            report += "silhouette_k" + sil_labels[i] + "=" + hf::format_double(sil_scores[i]) +
                      "\n";
        }
        hf::write_text_file(join_path(out_dir, "cluster_report.txt"), report);
    }
    std::cout << "elbow_k=" << elbow.suggested_k << " silhouette_k=" << sil_k << "\n";
    return 0;
}

int cmd_embed(const std::string& path, double perplexity, bool perplexity_set, int iters,
              const std::string& out_dir, const GlobalOpts& g) {
    const hf::Matrix rows = load_rows(path, g);
    const hf::Normalizer norm = hf::Normalizer::fit(rows);
    const hf::Matrix data = norm.apply(rows);
    if (!perplexity_set) {
        // Default perplexity shrinks with the dataset so small files
        // still embed; an explicit flag is taken literally.
        perplexity = std::min(perplexity,
                              std::floor(static_cast<double>(data.rows) / 3.0));
    }
    const hf::EmbeddingResult emb = hf::tsne_embed(data, perplexity, iters, g.seed);

    ensure_dir(out_dir);
    hf::write_csv(join_path(out_dir, "embedding.csv"), {"tsne_1", "tsne_2"}, emb.coords);
    hf::SvgSeries series;
    series.label = "rows (" + std::to_string(data.rows) + ")";
    series.color = "#1f77b4";
    for (std::size_t r = 0; r < emb.coords.rows; ++r) {
        series.x.push_back(emb.coords(r, 0));
        series.y.push_back(emb.coords(r, 1));
    }
    hf::write_text_file(join_path(out_dir, "embedding.svg"),
                        hf::svg_scatter("t-SNE embedding", "tsne_1", "tsne_2", {series}));
    std::cout << "initial_kl=" << hf::format_double(emb.initial_kl)
              << " final_kl=" << hf::format_double(emb.final_kl) << "\n";
    return 0;
}

int cmd_fit(const std::string& path, std::size_t components, std::size_t k_min, std::size_t k_max,
            const std::string& out_dir, std::string model_path, const GlobalOpts& g) {
    const hf::Matrix rows = load_rows(path, g);
    ensure_dir(out_dir);
    if (model_path.empty()) model_path = join_path(out_dir, "model.gmm");

    hf::GmmModel model;
    if (components > 0) {
        if (rows.rows <= components * rows.cols && !g.quiet) {
            std::cerr << "warning: " << rows.rows << " rows is thin for " << components
                      << " full-covariance components in " << rows.cols
                      << " dimensions; the fit may be unstable\n";
        }
        model = hf::fit_gmm(rows, components, g.seed);
    } else {
        const hf::GmmSelection sel = hf::select_gmm(rows, k_min, k_max, g.seed);
        model = sel.best;
        hf::SvgSeries bic;
        bic.label = "bic";
        bic.color = "#1f77b4";
        int marked = -1;
        for (std::size_t i = 0; i < sel.bic_curve.size(); ++i) {
            bic.x.push_back(static_cast<double>(sel.bic_curve[i].first));
            bic.y.push_back(sel.bic_curve[i].second);
            if (sel.bic_curve[i].first == model.k) marked = static_cast<int>(i);
        }
        hf::write_text_file(join_path(out_dir, "bic.svg"),
                            hf::svg_line_chart("Bayesian information criterion", "components",
                                               "bic", {bic}, marked));
    }
    model.save(model_path);
    std::cout << "components=" << model.k
              << " train_loglik=" << hf::format_double(model.train_loglik)
              << " path=" << model_path << "\n";
    return 0;
}

int cmd_sample(const std::string& model_path, std::size_t count, const std::string& out_dir,
               std::string out_csv, const GlobalOpts& g) {
    const hf::GmmModel model = hf::GmmModel::load(model_path);
    ensure_dir(out_dir);
    if (out_csv.empty()) out_csv = join_path(out_dir, "samples.csv");

    hf::GmmSampler sampler(model, g.seed);
    hf::Matrix samples(count, hf::kParamCount);
    std::vector<double> draw(hf::kParamCount);
    std::size_t attempts = 0;
    for (std::size_t i = 0; i < count; ++i) {
        bool ok = false;
        for (int tries = 0; tries < 1000; ++tries) {
            ++attempts;
            sampler.draw(draw);
            try {
                hf::validate_params(draw);
            } catch (const hf::Error&) {
                continue;
            }
            std::copy(draw.begin(), draw.end(), samples.row(i).begin());
            ok = true;
            break;
        }
        if (!ok) {
            throw hf::DomainError("1000 consecutive draws failed range validation; "
                                  "the model mass sits outside the valid box");
        }
    }
    hf::save_dataset(out_csv, samples);
    std::cout << "samples=" << count << " attempts=" << attempts << " path=" << out_csv << "\n";
    return 0;
}

int cmd_drag(const std::string& path, std::size_t row, double speed_kts, double draft_frac,
             std::optional<double> draft_m, double rho, const std::string& table_in,
             const std::string& table_out, const GlobalOpts& g) {
    const hf::Matrix rows = load_rows(path, g);
    const hf::HullParameters p = row_params(rows, row);
    hf::FluidEnvironment env;
    env.rho = rho;

    hf::DragTable table;
    if (!table_in.empty()) {
        table = hf::read_drag_table(table_in);
    } else {
        table = hf::build_drag_table(p, env);
    }
    if (!table_out.empty()) {
        if (const fs::path parent = fs::path(table_out).parent_path(); !parent.empty()) {
            ensure_dir(parent.string());
        }
        hf::write_drag_table(table, table_out);
    }

    const double speed = speed_kts * hf::kKnot;
    const double draft = draft_m ? *draft_m : draft_frac * p.depth();
    const hf::DragResult r = hf::calc_drag(p, table, speed, draft, env);
    std::cout << "Rt=" << hf::format_double(r.rt) << " Rw=" << hf::format_double(r.rw)
              << " Rf=" << hf::format_double(r.rf) << " Fn=" << hf::format_double(r.fn) << "\n";
    return 0;
}

int cmd_generate(const std::string& path, const hf::GenerationConfig& cfg, bool emit_stl,
                 bool no_overlay, const std::string& out_dir, const GlobalOpts& g) {
    const hf::Matrix training = load_rows(path, g);
    const hf::GenerationResult result = hf::run_generation(training, cfg);

    hf::PersistOptions popts;
    popts.emit_stl = emit_stl;
    popts.emit_overlay = !no_overlay;
    popts.overlay_seed = cfg.seed;
    const std::vector<std::string> written = persist_results(result, training, out_dir, popts);
    for (const auto& p : written) diag(g, "wrote " + p);

    std::cout << "accepted=" << result.summary.accepted
              << " attempts=" << result.summary.attempts
              << " seconds=" << hf::format_double(result.summary.wall_seconds) << "\n";
    if (result.summary.budget_exhausted) {
        std::cerr << "error=BudgetExhausted: accepted " << result.summary.accepted << " of "
                  << cfg.count << " before the attempt budget ran out\n";
        return 1;
    }
    return 0;
}

int cmd_report(const std::string& train_path, const std::string& gen_path, double perplexity,
               bool perplexity_set, const std::string& out_dir, const GlobalOpts& g) {
    const hf::Matrix training = load_rows(train_path, g);
    const hf::Matrix generated = load_rows(gen_path, g);
    if (!perplexity_set) {
        const double n = static_cast<double>(training.rows + generated.rows);
        perplexity = std::min(perplexity, std::floor(n / 3.0));
    }
    const hf::DistributionReport rep =
        hf::in_distribution_report(training, generated, g.seed, perplexity);

    ensure_dir(out_dir);
    hf::write_text_file(join_path(out_dir, "overlay.svg"), rep.overlay_svg);
    std::string txt;
    txt += "in_fraction=" + hf::format_double(rep.in_fraction) + "\n";
    txt += "threshold=" + hf::format_double(rep.threshold) + "\n";
    hf::write_text_file(join_path(out_dir, "report.txt"), txt);

    std::cout << "in_fraction=" << hf::format_double(rep.in_fraction)
              << " threshold=" << hf::format_double(rep.threshold) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hullforge: parametric hull generation, resistance scoring and "
                 "distribution-aware sampling"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--seed", g.seed, "Random seed (env HULLFORGE_SEED when omitted)")
        ->envname("HULLFORGE_SEED");
    app.add_option("--threads", g.threads, "Worker threads, 0 = hardware");
    app.add_flag("--quiet", g.quiet, "Suppress diagnostics and per-row output");

    std::function<int()> action;

    {
        auto* c = app.add_subcommand("validate", "Check a hull parameter CSV row by row");
        auto csv = std::make_shared<std::string>();
        c->add_option("csv", *csv, "Hull parameter CSV")->required();
        c->callback([&, csv] { action = [&, csv] { return cmd_validate(*csv, g); }; });
    }
    {
        auto* c = app.add_subcommand("mesh", "Triangulate one hull row to a binary STL");
        auto csv = std::make_shared<std::string>();
        auto row = std::make_shared<std::size_t>(0);
        auto nx = std::make_shared<int>(80);
        auto nz = std::make_shared<int>(40);
        auto out_dir = std::make_shared<std::string>("out");
        c->add_option("csv", *csv, "Hull parameter CSV")->required();
        c->add_option("--row", *row, "Valid-row index");
        c->add_option("--nx", *nx, "Stations along the length")->check(CLI::Range(4, 100000));
        c->add_option("--nz", *nz, "Waterlines over the depth")->check(CLI::Range(4, 100000));
        c->add_option("--out-dir", *out_dir, "Output directory");
        c->callback([&, csv, row, nx, nz, out_dir] {
            action = [&, csv, row, nx, nz, out_dir] {
                return cmd_mesh(*csv, *row, *nx, *nz, *out_dir, g);
            };
        });
    }
    {
        auto* c = app.add_subcommand("cluster", "Elbow and silhouette scan over k-means");
        auto csv = std::make_shared<std::string>();
        auto k_max = std::make_shared<std::size_t>(12);
        auto out_dir = std::make_shared<std::string>("out");
        c->add_option("csv", *csv, "Hull parameter CSV")->required();
        c->add_option("--k-max", *k_max, "Largest cluster count to scan (at least 3)")
            ->check(CLI::Range(static_cast<std::size_t>(3), static_cast<std::size_t>(1000)));
        c->add_option("--out-dir", *out_dir, "Output directory");
        c->callback([&, csv, k_max, out_dir] {
            action = [&, csv, k_max, out_dir] { return cmd_cluster(*csv, *k_max, *out_dir, g); };
        });
    }
    {
        auto* c = app.add_subcommand("embed", "t-SNE embedding of a dataset");
        auto csv = std::make_shared<std::string>();
        auto perplexity = std::make_shared<double>(30.0);
        auto iters = std::make_shared<int>(1000);
        auto out_dir = std::make_shared<std::string>("out");
        c->add_option("csv", *csv, "Hull parameter CSV")->required();
        auto* perp_opt = c->add_option("--perplexity", *perplexity, "t-SNE perplexity");
        c->add_option("--iters", *iters, "Gradient iterations")->check(CLI::Range(1, 100000));
        c->add_option("--out-dir", *out_dir, "Output directory");
        c->callback([&, csv, perplexity, iters, out_dir, perp_opt] {
            action = [&, csv, perplexity, iters, out_dir, perp_opt] {
                return cmd_embed(*csv, *perplexity, perp_opt->count() > 0, *iters, *out_dir, g);
            };
        });
    }
    {
        auto* c = app.add_subcommand("fit", "Fit a Gaussian mixture to a dataset");
        auto csv = std::make_shared<std::string>();
        auto components = std::make_shared<std::size_t>(0);
        auto k_min = std::make_shared<std::size_t>(1);
        auto k_max = std::make_shared<std::size_t>(12);
        auto out_dir = std::make_shared<std::string>("out");
        auto model_path = std::make_shared<std::string>();
        c->add_option("csv", *csv, "Hull parameter CSV")->required();
        c->add_option("--components", *components, "Component count, 0 = pick by BIC");
        c->add_option("--k-min", *k_min, "Smallest k for BIC selection");
        c->add_option("--k-max", *k_max, "Largest k for BIC selection");
        c->add_option("--out-dir", *out_dir, "Output directory");
        c->add_option("--out", *model_path, "Model file path (default <out-dir>/model.gmm)");
        c->callback([&, csv, components, k_min, k_max, out_dir, model_path] {
            action = [&, csv, components, k_min, k_max, out_dir, model_path] {
                return cmd_fit(*csv, *components, *k_min, *k_max, *out_dir, *model_path, g);
            };
        });
    }
    {
        auto* c = app.add_subcommand("sample", "Draw valid hulls from a fitted model");
        auto model_path = std::make_shared<std::string>();
        auto count = std::make_shared<std::size_t>(10);
        auto out_dir = std::make_shared<std::string>("out");
        auto out_csv = std::make_shared<std::string>();
        c->add_option("model", *model_path, "Model file from fit")->required();
        c->add_option("--count", *count, "Samples to draw")
            ->check(CLI::Range(static_cast<std::size_t>(1), static_cast<std::size_t>(1000000)));
        c->add_option("--out-dir", *out_dir, "Output directory");
        c->add_option("--out", *out_csv, "Sample CSV path (default <out-dir>/samples.csv)");
        c->callback([&, model_path, count, out_dir, out_csv] {
            action = [&, model_path, count, out_dir, out_csv] {
                return cmd_sample(*model_path, *count, *out_dir, *out_csv, g);
            };
        });
    }
    {
        auto* c = app.add_subcommand("drag", "Resistance of one hull row at speed");
        auto csv = std::make_shared<std::string>();
        auto row = std::make_shared<std::size_t>(0);
        auto speed_kts = std::make_shared<double>(10.0);
        auto draft_frac = std::make_shared<double>(0.6);
        auto draft_m = std::make_shared<double>(0.0);
        auto rho = std::make_shared<double>(1025.0);
        auto table_in = std::make_shared<std::string>();
        auto table_out = std::make_shared<std::string>();
        c->add_option("csv", *csv, "Hull parameter CSV")->required();
        c->add_option("--row", *row, "Valid-row index");
        c->add_option("--speed-kts", *speed_kts, "Speed in knots");
        c->add_option("--draft-frac", *draft_frac, "Draft as a fraction of depth");
        auto* dm_opt = c->add_option("--draft-m", *draft_m, "Absolute draft in meters");
        c->add_option("--rho", *rho, "Water density kg/m^3");
        c->add_option("--table", *table_in, "Read a precomputed drag table");
        c->add_option("--save-table", *table_out, "Write the drag table used");
        c->callback([&, csv, row, speed_kts, draft_frac, draft_m, rho, table_in, table_out,
                     dm_opt] {
            action = [&, csv, row, speed_kts, draft_frac, draft_m, rho, table_in, table_out,
                      dm_opt] {
                std::optional<double> dm;
                if (dm_opt->count() > 0) dm = *draft_m;
                return cmd_drag(*csv, *row, *speed_kts, *draft_frac, dm, *rho, *table_in,
                                *table_out, g);
            };
        });
    }
    {
        auto* c = app.add_subcommand("generate", "Full sample-validate-score pipeline");
        auto csv = std::make_shared<std::string>();
        auto cfg = std::make_shared<hf::GenerationConfig>();
        auto draft_m = std::make_shared<double>(0.0);
        auto emit_stl = std::make_shared<bool>(false);
        auto no_overlay = std::make_shared<bool>(false);
        auto out_dir = std::make_shared<std::string>("out");
        c->add_option("csv", *csv, "Training hull CSV")->required();
        c->add_option("--target-rt", cfg->target_rt, "Acceptance threshold in newtons");
        c->add_option("--speed-kts", cfg->speed_knots, "Operating speed in knots");
        c->add_option("--draft-frac", cfg->draft_fraction, "Draft as a fraction of depth");
        auto* dm_opt = c->add_option("--draft-m", *draft_m, "Absolute draft in meters");
        c->add_option("--count", cfg->count, "Hulls to accept")
            ->check(CLI::Range(static_cast<std::size_t>(1), static_cast<std::size_t>(1000000)));
        c->add_option("--rho", cfg->rho, "Water density kg/m^3");
        c->add_option("--max-attempts", cfg->max_attempts, "Attempt budget, 0 = 200 per hull");
        c->add_option("--components", cfg->components, "Mixture components, 0 = pick by BIC");
        c->add_option("--novelty-eps", cfg->novelty_epsilon,
                      "Minimum normalized distance to training rows");
        c->add_flag("--rank-by-rt", cfg->rank_by_rt,
                    "Spend the whole budget, keep the lowest-resistance hulls");
        c->add_flag("--emit-stl", *emit_stl, "Write an STL per accepted hull");
        c->add_flag("--no-overlay", *no_overlay, "Skip the embedding overlay");
        c->add_option("--out-dir", *out_dir, "Output directory");
        c->callback([&, csv, cfg, draft_m, emit_stl, no_overlay, out_dir, dm_opt] {
            action = [&, csv, cfg, draft_m, emit_stl, no_overlay, out_dir, dm_opt] {
                cfg->seed = g.seed;
                if (dm_opt->count() > 0) cfg->draft_m = *draft_m;
                return cmd_generate(*csv, *cfg, *emit_stl, *no_overlay, *out_dir, g);
            };
        });
    }
    {
        auto* c = app.add_subcommand("report", "Training vs generated distribution overlay");
        auto train_csv = std::make_shared<std::string>();
        auto gen_csv = std::make_shared<std::string>();
        auto perplexity = std::make_shared<double>(30.0);
        auto out_dir = std::make_shared<std::string>("out");
        c->add_option("training", *train_csv, "Training hull CSV")->required();
        c->add_option("generated", *gen_csv, "Generated hull CSV")->required();
        auto* perp_opt = c->add_option("--perplexity", *perplexity, "t-SNE perplexity");
        c->add_option("--out-dir", *out_dir, "Output directory");
        c->callback([&, train_csv, gen_csv, perplexity, out_dir, perp_opt] {
            action = [&, train_csv, gen_csv, perplexity, out_dir, perp_opt] {
                return cmd_report(*train_csv, *gen_csv, *perplexity, perp_opt->count() > 0,
                                  *out_dir, g);
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error=Usage: " << e.what() << "\n";
        return 2;
    }

    hf::set_thread_count(g.threads);
    try {
        return action ? action() : 2;
    } catch (const hf::Error& e) {
        std::cerr << "error=" << e.kind() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error=Internal: " << e.what() << "\n";
        return 1;
    }
}
