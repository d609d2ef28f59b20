#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "hullforge/dataset.hpp"
#include "hullforge/params.hpp"

#include "support.hpp"

using namespace hullforge;
using testsupport::TempDir;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

const std::string& binary() {
    static const std::string bin = testsupport::env_or("HULLFORGE_BIN", "build/hullforge");
    return bin;
}

const std::string& data_dir() {
    static const std::string dir = testsupport::env_or("HULLFORGE_DATA", "data");
    return dir;
}

// Runs the CLI through the shell with stdout/stderr captured to files.
// `prefix` lets a case inject environment assignments.
RunResult run_cli(const std::string& args, const std::string& prefix = "") {
    static TempDir io("cli-io");
    static int counter = 0;
    const std::string out_path = io.file("out" + std::to_string(counter));
    const std::string err_path = io.file("err" + std::to_string(counter));
    ++counter;

    std::string cmd = prefix;
    if (!cmd.empty()) cmd += " ";
    cmd += "\"" + binary() + "\" " + args + " > \"" + out_path + "\" 2> \"" + err_path + "\"";

    RunResult r;
    const int status = std::system(cmd.c_str());
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = testsupport::read_file(out_path);
    r.err = testsupport::read_file(err_path);
    return r;
}

// First `key=...` token value in a line-oriented output.
std::string value_of(const std::string& text, const std::string& key) {
    const auto pos = text.find(key);
    if (pos == std::string::npos) return {};
    const auto start = pos + key.size();
    auto end = text.find_first_of(" \n", start);
    if (end == std::string::npos) end = text.size();
    return text.substr(start, end - start);
}

// A 60-row slice of the committed dataset, written once per process.
const std::string& small_csv() {
    static TempDir dir("cli-data");
    static const std::string path = [] {
        const LoadReport rep = load_dataset(data_dir() + "/hulls_synthetic.csv");
        REQUIRE(rep.rows.rows >= 60);
        Matrix subset(60, rep.rows.cols);
        for (std::size_t r = 0; r < 60; ++r) {
            const auto src = rep.rows.row(r);
            std::copy(src.begin(), src.end(), subset.row(r).begin());
        }
        const std::string p = dir.file("train.csv");
        save_dataset(p, subset);
        return p;
    }();
    return path;
}

} // namespace

TEST_CASE("usage errors exit with status 2") {
    const RunResult none = run_cli("");
    CHECK(none.exit_code == 2);
    CHECK(none.err.find("error=Usage:") == 0);

    const RunResult unknown = run_cli("frobnicate");
    CHECK(unknown.exit_code == 2);

    const RunResult bad_k = run_cli("cluster \"" + small_csv() + "\" --k-max 2");
    CHECK(bad_k.exit_code == 2);
    CHECK(bad_k.err.find("error=Usage:") == 0);
}

TEST_CASE("domain errors exit with status 1 and a typed message") {
    const RunResult missing = run_cli("validate /nonexistent/hulls.csv");
    CHECK(missing.exit_code == 1);
    CHECK(missing.err.find("error=IoError:") == 0);

    const RunResult bad_row = run_cli("drag \"" + small_csv() + "\" --row 999");
    CHECK(bad_row.exit_code == 1);
    CHECK(bad_row.err.find("error=DomainError:") == 0);
}

TEST_CASE("validate counts good and bad rows") {
    const RunResult good = run_cli("validate \"" + small_csv() + "\"");
    CHECK(good.exit_code == 0);
    CHECK(good.out.find("valid=60 invalid=0") != std::string::npos);

    TempDir dir("cli-validate");
    const auto base = testsupport::valid_base();
    Matrix rows(5, kParamCount);
    for (std::size_t r = 0; r < 5; ++r) {
        std::copy(base.begin(), base.end(), rows.row(r).begin());
    }
    rows(3, static_cast<std::size_t>(param_index("LOA"))) = -5.0;
    rows(4, static_cast<std::size_t>(param_index("bit_BB"))) = 0.5;
    const std::string path = dir.file("mixed.csv");
    save_dataset(path, rows);

    const RunResult mixed = run_cli("validate \"" + path + "\"");
    CHECK(mixed.exit_code == 0);
    CHECK(mixed.out.find("row_5=invalid") != std::string::npos);
    CHECK(mixed.out.find("row_6=invalid") != std::string::npos);
    CHECK(mixed.out.find("valid=3 invalid=2") != std::string::npos);
}

TEST_CASE("mesh writes a watertight STL for a valid row") {
    TempDir dir("cli-mesh");
    const RunResult r = run_cli("mesh \"" + small_csv() + "\" --row 0 --nx 48 --nz 24 --out-dir \"" +
                                dir.str() + "\"");
    CHECK(r.exit_code == 0);
    const std::string path = value_of(r.out, "path=");
    REQUIRE(!path.empty());
    CHECK(std::filesystem::exists(path));
    CHECK(std::stod(value_of(r.out, "volume=")) > 0.0);
    CHECK(std::stoul(value_of(r.out, "triangles=")) > 100);
}

TEST_CASE("fit is reproducible byte for byte") {
    TempDir dir("cli-fit");
    const std::string m1 = dir.file("m1.gmm");
    const std::string m2 = dir.file("m2.gmm");
    const std::string base =
        "fit \"" + small_csv() + "\" --components 2 --seed 9 --out-dir \"" + dir.str() + "\"";

    const RunResult a = run_cli(base + " --out \"" + m1 + "\"");
    CHECK(a.exit_code == 0);
    CHECK(value_of(a.out, "components=") == "2");
    const RunResult b = run_cli(base + " --out \"" + m2 + "\"");
    CHECK(b.exit_code == 0);

    const std::string bytes1 = testsupport::read_file(m1);
    CHECK(!bytes1.empty());
    CHECK(bytes1 == testsupport::read_file(m2));
}

TEST_CASE("sample emits only rows that validate") {
    TempDir dir("cli-sample");
    const std::string model = dir.file("model.gmm");
    const RunResult fit = run_cli("fit \"" + small_csv() + "\" --components 2 --seed 9 --out \"" +
                                  model + "\" --out-dir \"" + dir.str() + "\"");
    REQUIRE(fit.exit_code == 0);

    const std::string csv = dir.file("samples.csv");
    const RunResult s = run_cli("sample \"" + model + "\" --count 8 --seed 3 --out \"" + csv +
                                "\" --out-dir \"" + dir.str() + "\"");
    CHECK(s.exit_code == 0);
    CHECK(value_of(s.out, "samples=") == "8");

    const LoadReport back = load_dataset(csv);
    CHECK(back.rows.rows == 8);
    CHECK(back.rejected.empty());
}

TEST_CASE("drag prints the resistance decomposition") {
    const RunResult r = run_cli("drag \"" + small_csv() + "\" --row 0 --speed-kts 10");
    CHECK(r.exit_code == 0);
    const double rt = std::stod(value_of(r.out, "Rt="));
    const double rw = std::stod(value_of(r.out, "Rw="));
    const double rf = std::stod(value_of(r.out, "Rf="));
    const double fn = std::stod(value_of(r.out, "Fn="));
    CHECK(rt == doctest::Approx(rw + rf));
    CHECK(rt > 0.0);
    CHECK(fn > 0.3);

    // A saved table reloads to the same numbers.
    TempDir dir("cli-drag");
    const std::string table = dir.file("drag.tbl");
    const RunResult saved = run_cli("drag \"" + small_csv() + "\" --row 0 --save-table \"" +
                                    table + "\"");
    CHECK(saved.exit_code == 0);
    const RunResult reread = run_cli("drag \"" + small_csv() + "\" --row 0 --table \"" + table +
                                     "\"");
    CHECK(reread.exit_code == 0);
    CHECK(value_of(reread.out, "Rt=") == value_of(saved.out, "Rt="));
}

TEST_CASE("cluster writes charts and a report") {
    TempDir dir("cli-cluster");
    const RunResult r = run_cli("cluster \"" + small_csv() + "\" --k-max 5 --seed 7 --out-dir \"" +
                                dir.str() + "\"");
    CHECK(r.exit_code == 0);
    CHECK(!value_of(r.out, "elbow_k=").empty());
    CHECK(!value_of(r.out, "silhouette_k=").empty());
    for (const char* name : {"elbow.svg", "silhouette.svg", "cluster_report.txt"}) {
        CHECK(std::filesystem::exists(dir.file(name)));
    }
    const std::string report = testsupport::read_file(dir.file("cluster_report.txt"));
    CHECK(report.find("elbow_k=") != std::string::npos);
    CHECK(report.find("wcss_k1=") != std::string::npos);
}

TEST_CASE("embed writes coordinates and a scatter plot") {
    TempDir dir("cli-embed");
    // Perplexity below the archetype cluster size so the affinities carry real
    // structure, and enough iterations past the exaggeration phase to converge.
    const RunResult r = run_cli("embed \"" + small_csv() +
                                "\" --perplexity 8 --iters 600 --seed 5 --out-dir \"" + dir.str() +
                                "\"");
    CHECK(r.exit_code == 0);
    const double initial = std::stod(value_of(r.out, "initial_kl="));
    const double final_kl = std::stod(value_of(r.out, "final_kl="));
    CHECK(final_kl < initial);
    CHECK(std::filesystem::exists(dir.file("embedding.svg")));

    std::size_t lines = 0;
    const std::string csv = testsupport::read_file(dir.file("embedding.csv"));
    for (const char ch : csv) {
        if (ch == '\n') ++lines;
    }
    CHECK(lines == 61); // header plus one line per row
}

TEST_CASE("generate is reproducible across seeds sources and thread counts") {
    TempDir dir("cli-generate");
    const std::string common = "generate \"" + small_csv() +
                               "\" --count 2 --components 2 --max-attempts 80 --no-overlay "
                               "--out-dir \"";

    const RunResult a = run_cli(common + dir.file("a") + "\" --seed 4242");
    CHECK(a.exit_code == 0);
    CHECK(value_of(a.out, "accepted=") == "2");
    CHECK(std::stod(value_of(a.out, "seconds=")) > 0.0);

    const RunResult b = run_cli(common + dir.file("b") + "\" --seed 4242");
    CHECK(b.exit_code == 0);

    const RunResult c = run_cli(common + dir.file("c") + "\" --seed 4242 --threads 2");
    CHECK(c.exit_code == 0);

    // Seed from the environment instead of the flag.
    const RunResult d = run_cli(common + dir.file("d") + "\"", "HULLFORGE_SEED=4242");
    CHECK(d.exit_code == 0);

    const std::string accepted_a = testsupport::read_file(dir.file("a/accepted.csv"));
    CHECK(!accepted_a.empty());
    CHECK(accepted_a == testsupport::read_file(dir.file("b/accepted.csv")));
    CHECK(accepted_a == testsupport::read_file(dir.file("c/accepted.csv")));
    CHECK(accepted_a == testsupport::read_file(dir.file("d/accepted.csv")));

    const std::string attempts_a = testsupport::read_file(dir.file("a/attempts.csv"));
    CHECK(attempts_a == testsupport::read_file(dir.file("b/attempts.csv")));
    CHECK(attempts_a == testsupport::read_file(dir.file("c/attempts.csv")));

    // A different seed gives a different stream.
    const RunResult e = run_cli(common + dir.file("e") + "\" --seed 4243");
    CHECK(e.exit_code == 0);
    CHECK(accepted_a != testsupport::read_file(dir.file("e/accepted.csv")));

    // An unreachable target exhausts the budget: persisted artifacts
    // plus a typed error and exit 1.
    const RunResult f = run_cli("generate \"" + small_csv() +
                                "\" --count 2 --components 2 --no-overlay --seed 1 "
                                "--target-rt 1 --max-attempts 4 --out-dir \"" + dir.file("f") +
                                "\"");
    CHECK(f.exit_code == 1);
    CHECK(f.err.find("error=BudgetExhausted:") != std::string::npos);
    CHECK(std::filesystem::exists(dir.file("f/summary.txt")));
}

TEST_CASE("report covers generated hulls drawn near training rows") {
    TempDir dir("cli-report");
    const RunResult gen = run_cli("generate \"" + small_csv() +
                                  "\" --count 2 --components 2 --max-attempts 80 --no-overlay "
                                  "--seed 4242 --out-dir \"" + dir.file("gen") + "\"");
    REQUIRE(gen.exit_code == 0);

    const RunResult rep = run_cli("report \"" + small_csv() + "\" \"" +
                                  dir.file("gen/accepted.csv") + "\" --seed 6 --out-dir \"" +
                                  dir.file("rep") + "\"");
    CHECK(rep.exit_code == 0);
    const double frac = std::stod(value_of(rep.out, "in_fraction="));
    CHECK(frac >= 0.0);
    CHECK(frac <= 1.0);
    CHECK(std::stod(value_of(rep.out, "threshold=")) > 0.0);
    CHECK(std::filesystem::exists(dir.file("rep/overlay.svg")));
    CHECK(std::filesystem::exists(dir.file("rep/report.txt")));
}
