#pragma once

// Shared fixtures for the test suites: a known-good hull, synthetic
// clustered data and scratch directories.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hullforge/common.hpp"
#include "hullforge/params.hpp"

namespace testsupport {

// Slender round-bilge hull that validates, meshes watertight and
// scores a few kN at 10 knots. Values are indexed by name so the test
// stays correct under any internal reordering.
inline std::vector<double> valid_base() {
    const std::vector<std::pair<const char*, double>> named = {
        {"LOA", 10.0},       {"Lb", 0.28},         {"Ls", 0.22},
        {"Bd", 0.10},        {"Dd", 0.07},         {"Bs", 0.75},
        {"WL", 0.75},        {"Bc", 0.09},         {"Beta", 14.0},
        {"Rc", 0.35},        {"Rk", 0.10},         {"BOW(A)", 0.30},
        {"BOW(B)", 0.15},    {"BK", 0.35},         {"Kappa_BOW", 0.45},
        {"DELTA_BOW(A)", 0.50}, {"DELTA_BOW(B)", 0.20}, {"DRIFT(A)", 0.30},
        {"DRIFT(B)", 0.20},  {"DRIFT(C)", 10.0},   {"bit_EP_S", 0.0},
        {"bit_EP_T", 0.0},   {"TRANS(A)", 0.50},   {"SK", 0.30},
        {"Kappa_STERN", 0.40}, {"DELTA_STERN(A)", 0.40}, {"DELTA_STERN(B)", 0.15},
        {"Beta_trans", 18.0}, {"Bc_trans", 0.08},  {"Rc_trans", 0.20},
        {"Rk_trans", 0.10},  {"bit_BB", 0.0},      {"bit_SB", 0.0},
        {"Lbb", 0.08},       {"Hbb", 0.40},        {"Bbb", 0.45},
        {"Lbbm", 0.30},      {"Rbb", 0.15},        {"Kappa_SB", 0.40},
        {"Lsb", 0.06},       {"HsboA", 0.50},      {"Hsb", 0.40},
        {"Bsb", 0.40},       {"Lsbm", 0.20},       {"Rsb", 0.15},
    };
    std::vector<double> raw(hullforge::kParamCount, 0.0);
    for (const auto& [n, v] : named) {
        raw[static_cast<std::size_t>(hullforge::param_index(n))] = v;
    }
    return raw;
}

inline std::vector<double> set_named(std::vector<double> raw, const char* name, double v) {
    raw[static_cast<std::size_t>(hullforge::param_index(name))] = v;
    return raw;
}

// Gaussian jitter inside the valid box; flags untouched.
inline std::vector<double> jitter_base(hullforge::RandomEngine& rng, double scale = 0.02) {
    std::vector<double> raw = valid_base();
    const auto specs = hullforge::param_specs();
    for (std::size_t i = 0; i < hullforge::kParamCount; ++i) {
        const auto& s = specs[i];
        if (s.is_flag) continue;
        const double range = std::isfinite(s.hi - s.lo) ? s.hi - s.lo : raw[i] * 0.2;
        double v = raw[i] + scale * range * rng.normal();
        const double margin = 1e-3 * range;
        if (std::isfinite(s.lo)) v = std::max(v, s.lo + margin);
        if (std::isfinite(s.hi)) v = std::min(v, s.hi - margin);
        raw[i] = v;
    }
    return raw;
}

// Isotropic Gaussian blobs with centers spaced `sep` apart along
// random directions. Returns data and true labels.
inline std::pair<hullforge::Matrix, std::vector<int>> make_blobs(std::size_t n, std::size_t d,
                                                                 std::size_t k, double sep,
                                                                 std::uint64_t seed,
                                                                 double sigma = 1.0) {
    hullforge::RandomEngine rng(seed);
    hullforge::Matrix centers(k, d);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j = 0; j < d; ++j) centers(c, j) = sep * rng.normal();
    }
    hullforge::Matrix data(n, d);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % k;
        labels[i] = static_cast<int>(c);
        for (std::size_t j = 0; j < d; ++j) data(i, j) = centers(c, j) + sigma * rng.normal();
    }
    return {std::move(data), std::move(labels)};
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path_ = base / ("hullforge-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : fallback;
}

inline std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace testsupport
