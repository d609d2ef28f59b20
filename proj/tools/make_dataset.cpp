// Builds data/hulls_synthetic.csv: four jittered hull archetypes,
// every row range-valid, feasible and scoring under a comfortable
// resistance bound at the default operating point.
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "hullforge/dataset.hpp"
#include "hullforge/errors.hpp"
#include "hullforge/geometry.hpp"
#include "hullforge/hydro.hpp"
#include "hullforge/params.hpp"

namespace hf = hullforge;

namespace {

using NamedValues = std::vector<std::pair<std::string, double>>;

std::vector<double> to_vector(const NamedValues& values) {
    std::vector<double> out(hf::kParamCount, 0.0);
    std::vector<bool> seen(hf::kParamCount, false);
    for (const auto& [name, v] : values) {
        const int idx = hf::param_index(name);
        if (idx < 0) throw hf::DomainError("unknown parameter " + name);
        out[static_cast<std::size_t>(idx)] = v;
        seen[static_cast<std::size_t>(idx)] = true;
    }
    for (std::size_t i = 0; i < hf::kParamCount; ++i) {
        if (!seen[i]) {
            throw hf::DomainError(std::string("archetype misses ") + hf::param_specs()[i].name);
        }
    }
    return out;
}

// Gaussian jitter at a few percent of each range, clipped to stay
// strictly inside the open interval. Flags are left untouched.
std::vector<double> jitter(const std::vector<double>& base, hf::RandomEngine& rng) {
    std::vector<double> out = base;
    const auto specs = hf::param_specs();
    for (std::size_t i = 0; i < hf::kParamCount; ++i) {
        const hf::ParamSpec& s = specs[i];
        if (s.is_flag) continue;
        double range = s.hi - s.lo;
        if (!std::isfinite(range)) range = base[i] * 0.2; // LOA has no upper bound
        const double sigma = 0.02 * range;
        double v = base[i] + sigma * rng.normal();
        const double margin = 1e-3 * (std::isfinite(s.hi - s.lo) ? (s.hi - s.lo) : base[i]);
        if (std::isfinite(s.lo)) v = std::max(v, s.lo + margin);
        if (std::isfinite(s.hi)) v = std::min(v, s.hi - margin);
        out[i] = v;
    }
    return out;
}

NamedValues archetype_base() {
    return {
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
}

void override_values(NamedValues& values, const NamedValues& patch) {
    for (const auto& [name, v] : patch) {
        bool found = false;
        for (auto& [n, slot] : values) {
            if (n == name) {
                slot = v;
                found = true;
                break;
            }
        }
        if (!found) throw hf::DomainError("patch names unknown parameter " + name);
    }
}

} // namespace

int main(int argc, char** argv) {
    const std::string out_path = argc > 1 ? argv[1] : "data/hulls_synthetic.csv";
    const std::size_t per_archetype = 50;
    const double speed = 10.0 * hf::kKnot;
    const double rt_bound = 4000.0; // N, leaves headroom under the pipeline target

    // Four families: slender round-bilge, full beamy workboat, a
    // bulbous-bow variant and a hard-transom elliptic-blend form.
    std::vector<std::pair<std::string, NamedValues>> patches = {
        {"slender", {}},
        {"full",
         {{"Bd", 0.13}, {"Bc", 0.14}, {"Beta", 8.0}, {"Bs", 0.85},
          {"Lb", 0.2}, {"Ls", 0.16}, {"Dd", 0.08}, {"WL", 0.7}}},
        {"bulb",
         {{"bit_BB", 1.0}, {"Lbb", 0.1}, {"Hbb", 0.45}, {"Bbb", 0.5},
          {"Lb", 0.32}, {"Bc", 0.10}}},
        {"transom",
         {{"bit_EP_S", 1.0}, {"bit_EP_T", 1.0}, {"TRANS(A)", 1.2},
          {"Beta_trans", 25.0}, {"SK", 0.4}, {"Ls", 0.26}, {"Beta", 18.0},
          {"Bc", 0.11}, {"Dd", 0.075}}},
    };

    hf::RandomEngine rng(20240614u);
    hf::FluidEnvironment env;
    std::vector<std::vector<double>> rows;
    std::map<std::string, std::size_t> tried;

    for (const auto& [label, patch] : patches) {
        NamedValues named = archetype_base();
        override_values(named, patch);
        const std::vector<double> base = to_vector(named);

        std::size_t kept = 0;
        std::size_t attempts = 0;
        std::size_t n_range = 0, n_feas = 0, n_rt = 0;
        std::string last_detail;
        while (kept < per_archetype) {
            if (++attempts > 5000) {
                std::cerr << "archetype " << label << " keeps failing; tune its base values\n"
                          << "  range=" << n_range << " feasibility=" << n_feas
                          << " rt=" << n_rt << "\n  last: " << last_detail << "\n";
                return 1;
            }
            const std::vector<double> cand = jitter(base, rng);
            hf::HullParameters p;
            try {
                p = hf::validate_params(cand);
            } catch (const hf::Error& e) {
                ++n_range;
                last_detail = e.what();
                continue;
            }
            try {
                const hf::FeasibilityReport rep = hf::feasibility_check(p);
                if (!rep.feasible) {
                    ++n_feas;
                    last_detail.clear();
                    for (const auto& c : rep.violated_checks) last_detail += c + " ";
                    continue;
                }
                const hf::DragTable table = hf::build_drag_table(p, env);
                const hf::DragResult r =
                    hf::calc_drag(p, table, speed, 0.6 * p.depth(), env);
                if (!(r.rt < rt_bound)) {
                    ++n_rt;
                    last_detail = "rt=" + hf::format_double(r.rt);
                    continue;
                }
            } catch (const hf::Error& e) {
                ++n_rt;
                last_detail = e.what();
                continue;
            }
            rows.push_back(cand);
            ++kept;
        }
        tried[label] = attempts;
        std::cerr << label << ": kept " << kept << " of " << attempts << " candidates ("
                  << n_range << " range, " << n_feas << " feasibility, " << n_rt
                  << " resistance)\n";
    }

    hf::Matrix data(rows.size(), hf::kParamCount);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::copy(rows[r].begin(), rows[r].end(), data.row(r).begin());
    }
    hf::save_dataset(out_path, data);
    std::cout << "rows=" << data.rows << " path=" << out_path << "\n";
    return 0;
}
