#include "hullforge/params.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "hullforge/common.hpp"

namespace hullforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr ParamSpec kSpecs[kParamCount] = {
    {"LOA", 0.0, kInf, false},
    {"Lb", 0.05, 0.9, false},
    {"Ls", 0.0, 0.9, false},
    {"Bd", 0.0833, 0.333, false},
    {"Dd", 0.05, 0.25, false},
    {"Bs", 0.0, 1.0, false},
    {"WL", 0.0, 1.0, false},
    {"Bc", 0.05, 0.5, false},
    {"Beta", 0.0, 45.0, false},
    {"Rc", 0.0, 1.0, false},
    {"Rk", -1.0, 1.0, false},
    {"BOW(A)", -4.0, 4.0, false},
    {"BOW(B)", -4.0, 4.0, false},
    {"BK", 0.0, 1.0, false},
    {"Kappa_BOW", 0.0, 1.0, false},
    {"DELTA_BOW(A)", -4.0, 4.0, false},
    {"DELTA_BOW(B)", -4.0, 4.0, false},
    {"DRIFT(A)", -4.0, 4.0, false},
    {"DRIFT(B)", -4.0, 4.0, false},
    {"DRIFT(C)", 0.0, 60.0, false},
    {"bit_EP_S", 0.0, 1.0, true},
    {"bit_EP_T", 0.0, 1.0, true},
    {"TRANS(A)", -3.0, 5.0, false},
    {"SK", 0.0, 1.0, false},
    {"Kappa_STERN", 0.0, 1.0, false},
    {"DELTA_STERN(A)", -4.0, 4.0, false},
    {"DELTA_STERN(B)", -4.0, 4.0, false},
    {"Beta_trans", 0.0, 60.0, false},
    {"Bc_trans", 0.0, 0.5, false},
    {"Rc_trans", 0.0, 0.5, false},
    {"Rk_trans", -1.0, 1.0, false},
    {"bit_BB", 0.0, 1.0, true},
    {"bit_SB", 0.0, 1.0, true},
    {"Lbb", 0.0, 0.2, false},
    {"Hbb", 0.0, 1.0, false},
    {"Bbb", 0.0, 1.0, false},
    {"Lbbm", -1.0, 1.0, false},
    {"Rbb", 0.05, 0.33, false},
    {"Kappa_SB", 0.0, 1.0, false},
    {"Lsb", 0.0, 0.2, false},
    {"HsboA", 0.0, 1.0, false},
    {"Hsb", 0.0, 1.0, false},
    {"Bsb", 0.0, 1.0, false},
    {"Lsbm", -1.0, 1.0, false},
    {"Rsb", 0.05, 0.33, false},
};

const std::vector<std::string>& name_vector() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        v.reserve(kParamCount);
        for (const auto& s : kSpecs) v.emplace_back(s.name);
        return v;
    }();
    return names;
}

} // namespace

std::span<const ParamSpec> param_specs() { return {kSpecs, kParamCount}; }

std::span<const std::string> param_names() { return name_vector(); }

int param_index(const std::string& name) {
    static const std::unordered_map<std::string, int> index = [] {
        std::unordered_map<std::string, int> m;
        for (std::size_t i = 0; i < kParamCount; ++i) m[kSpecs[i].name] = static_cast<int>(i);
        return m;
    }();
    auto it = index.find(name);
    return it == index.end() ? -1 : it->second;
}

HullParameters validate_params(std::span<const double> raw) {
    if (raw.size() != kParamCount) {
        throw ArityError("expected 45 parameters, got " + std::to_string(raw.size()));
    }
    for (std::size_t i = 0; i < kParamCount; ++i) {
        if (!std::isfinite(raw[i])) {
            throw NonFiniteError(std::string(kSpecs[i].name) + " is not finite");
        }
    }
    HullParameters p;
    std::vector<RangeViolation> violations;
    for (std::size_t i = 0; i < kParamCount; ++i) {
        const ParamSpec& s = kSpecs[i];
        double v = raw[i];
        if (s.is_flag) {
            // Flags must be exactly 0 or 1; values within 1e-9 of an
            // integer are coerced, anything else is a violation.
            const double rounded = std::round(v);
            if (std::abs(v - rounded) <= 1e-9 && (rounded == 0.0 || rounded == 1.0)) {
                v = rounded;
            } else {
                violations.push_back({s.name, v, 0.0, 1.0});
                continue;
            }
        } else if (!(v > s.lo && v < s.hi)) {
            violations.push_back({s.name, v, s.lo, s.hi});
            continue;
        }
        p.v_[i] = v;
    }
    if (!violations.empty()) {
        std::string msg = "parameter(s) out of range:";
        for (const auto& viol : violations) {
            msg += " " + viol.field + "=" + format_double(viol.value) + " not in (" +
                   format_double(viol.lo) + ", " + format_double(viol.hi) + ")";
        }
        throw ValidationError(std::move(violations), msg);
    }
    return p;
}

HullParameters HullParameters::from_raw(std::span<const double> raw) {
    return validate_params(raw);
}

std::uint64_t HullParameters::hash() const {
    return fnv1a(v_.data(), sizeof(double) * kParamCount);
}

void snap_flags(std::span<double> raw) {
    if (raw.size() != kParamCount) return;
    for (std::size_t i = 0; i < kParamCount; ++i) {
        if (kSpecs[i].is_flag) raw[i] = raw[i] < 0.5 ? 0.0 : 1.0;
    }
}

} // namespace hullforge
