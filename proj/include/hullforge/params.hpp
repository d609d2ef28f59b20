#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "hullforge/errors.hpp"

namespace hullforge {

inline constexpr std::size_t kParamCount = 45;

// Allowed range of one parameter. Bounds are exclusive; flags admit
// exactly 0 or 1.
struct ParamSpec {
    const char* name;
    double lo;
    double hi;
    bool is_flag;
};

// Specs in canonical CSV column order.
std::span<const ParamSpec> param_specs();

// The 45 column names in canonical order.
std::span<const std::string> param_names();

int param_index(const std::string& name); // -1 if unknown

// Validated hull parameter vector. Values are stored in canonical
// order; named accessors cover every field the geometry uses.
class HullParameters {
public:
    static HullParameters from_raw(std::span<const double> raw); // validates

    double operator[](std::size_t i) const { return v_[i]; }
    std::span<const double, kParamCount> values() const { return std::span<const double, kParamCount>(v_); }

    double loa() const { return v_[0]; }
    double lb() const { return v_[1]; }
    double ls() const { return v_[2]; }
    double bd() const { return v_[3]; }
    double dd() const { return v_[4]; }
    double bs() const { return v_[5]; }
    double wl() const { return v_[6]; }
    double bc() const { return v_[7]; }
    double beta() const { return v_[8]; }
    double rc() const { return v_[9]; }
    double rk() const { return v_[10]; }
    double bow_a() const { return v_[11]; }
    double bow_b() const { return v_[12]; }
    double bk() const { return v_[13]; }
    double kappa_bow() const { return v_[14]; }
    double delta_bow_a() const { return v_[15]; }
    double delta_bow_b() const { return v_[16]; }
    double drift_a() const { return v_[17]; }
    double drift_b() const { return v_[18]; }
    double drift_c() const { return v_[19]; }
    bool bit_ep_s() const { return v_[20] != 0.0; }
    bool bit_ep_t() const { return v_[21] != 0.0; }
    double trans_a() const { return v_[22]; }
    double sk() const { return v_[23]; }
    double kappa_stern() const { return v_[24]; }
    double delta_stern_a() const { return v_[25]; }
    double delta_stern_b() const { return v_[26]; }
    double beta_trans() const { return v_[27]; }
    double bc_trans() const { return v_[28]; }
    double rc_trans() const { return v_[29]; }
    double rk_trans() const { return v_[30]; }
    bool bit_bb() const { return v_[31] != 0.0; }
    bool bit_sb() const { return v_[32] != 0.0; }
    double lbb() const { return v_[33]; }
    double hbb() const { return v_[34]; }
    double bbb() const { return v_[35]; }
    double lbbm() const { return v_[36]; }
    double rbb() const { return v_[37]; }
    double kappa_sb() const { return v_[38]; }
    double lsb() const { return v_[39]; }
    double hsboa() const { return v_[40]; }
    double hsb() const { return v_[41]; }
    double bsb() const { return v_[42]; }
    double lsbm() const { return v_[43]; }
    double rsb() const { return v_[44]; }

    // Derived absolute dimensions (meters).
    double depth() const { return dd() * loa(); }
    double design_draft() const { return wl() * depth(); }

    std::uint64_t hash() const;

private:
    friend HullParameters validate_params(std::span<const double> raw);
    std::array<double, kParamCount> v_{};
};

// Validates a raw 45-vector against the canonical ranges. Reports every
// violation; coerces flag fields to exact {0,1} when within 1e-9.
HullParameters validate_params(std::span<const double> raw);

// Snaps the four flag entries of a raw vector to the nearer of {0,1}
// in place. Used on continuous model samples before validation.
void snap_flags(std::span<double> raw);

} // namespace hullforge
