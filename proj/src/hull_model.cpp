#include "hullforge/hull_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hullforge {

namespace {

constexpr double kEps = 1e-12;
constexpr double kDeg = 0.017453292519943295;

// Longitudinal blend from 0 at the edge (s = 0) to 1 at full beam
// (s = 1) with zero slope at s = 1. Quarter ellipse or parabola.
inline double edge_blend(double s, bool ellipse) {
    const double q = 1.0 - s;
    const double v = 1.0 - q * q;
    return ellipse ? std::sqrt(std::max(0.0, v)) : v;
}

// Union of two half-breadth fields with a fillet of radius r near the
// intersection. Falls back to plain max when either side vanishes so
// the blend never creates material where both inputs are zero.
inline double smooth_union(double a, double b, double r) {
    const double m = std::max(a, b);
    if (r <= kEps) return m;
    const double d = std::abs(a - b);
    if (d >= r) return m;
    const double bump = (r - d) * (r - d) / (4.0 * r);
    const double gate = std::min(1.0, std::min(a, b) / r);
    return m + bump * std::max(0.0, gate);
}

// Vertically asymmetric superelliptic height profile: 1 at the peak,
// 0 at z = 0 and z = top. Exponent 2.5 keeps the lobes full.
double lobe_profile(double z, double peak, double top) {
    if (z <= 0.0 || z >= top) return 0.0;
    const double h = z < peak ? peak : top - peak;
    if (h <= kEps) return 0.0;
    const double u = std::abs(z - peak) / h;
    if (u >= 1.0) return 0.0;
    constexpr double p = 2.5;
    return std::pow(1.0 - std::pow(u, p), 1.0 / p);
}

// Longitudinal bulb profile from root (s = 0) to tip (s = 1). The knee
// parameter in [-1, 1] selects a cylindrical run with an elliptic cap
// (positive) or an increasingly pointed superellipse (negative).
double bulb_profile(double s, double knee) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    const double k = std::clamp(knee, -0.95, 0.95);
    if (k >= 0.0) {
        if (s <= k) return 1.0;
        const double u = (s - k) / (1.0 - k);
        return std::sqrt(std::max(0.0, 1.0 - u * u));
    }
    const double p = 1.0 + (1.0 + k); // in (1, 2)
    return std::pow(1.0 - std::pow(s, p), 1.0 / p);
}

} // namespace

SectionCurve::SectionCurve(double depth, double chine_halfbeam, double deck_halfbeam,
                           double deadrise_deg, double fillet_radius,
                           double keel_radius_signed) {
    depth_ = std::max(depth, 0.0);
    deck_y_ = std::max(deck_halfbeam, 0.0);
    if (depth_ <= kEps) return;

    const double beta = std::clamp(deadrise_deg, 0.0, 89.0) * kDeg;
    tan_beta_ = std::tan(beta);

    // Chine corner on the deadrise line; compressed toward the deck if
    // the line would pierce it.
    if (tan_beta_ <= kEps || chine_halfbeam <= kEps) {
        cz_ = 0.0;
        cy_ = std::max(chine_halfbeam, 0.0);
        tan_beta_ = 0.0;
    } else {
        const double cz_raw = tan_beta_ * chine_halfbeam;
        if (cz_raw <= 0.9 * depth_) {
            cz_ = cz_raw;
            cy_ = chine_halfbeam;
        } else {
            cz_ = 0.9 * depth_;
            cy_ = cz_ / tan_beta_;
        }
    }

    // Tangent fillet at the chine corner.
    if (fillet_radius > kEps && cy_ > kEps) {
        const double alen = std::hypot(cy_, cz_);
        const double sy = deck_y_ - cy_, sz = depth_ - cz_;
        const double slen = std::hypot(sy, sz);
        if (alen > kEps && slen > kEps) {
            const double ay = -cy_ / alen, az = -cz_ / alen;
            const double uy = sy / slen, uz = sz / slen;
            const double cosq = std::clamp(ay * uy + az * uz, -1.0, 1.0);
            const double theta = std::acos(cosq);
            if (theta > 1e-3 && theta < std::numbers::pi - 1e-3) {
                const double tan_half = std::tan(theta / 2.0);
                double t = fillet_radius / tan_half;
                t = std::min(t, 0.6 * std::min(alen, slen));
                const double r = t * tan_half;
                if (r > kEps) {
                    double by = ay + uy, bz = az + uz;
                    const double blen = std::hypot(by, bz);
                    by /= blen;
                    bz /= blen;
                    const double d = r / std::sin(theta / 2.0);
                    fy_ = cy_ + by * d;
                    fz_ = cz_ + bz * d;
                    fr_ = r;
                    t1z_ = cz_ + az * t;
                    t2z_ = cz_ + uz * t;
                    has_fillet_ = true;
                }
            }
        }
    }

    // Keel rounding below the deadrise line. The junction must stay
    // below the fillet band.
    const double rk = std::abs(keel_radius_signed);
    if (rk > kEps && tan_beta_ > kEps) {
        const double bound = 0.98 * (has_fillet_ ? std::max(t1z_, 0.0) : cz_);
        if (bound > kEps) {
            if (keel_radius_signed > 0.0) {
                const double sinb = std::sin(std::atan(tan_beta_));
                double zj = 2.0 * rk * sinb * sinb;
                double r = rk;
                if (zj > bound) {
                    zj = bound;
                    r = zj / (2.0 * sinb * sinb);
                }
                if (zj > kEps) {
                    keel_mode_ = 1;
                    kz_ = zj;
                    kr_ = r;
                }
            } else {
                const double zj = std::min(rk, bound);
                if (zj > kEps) {
                    keel_mode_ = -1;
                    kz_ = zj;
                    kl_ = zj / tan_beta_;
                }
            }
        }
    }
}

double SectionCurve::line_at(double z) const {
    if (z <= cz_) {
        return tan_beta_ > kEps ? z / tan_beta_ : cy_;
    }
    const double span = depth_ - cz_;
    if (span <= kEps) return deck_y_;
    return cy_ + (deck_y_ - cy_) * (z - cz_) / span;
}

double SectionCurve::eval(double z) const {
    if (depth_ <= kEps) return deck_y_;
    z = std::clamp(z, 0.0, depth_);
    if (has_fillet_ && z >= t1z_ && z <= t2z_) {
        const double dz = z - fz_;
        const double disc = std::max(0.0, fr_ * fr_ - dz * dz);
        const double s = std::sqrt(disc);
        // Pick the circle branch on the corner's side of the center.
        const double toward = (cy_ - fy_) * s; // sign of dot with corner dir
        return toward >= 0.0 ? fy_ + s : fy_ - s;
    }
    if (keel_mode_ != 0 && z < kz_) {
        if (keel_mode_ > 0) {
            return std::sqrt(std::max(0.0, z * (2.0 * kr_ - z)));
        }
        const double u = z / kz_;
        return kl_ * (1.0 - std::sqrt(std::max(0.0, 1.0 - u * u)));
    }
    return line_at(z);
}

double HullModel::extremum(const Quadratic& q, double lo, double hi, bool want_max) {
    double best = q.eval(lo);
    const double at_hi = q.eval(hi);
    best = want_max ? std::max(best, at_hi) : std::min(best, at_hi);
    if (std::abs(q.a) > kEps) {
        const double tv = -q.b / (2.0 * q.a);
        if (tv > lo && tv < hi) {
            const double v = q.eval(tv);
            best = want_max ? std::max(best, v) : std::min(best, v);
        }
    }
    return best;
}

HullModel::HullModel(const HullParameters& p) : p_(p) {
    loa_ = p.loa();
    depth_ = p.dd() * loa_;
    lb_len_ = p.lb() * loa_;
    ls_len_ = p.ls() * loa_;
    x_bow_start_ = loa_ - lb_len_;

    mid_ = SectionCurve(depth_, p.bc() * loa_ / 2.0, p.bd() * loa_ / 2.0, p.beta(),
                        p.rc() * p.bc() * loa_, p.rk() * depth_);

    // Bow stem: quadratic setback curve, shifted so its minimum over
    // [bk, 1] is zero (the stem touches x = loa somewhere), scaled by
    // its own maximum. 80% of the bow taper is the deepest setback.
    bow_curve_ = {p.bow_a(), p.bow_b(), 0.0};
    bow_curve_.c = -extremum(bow_curve_, p.bk(), 1.0, false);
    bow_scale_ = extremum(bow_curve_, p.bk(), 1.0, true);
    stem_depth_ = 0.8 * lb_len_;

    z_bk_ = p.bk() * depth_;
    x_rise_bow_ = loa_ - p.kappa_bow() * lb_len_;
    {
        const double zn = p.bk();
        const double bn = bow_scale_ > kEps ? bow_curve_.eval(zn) / bow_scale_ : 0.0;
        x_meet_bow_ = loa_ - stem_depth_ * std::clamp(bn, 0.0, 1.0);
    }
    x_rise_bow_ = std::min(x_rise_bow_, x_meet_bow_);

    // Fullness curves: shifted so the minimum over [0, 1] is zero.
    delta_bow_ = {p.delta_bow_a(), p.delta_bow_b(), 0.0};
    delta_bow_.c = -extremum(delta_bow_, 0.0, 1.0, false);
    delta_stern_ = {p.delta_stern_a(), p.delta_stern_b(), 0.0};
    delta_stern_.c = -extremum(delta_stern_, 0.0, 1.0, false);

    drift_ = {p.drift_a(), p.drift_b(), p.drift_c()};

    // Transom line x = slope·(depth − z) + b, shifted into x >= 0 and
    // capped inside the stern taper.
    z_sk_ = p.sk() * depth_;
    const double d_tr = depth_ - z_sk_;
    double slope = p.trans_a();
    const double cap = 0.8 * ls_len_;
    if (std::abs(slope) * d_tr > cap && d_tr > kEps) {
        slope = (slope < 0.0 ? -1.0 : 1.0) * cap / d_tr;
    }
    trans_slope_ = slope;
    trans_b_ = std::max(0.0, -slope * d_tr);
    x_tb_ = trans_slope_ * d_tr + trans_b_;

    x_rise_stern_ = std::max(p.kappa_stern() * ls_len_, x_tb_);

    transom_ = SectionCurve(d_tr, p.bc_trans() * loa_ / 2.0, p.bs() * p.bd() * loa_ / 2.0,
                            p.beta_trans(), p.rc_trans() * p.bc_trans() * loa_,
                            p.rk_trans() * d_tr);

    // Bulbs.
    if (p.bit_bb()) {
        z_bb_top_ = p.wl() * depth_;
        z_bb_peak_ = p.hbb() * z_bb_top_;
        bb_halfbeam_ = p.bbb() * mid_.eval(z_bb_peak_);
        bb_len_ = p.lbb() * loa_;
        bb_fillet_ = p.rbb() * bb_len_;
    }
    if (p.bit_sb()) {
        z_sb_top_ = p.hsboa() * p.wl() * depth_;
        z_sb_peak_ = p.hsb() * z_sb_top_;
        sb_halfbeam_ = p.bsb() * mid_.eval(z_sb_peak_);
        sb_len_ = p.lsb() * loa_;
        sb_fillet_ = p.rsb() * sb_len_;
        sb_anchor_ = p.kappa_sb() * lb_len_;
    }
}

double HullModel::leading_edge(double z) const {
    z = std::clamp(z, 0.0, depth_);
    if (z >= z_bk_ || z_bk_ <= kEps) {
        const double zn = z / depth_;
        const double bn = bow_scale_ > kEps ? bow_curve_.eval(zn) / bow_scale_ : 0.0;
        return loa_ - stem_depth_ * std::clamp(bn, 0.0, 1.0);
    }
    // Forward keel rise: tangent to the baseline at its start.
    return x_rise_bow_ + (x_meet_bow_ - x_rise_bow_) * std::sqrt(z / z_bk_);
}

double HullModel::aft_edge(double z) const {
    z = std::clamp(z, 0.0, depth_);
    if (z >= z_sk_) {
        return trans_slope_ * (depth_ - z) + trans_b_;
    }
    if (z_sk_ <= kEps) return x_tb_;
    return x_rise_stern_ - (x_rise_stern_ - x_tb_) * std::sqrt(z / z_sk_);
}

double HullModel::transom_halfbeam(double z) const {
    if (z < z_sk_) return 0.0;
    return transom_.eval(z - z_sk_);
}

double HullModel::bow_halfbeam(double x, double z) const {
    const double x_le = leading_edge(z);
    if (x > x_le) return 0.0;
    const double y_mid = mid_.eval(z);
    const double zn = z / depth_;
    // Fullness in [0, 0.95]: how far toward the leading edge the full
    // midship beam persists. The cap keeps the entrance width finite.
    const double full = std::clamp(delta_bow_.eval(zn), 0.0, 0.95);
    const double run = x_le - x_bow_start_;
    const double taper = (1.0 - full) * run;
    if (taper <= kEps) return y_mid;
    const double t = std::clamp((x_le - x) / taper, 0.0, 1.0);
    const double phi = std::clamp(drift_.eval(zn), -85.0, 85.0) * kDeg;
    const double m0 = taper * std::tan(phi);
    // Cubic Hermite: y(0) = 0 at the stem with entrance slope m0,
    // y(1) = y_mid with zero slope.
    return y_mid * t * t * (3.0 - 2.0 * t) + m0 * t * (1.0 - t) * (1.0 - t);
}

double HullModel::stern_halfbeam(double x, double z) const {
    const double x_aft = aft_edge(z);
    if (x < x_aft) return 0.0;
    const double y_mid = mid_.eval(z);
    const double y_tr = transom_halfbeam(z);
    const double zn = z / depth_;
    const double full = std::clamp(delta_stern_.eval(zn), 0.0, 0.95);
    const double x_full = ls_len_ - full * (ls_len_ - x_aft);
    const double span = x_full - x_aft;
    double s = 1.0;
    if (span > kEps) s = std::clamp((x - x_aft) / span, 0.0, 1.0);
    const bool ellipse = z >= z_sk_ ? p_.bit_ep_t() : p_.bit_ep_s();
    return y_tr + (y_mid - y_tr) * edge_blend(s, ellipse);
}

double HullModel::bow_bulb_length(double z) const {
    const double g = lobe_profile(z, z_bb_peak_, z_bb_top_);
    if (g <= 0.0) return 0.0;
    const double room = std::max(0.0, loa_ - leading_edge(z));
    return std::min(bb_len_ * g, room);
}

double HullModel::stern_bulb_length(double z) const {
    const double g = lobe_profile(z, z_sb_peak_, z_sb_top_);
    if (g <= 0.0) return 0.0;
    return std::min(sb_len_ * g, sb_anchor_);
}

double HullModel::bow_bulb_halfbeam(double x, double z) const {
    const double g = lobe_profile(z, z_bb_peak_, z_bb_top_);
    if (g <= 0.0) return 0.0;
    const double len = bow_bulb_length(z);
    if (len <= kEps) return 0.0;
    const double x_le = leading_edge(z);
    if (x >= x_le) {
        const double u = (x - x_le) / len;
        if (u >= 1.0) return 0.0;
        return bb_halfbeam_ * g * bulb_profile(u, p_.lbbm());
    }
    // Tail fading aft into the hull.
    const double tail = 1.5 * len;
    const double u = (x_le - x) / tail;
    if (u >= 1.0) return 0.0;
    return bb_halfbeam_ * g * std::sqrt(std::max(0.0, 1.0 - u * u));
}

double HullModel::stern_bulb_halfbeam(double x, double z) const {
    const double g = lobe_profile(z, z_sb_peak_, z_sb_top_);
    if (g <= 0.0) return 0.0;
    const double len = stern_bulb_length(z);
    if (len <= kEps) return 0.0;
    if (x <= sb_anchor_) {
        const double u = (sb_anchor_ - x) / len;
        if (u >= 1.0) return 0.0;
        return sb_halfbeam_ * g * bulb_profile(u, p_.lsbm());
    }
    const double tail = 1.5 * len;
    const double u = (x - sb_anchor_) / tail;
    if (u >= 1.0) return 0.0;
    return sb_halfbeam_ * g * std::sqrt(std::max(0.0, 1.0 - u * u));
}

double HullModel::taper_offset(double x, double z) const {
    return std::min(bow_halfbeam(x, z), stern_halfbeam(x, z));
}

double HullModel::raw_offset(double x, double z) const {
    double y = taper_offset(x, z);
    if (p_.bit_bb()) {
        y = smooth_union(y, bow_bulb_halfbeam(x, z), bb_fillet_);
    }
    if (p_.bit_sb()) {
        y = smooth_union(y, stern_bulb_halfbeam(x, z), sb_fillet_);
    }
    return y;
}

double HullModel::offset(double x, double z) const {
    return std::max(0.0, raw_offset(x, z));
}

double HullModel::forward_extent(double z) const {
    double fwd = leading_edge(z);
    if (p_.bit_bb()) fwd = std::min(loa_, fwd + bow_bulb_length(z));
    return fwd;
}

double HullModel::aft_extent(double z) const {
    double aft = aft_edge(z);
    if (p_.bit_sb()) {
        const double len = stern_bulb_length(z);
        if (len > kEps) aft = std::min(aft, std::max(0.0, sb_anchor_ - len));
    }
    return aft;
}

} // namespace hullforge
