#pragma once

#include "hullforge/params.hpp"

namespace hullforge {

// Half-breadth curve of one transverse cross-section, evaluated as
// y(z) with z measured up from the section keel. Pieces from bottom to
// top: optional keel rounding, deadrise line, chine fillet, side line
// to the deck edge. All dimensions are meters.
class SectionCurve {
public:
    SectionCurve() = default;
    SectionCurve(double depth, double chine_halfbeam, double deck_halfbeam,
                 double deadrise_deg, double fillet_radius, double keel_radius_signed);

    double eval(double z) const;
    double depth() const { return depth_; }
    double deck_halfbeam() const { return deck_y_; }

private:
    double line_at(double z) const;

    double depth_ = 0.0;
    double deck_y_ = 0.0;
    double tan_beta_ = 0.0;
    // Chine corner (possibly compressed toward the deck).
    double cy_ = 0.0, cz_ = 0.0;
    // Chine fillet: center, radius, tangent band.
    bool has_fillet_ = false;
    double fy_ = 0.0, fz_ = 0.0, fr_ = 0.0;
    double t1z_ = 0.0, t2z_ = 0.0;
    // Keel rounding: +1 convex arc, -1 concave hollow, 0 none.
    int keel_mode_ = 0;
    double kz_ = 0.0, kr_ = 0.0, kl_ = 0.0;
};

// Full hull surface defined by a validated parameter vector. The frame
// is x in [0, loa] from stern perpendicular to bow, z in [0, depth]
// from keel to deck, y the half-breadth (port/starboard symmetric).
class HullModel {
public:
    explicit HullModel(const HullParameters& p);

    const HullParameters& params() const { return p_; }
    double loa() const { return loa_; }
    double depth() const { return depth_; }

    // Half-breadth with bulbs blended in, clamped to >= 0.
    double offset(double x, double z) const;
    // Same surface before the non-negativity clamp; the construction
    // can dip negative (e.g. negative drift angles), which feasibility
    // checking needs to see.
    double raw_offset(double x, double z) const;
    // Hull without bulb union, for taper-width diagnostics.
    double taper_offset(double x, double z) const;

    // Longitudinal support bounds of the material at height z.
    double forward_extent(double z) const;
    double aft_extent(double z) const;

    // Bow stem / forward keel-rise profile and transom / aft keel-rise
    // profile (support bounds of the bare hull, ignoring bulbs).
    double leading_edge(double z) const;
    double aft_edge(double z) const;

    double mid_halfbeam(double z) const { return mid_.eval(z); }
    // Transom face half-breadth; 0 below the stern-keel intersect.
    double transom_halfbeam(double z) const;
    double transom_z() const { return z_sk_; }

    double bow_taper_start() const { return x_bow_start_; }
    double stern_taper_end() const { return ls_len_; }

private:
    struct Quadratic {
        double a = 0.0, b = 0.0, c = 0.0;
        double eval(double t) const { return (a * t + b) * t + c; }
    };

    static double extremum(const Quadratic& q, double lo, double hi, bool want_max);

    double bow_halfbeam(double x, double z) const;
    double stern_halfbeam(double x, double z) const;
    double bow_bulb_halfbeam(double x, double z) const;
    double stern_bulb_halfbeam(double x, double z) const;
    double bow_bulb_length(double z) const;
    double stern_bulb_length(double z) const;

    HullParameters p_;
    double loa_ = 0.0, depth_ = 0.0;
    double lb_len_ = 0.0, ls_len_ = 0.0;
    double x_bow_start_ = 0.0;
    SectionCurve mid_;

    // Bow: stem profile, keel rise, fullness and drift curves.
    Quadratic bow_curve_;      // normalized stem setback, min 0 on [bk, 1]
    double bow_scale_ = 0.0;   // max of bow_curve_ on [bk, 1]
    double stem_depth_ = 0.0;  // meters of setback at bow_curve_ max
    double z_bk_ = 0.0;
    double x_rise_bow_ = 0.0, x_meet_bow_ = 0.0;
    Quadratic delta_bow_;      // fullness, clamped to [0, 0.95] at eval
    Quadratic drift_;          // entrance angle, degrees of z/depth

    // Stern: transom line, keel rise, fullness curve, transom section.
    double z_sk_ = 0.0;
    double trans_slope_ = 0.0, trans_b_ = 0.0;
    double x_tb_ = 0.0;        // transom bottom station
    double x_rise_stern_ = 0.0;
    Quadratic delta_stern_;
    SectionCurve transom_;

    // Bulbs.
    double z_bb_top_ = 0.0, z_bb_peak_ = 0.0, bb_halfbeam_ = 0.0, bb_len_ = 0.0, bb_fillet_ = 0.0;
    double z_sb_top_ = 0.0, z_sb_peak_ = 0.0, sb_halfbeam_ = 0.0, sb_len_ = 0.0, sb_fillet_ = 0.0;
    double sb_anchor_ = 0.0;
};

} // namespace hullforge
