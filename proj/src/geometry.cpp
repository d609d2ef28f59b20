#include "hullforge/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "hullforge/errors.hpp"
#include "hullforge/mesh.hpp"

namespace hullforge {

double half_breadth(const HullParameters& p, double x, double z) {
    const HullModel hull(p);
    const double tol = 1e-9 * hull.loa();
    if (x < -tol || x > hull.loa() + tol) {
        throw DomainError("x outside [0, loa]");
    }
    if (z < -tol || z > hull.depth() + tol) {
        throw DomainError("z outside [0, depth]");
    }
    return hull.offset(std::clamp(x, 0.0, hull.loa()), std::clamp(z, 0.0, hull.depth()));
}

PointGrid point_grid(const HullModel& hull, double draft, int nx, int nz) {
    if (!(draft > 0.0) || draft > hull.depth() * (1.0 + 1e-12)) {
        throw DraftError("draft must be in (0, depth]");
    }
    draft = std::min(draft, hull.depth());

    // Longitudinal span of the submerged body.
    double x_lo = hull.loa(), x_hi = 0.0;
    const int scan = std::max(nz * 4, 64);
    for (int j = 0; j <= scan; ++j) {
        const double zh = draft * j / scan;
        x_lo = std::min(x_lo, std::max(0.0, hull.aft_extent(zh)));
        x_hi = std::max(x_hi, std::min(hull.loa(), hull.forward_extent(zh)));
    }
    if (x_hi <= x_lo) {
        x_lo = 0.0;
        x_hi = hull.loa();
    }

    PointGrid grid;
    grid.draft = draft;
    grid.x.resize(static_cast<std::size_t>(nx));
    grid.z.resize(static_cast<std::size_t>(nz));
    const double span = x_hi - x_lo;
    for (int i = 0; i < nx; ++i) {
        grid.x[static_cast<std::size_t>(i)] = span * i / (nx - 1);
    }
    for (int j = 0; j < nz; ++j) {
        grid.z[static_cast<std::size_t>(j)] = -draft + draft * j / (nz - 1);
    }
    grid.y.assign(static_cast<std::size_t>(nx),
                  std::vector<double>(static_cast<std::size_t>(nz), 0.0));
    for (int i = 0; i < nx; ++i) {
        const double x = x_lo + grid.x[static_cast<std::size_t>(i)];
        for (int j = 0; j < nz; ++j) {
            const double zh = grid.z[static_cast<std::size_t>(j)] + draft;
            grid.y[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                hull.offset(x, zh);
        }
    }

    // Waterline length off the top row.
    const double tol = 1e-9 * std::max(1.0, hull.loa());
    int first = -1, last = -1;
    for (int i = 0; i < nx; ++i) {
        if (grid.y[static_cast<std::size_t>(i)][static_cast<std::size_t>(nz - 1)] > tol) {
            if (first < 0) first = i;
            last = i;
        }
    }
    grid.lwl = first >= 0
                   ? grid.x[static_cast<std::size_t>(last)] - grid.x[static_cast<std::size_t>(first)]
                   : 0.0;
    return grid;
}

PointGrid point_grid(const HullParameters& p, double draft, int nx, int nz) {
    return point_grid(HullModel(p), draft, nx, nz);
}

namespace {

void scan_check(std::vector<std::string>& violations, const std::string& name, bool violated) {
    if (violated) violations.push_back(name);
}

} // namespace

FeasibilityReport feasibility_check(const HullParameters& p) {
    const HullModel hull(p);
    const double loa = hull.loa();
    const double depth = hull.depth();
    FeasibilityReport report;

    // Raw offsets must not dip negative (negative drift angles or
    // hollow blends carve into the far side of the centerplane).
    bool negative_offset = false;
    bool width_overshoot = false;
    constexpr int snx = 96, snz = 48;
    const double neg_tol = -1e-7 * loa;
    const double ratio_tol = 1.0 + 1e-6;
    for (int i = 0; i <= snx && !(negative_offset && width_overshoot); ++i) {
        const double x = loa * i / snx;
        for (int j = 0; j <= snz; ++j) {
            const double z = depth * j / snz;
            const double raw = hull.raw_offset(x, z);
            if (raw < neg_tol) negative_offset = true;
            const double mid = hull.mid_halfbeam(z);
            if (mid > 1e-6 * loa && hull.taper_offset(x, z) > mid * ratio_tol) {
                width_overshoot = true;
            }
        }
    }
    scan_check(report.violated_checks, "offsets_nonnegative", negative_offset);
    scan_check(report.violated_checks, "taper_width_bounds", width_overshoot);

    // Section curves must evaluate to sane finite values everywhere.
    bool section_bad = false;
    for (int j = 0; j <= 200; ++j) {
        const double z = depth * j / 200;
        const double ym = hull.mid_halfbeam(z);
        const double yt = hull.transom_halfbeam(z);
        if (!std::isfinite(ym) || !std::isfinite(yt) || ym < -1e-9 || yt < -1e-9 ||
            ym > loa || yt > loa) {
            section_bad = true;
            break;
        }
    }
    scan_check(report.violated_checks, "sections_single_valued", section_bad);

    // A stern bulb whose fade tail never reaches the hull leaves a
    // floating blob aft of the keel rise.
    bool bulb_detached = false;
    if (p.bit_sb()) {
        const double z_top = p.hsboa() * p.wl() * depth;
        const double anchor = p.kappa_sb() * p.lb() * loa;
        const double tol = 1e-6 * loa;
        for (int j = 1; j < 32; ++j) {
            const double z = z_top * j / 32;
            const double tip = hull.aft_extent(z);
            const double aft = hull.aft_edge(z);
            if (tip >= aft - tol) continue; // bulb inside the hull band
            const double len = anchor - tip;
            if (anchor + 1.5 * len < aft - tol) {
                bulb_detached = true;
                break;
            }
        }
    }
    scan_check(report.violated_checks, "bulb_attachment", bulb_detached);

    // Meshing is the decisive watertightness test.
    bool mesh_failed = false;
    try {
        build_mesh(p);
    } catch (const MeshError&) {
        mesh_failed = true;
    }
    scan_check(report.violated_checks, "mesh_closure", mesh_failed);

    report.watertight = !mesh_failed && !bulb_detached;
    report.self_intersection_free = !negative_offset && !width_overshoot && !section_bad;
    report.feasible = report.violated_checks.empty();
    return report;
}

Hydrostatics hydrostatics(const HullParameters& p, double draft, int nx, int nz) {
    const HullModel hull(p);
    if (!(draft > 0.0) || draft > hull.depth() * (1.0 + 1e-12)) {
        throw DraftError("draft must be in (0, depth]");
    }
    draft = std::min(draft, hull.depth());

    Hydrostatics hs;
    hs.draft = draft;

    // Displaced volume by sectional-area integration on a uniform
    // lattice over the full length.
    std::vector<double> area(static_cast<std::size_t>(nx + 1), 0.0);
    for (int i = 0; i <= nx; ++i) {
        const double x = hull.loa() * i / nx;
        double a = 0.0;
        double prev = hull.offset(x, 0.0);
        for (int j = 1; j <= nz; ++j) {
            const double z = draft * j / nz;
            const double cur = hull.offset(x, z);
            a += 0.5 * (prev + cur) * (draft / nz);
            prev = cur;
        }
        area[static_cast<std::size_t>(i)] = 2.0 * a;
    }
    double vol = 0.0;
    for (int i = 0; i < nx; ++i) {
        vol += 0.5 * (area[static_cast<std::size_t>(i)] + area[static_cast<std::size_t>(i + 1)]) *
               (hull.loa() / nx);
    }
    hs.displaced_volume = vol;

    // Wetted surface from the submerged shell, waterplane left open.
    const TriMesh shell = build_surface(hull, draft, nx / 2, nz / 2, false);
    hs.wetted_surface = shell.surface_area();

    // Waterline length by fine scan at the waterplane.
    const double tol = 1e-9 * std::max(1.0, hull.loa());
    const int wscan = std::max(4 * nx, 512);
    double x_first = -1.0, x_last = -1.0;
    for (int i = 0; i <= wscan; ++i) {
        const double x = hull.loa() * i / wscan;
        if (hull.offset(x, draft) > tol) {
            if (x_first < 0.0) x_first = x;
            x_last = x;
        }
    }
    hs.waterline_length = x_first >= 0.0 ? std::min(x_last - x_first, hull.loa()) : 0.0;
    return hs;
}

} // namespace hullforge
