#pragma once

#include <string>
#include <vector>

#include "hullforge/hull_model.hpp"
#include "hullforge/params.hpp"

namespace hullforge {

// Rectangular offset lattice of the submerged hull. x runs from 0 at
// the aft end of the submerged body, ascending forward; z runs from
// -draft (deepest) up to 0 (waterplane). y[i][j] is the half-breadth
// at station x[i], height z[j].
struct PointGrid {
    std::vector<double> x;
    std::vector<double> z;
    std::vector<std::vector<double>> y;
    double draft = 0.0;
    double lwl = 0.0;
};

struct FeasibilityReport {
    bool watertight = false;
    bool self_intersection_free = false;
    std::vector<std::string> violated_checks;
    bool feasible = false;
};

struct Hydrostatics {
    double wetted_surface = 0.0;
    double waterline_length = 0.0;
    double displaced_volume = 0.0;
    double draft = 0.0;
};

// Half-breadth of the hull surface at longitudinal station x (meters
// from the stern perpendicular) and height z (meters above the keel).
// Throws DomainError outside the hull bounding box.
double half_breadth(const HullParameters& p, double x, double z);

// Samples the submerged hull on an nx x nz lattice at the given draft.
// Throws DraftError unless 0 < draft <= depth.
PointGrid point_grid(const HullParameters& p, double draft, int nx = 50, int nz = 25);
PointGrid point_grid(const HullModel& hull, double draft, int nx = 50, int nz = 25);

// Runs the geometric soundness checks. Never throws on bad geometry;
// failures are reported, not raised.
FeasibilityReport feasibility_check(const HullParameters& p);

// Integrates wetted surface, waterline length and displaced volume at
// the given draft. Resolution is the evaluation lattice density.
Hydrostatics hydrostatics(const HullParameters& p, double draft, int nx = 200, int nz = 100);

} // namespace hullforge
