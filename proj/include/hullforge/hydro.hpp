#pragma once

#include <string>
#include <vector>

#include "hullforge/common.hpp"
#include "hullforge/geometry.hpp"
#include "hullforge/params.hpp"

namespace hullforge {

struct FluidEnvironment {
    double rho = 1025.0;      // kg/m^3
    double nu = 1.1892e-6;    // m^2/s, seawater at 15 C
    double g = 9.80665;       // m/s^2
};

inline constexpr double kKnot = 0.514444; // m/s

// Thin-ship wave resistance quadrature controls. The wavenumber
// integral runs over lambda = cosh(u); panels of Gauss-Legendre nodes
// are doubled until the result stabilizes.
struct MichellOptions {
    int panels = 16;
    int points_per_panel = 16;
    int max_panels = 128;
    double target_rel = 5e-3;  // refinement stops below this
    double fail_rel = 5e-2;    // QuadratureError above this at max nodes
    double lambda_cap = 12.0;
    double tail_eps = 1e-12;   // exp(k0 lambda^2 z) cutoff for u_max
    bool adaptive = true;      // false pins the node count exactly
};

// Wave resistance coefficient of a centerplane offset grid moving at
// `speed`, normalized by the grid's own longitudinal span:
// Cw = Rw / (0.5 rho U^2 Lref^2).
double michell_cw(const PointGrid& grid, double speed, const FluidEnvironment& env = {},
                  const MichellOptions& opts = {});

// ITTC 1957 model-ship correlation line. Throws ReynoldsError for
// Re <= 1000.
double ittc_cf(double reynolds);
double calc_cf(double speed, double lwl, const FluidEnvironment& env = {});

// Precomputed wave coefficients over a speed/draft lattice for one
// hull. cw is indexed [froude][draft_fraction] and normalized by the
// hull's LOA so Rw = 0.5 rho U^2 loa^2 cw.
struct DragTable {
    std::vector<double> froude_numbers;  // 8, ascending
    std::vector<double> draft_fractions; // 4, ascending
    Matrix cw;                           // 8 x 4
    double loa = 0.0;
    double dd = 0.0;
};

struct DragTableOptions {
    double fn_min = 0.10;
    double fn_max = 0.80;
    int n_fn = 8;
    std::vector<double> draft_fractions = {0.25, 0.50, 0.75, 1.00};
    int grid_nx = 50;
    int grid_nz = 25;
    MichellOptions michell;
};

DragTable build_drag_table(const HullParameters& p, const FluidEnvironment& env = {},
                           const DragTableOptions& opts = {});

// Bilinear interpolation, exact at nodes. Throws ExtrapolationError
// outside the lattice.
double interp_cw(const DragTable& table, double fn, double draft_frac);

void write_drag_table(const DragTable& table, const std::string& path);
DragTable read_drag_table(const std::string& path);

struct DragResult {
    double rt = 0.0;
    double rw = 0.0;
    double rf = 0.0;
    double fn = 0.0;
};

// Total resistance at a speed and draft: wave part from the table,
// friction from the ITTC line on the actual wetted surface.
DragResult calc_drag(const HullParameters& p, const DragTable& table, double speed,
                     double draft, const FluidEnvironment& env = {});

// Parabolic analytic test form: y = (B/2)(1-(2x/L-1)^2)(1-(z/T)^2).
PointGrid wigley_grid(double length, double beam, double draft, int nx, int nz);

} // namespace hullforge
