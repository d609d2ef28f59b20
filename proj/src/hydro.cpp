#include "hullforge/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hullforge/common.hpp"
#include "hullforge/errors.hpp"

namespace hullforge {

namespace {

// Trapezoid weights for a possibly non-uniform axis.
std::vector<double> trapezoid_weights(const std::vector<double>& axis) {
    const std::size_t n = axis.size();
    std::vector<double> w(n, 0.0);
    if (n < 2) return w;
    w[0] = 0.5 * (axis[1] - axis[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (axis[i + 1] - axis[i - 1]);
    w[n - 1] = 0.5 * (axis[n - 1] - axis[n - 2]);
    return w;
}

// Longitudinal slope of the offsets, central differences inside and
// one-sided at the ends. Indexed [station][depth] like the grid.
std::vector<std::vector<double>> offset_slopes(const PointGrid& grid) {
    const std::size_t nx = grid.x.size();
    const std::size_t nz = grid.z.size();
    std::vector<std::vector<double>> yx(nx, std::vector<double>(nz, 0.0));
    for (std::size_t j = 0; j < nz; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            std::size_t lo = i > 0 ? i - 1 : 0;
            std::size_t hi = i + 1 < nx ? i + 1 : nx - 1;
            const double dx = grid.x[hi] - grid.x[lo];
            yx[i][j] = dx > 0.0 ? (grid.y[hi][j] - grid.y[lo][j]) / dx : 0.0;
        }
    }
    return yx;
}

struct WaveIntegrand {
    const PointGrid& grid;
    const std::vector<std::vector<double>>& yx;
    const std::vector<double>& wx;
    const std::vector<double>& wz;
    double k0;

    // (I^2 + J^2) cosh^2(u) with lambda = cosh(u); the substitution
    // absorbs the 1/sqrt(lambda^2 - 1) endpoint singularity.
    double operator()(double u) const {
        const double lambda = std::cosh(u);
        const double kl = k0 * lambda;
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < grid.z.size(); ++j) {
            const double depth_factor = std::exp(kl * lambda * grid.z[j]) * wz[j];
            if (depth_factor == 0.0) continue;
            double row_re = 0.0, row_im = 0.0;
            for (std::size_t i = 0; i < grid.x.size(); ++i) {
                const double s = yx[i][j] * wx[i];
                if (s == 0.0) continue;
                row_re += s * std::cos(kl * grid.x[i]);
                row_im += s * std::sin(kl * grid.x[i]);
            }
            re += depth_factor * row_re;
            im += depth_factor * row_im;
        }
        return (re * re + im * im) * lambda * lambda;
    }
};

// Composite Gauss-Legendre over [0, u_max] with `panels` equal panels.
// Sequential on purpose: callers parallelize across whole evaluations,
// and a fixed summation order keeps results thread-count independent.
double integrate_panels(const WaveIntegrand& f, double u_max, int panels, int points) {
    std::vector<double> nodes, weights;
    gauss_legendre(points, nodes, weights);
    const double h = u_max / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = h * p;
        double acc = 0.0;
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            const double u = a + 0.5 * h * (nodes[q] + 1.0);
            acc += weights[q] * f(u);
        }
        total += 0.5 * h * acc;
    }
    return total;
}

} // namespace

double michell_cw(const PointGrid& grid, double speed, const FluidEnvironment& env,
                  const MichellOptions& opts) {
    if (!(speed > 0.0)) throw DomainError("speed must be positive");
    if (grid.x.size() < 2 || grid.z.size() < 2) return 0.0;

    const double span = grid.x.back() - grid.x.front();
    if (!(span > 0.0)) return 0.0;

    // Deepest row that carries any offset bounds the exponential tail.
    double z_eff = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < grid.z.size(); ++j) {
        for (std::size_t i = 0; i < grid.x.size(); ++i) {
            if (grid.y[i][j] != 0.0) {
                if (!any || grid.z[j] < z_eff) z_eff = grid.z[j];
                any = true;
                break;
            }
        }
    }
    if (!any) return 0.0;

    const double k0 = env.g / (speed * speed);
    double lambda_max = opts.lambda_cap;
    if (z_eff < 0.0) {
        lambda_max = std::sqrt(std::log(1.0 / opts.tail_eps) / (k0 * -z_eff));
        lambda_max = std::clamp(lambda_max, 1.5, opts.lambda_cap);
    }
    const double u_max = std::acosh(lambda_max);

    const auto yx = offset_slopes(grid);
    const auto wx = trapezoid_weights(grid.x);
    const auto wz = trapezoid_weights(grid.z);
    const WaveIntegrand f{grid, yx, wx, wz, k0};

    double integral = 0.0;
    if (!opts.adaptive) {
        integral = integrate_panels(f, u_max, opts.panels, opts.points_per_panel);
    } else {
        double prev = integrate_panels(f, u_max, opts.panels, opts.points_per_panel);
        double rel = 1.0;
        bool converged = false;
        for (int panels = opts.panels * 2; panels <= opts.max_panels; panels *= 2) {
            const double next = integrate_panels(f, u_max, panels, opts.points_per_panel);
            const double scale = std::max(std::abs(next), std::abs(prev));
            if (scale < 1e-16) {
                integral = next;
                converged = true;
                break;
            }
            rel = std::abs(next - prev) / scale;
            prev = next;
            if (rel <= opts.target_rel) {
                integral = next;
                converged = true;
                break;
            }
        }
        if (!converged) {
            if (rel > opts.fail_rel) {
                throw QuadratureError("wavenumber integral did not stabilize (relative change " +
                                          format_double(rel) + ")",
                                      rel);
            }
            integral = prev;
        }
    }

    const double rw = 4.0 * env.rho * env.g * env.g / (std::numbers::pi * speed * speed) * integral;
    return rw / (0.5 * env.rho * speed * speed * span * span);
}

double ittc_cf(double reynolds) {
    if (!(reynolds > 1000.0)) {
        throw ReynoldsError("Reynolds number " + format_double(reynolds) +
                            " is at or below 1000");
    }
    const double d = std::log10(reynolds) - 2.0;
    return 0.075 / (d * d);
}

double calc_cf(double speed, double lwl, const FluidEnvironment& env) {
    return ittc_cf(speed * lwl / env.nu);
}

DragTable build_drag_table(const HullParameters& p, const FluidEnvironment& env,
                           const DragTableOptions& opts) {
    const double loa = p.loa();
    const double depth = p.depth();

    DragTable table;
    table.loa = loa;
    table.dd = p.dd();
    table.draft_fractions = opts.draft_fractions;
    table.froude_numbers.resize(static_cast<std::size_t>(opts.n_fn));
    for (int i = 0; i < opts.n_fn; ++i) {
        table.froude_numbers[static_cast<std::size_t>(i)] =
            opts.fn_min + (opts.fn_max - opts.fn_min) * i / (opts.n_fn - 1);
    }

    // Table speeds are anchored to the waterline length at the deepest
    // tabulated draft so every column of one table shares a speed set.
    std::vector<PointGrid> grids;
    grids.reserve(table.draft_fractions.size());
    for (const double frac : table.draft_fractions) {
        grids.push_back(point_grid(p, frac * depth, opts.grid_nx, opts.grid_nz));
    }
    const double lwl_full = grids.back().lwl;
    if (!(lwl_full > 0.0)) throw DraftError("hull has no waterline at full draft");

    const std::size_t nf = table.froude_numbers.size();
    const std::size_t nd = table.draft_fractions.size();
    table.cw = Matrix(nf, nd);
    parallel_for(nf * nd, [&](std::size_t cell) {
        const std::size_t i = cell / nd;
        const std::size_t j = cell % nd;
        const double speed = table.froude_numbers[i] * std::sqrt(env.g * lwl_full);
        const PointGrid& grid = grids[j];
        const double span = grid.x.back() - grid.x.front();
        try {
            // michell_cw references the grid's own span; rescale so the
            // stored value references LOA^2 like the drag equation.
            table.cw(i, j) =
                michell_cw(grid, speed, env, opts.michell) * (span * span) / (loa * loa);
        } catch (const QuadratureError& e) {
            throw QuadratureError("cell (" + std::to_string(i) + "," + std::to_string(j) +
                                      "): " + e.what(),
                                  e.achieved_tolerance());
        }
    });
    return table;
}

double interp_cw(const DragTable& table, double fn, double draft_frac) {
    const auto& f = table.froude_numbers;
    const auto& d = table.draft_fractions;
    if (f.size() < 2 || d.size() < 2) throw ExtrapolationError("drag table is degenerate");
    if (fn < f.front() || fn > f.back()) {
        throw ExtrapolationError("Fn " + format_double(fn) + " outside table [" +
                                 format_double(f.front()) + ", " + format_double(f.back()) + "]");
    }
    if (draft_frac < d.front() || draft_frac > d.back()) {
        throw ExtrapolationError("draft fraction " + format_double(draft_frac) +
                                 " outside table [" + format_double(d.front()) + ", " +
                                 format_double(d.back()) + "]");
    }

    auto bracket = [](const std::vector<double>& axis, double v) {
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(axis.begin(), axis.end(), v) - axis.begin());
        if (i > 0) --i;
        if (i + 1 >= axis.size()) i = axis.size() - 2;
        return i;
    };
    const std::size_t i = bracket(f, fn);
    const std::size_t j = bracket(d, draft_frac);
    const double t = (fn - f[i]) / (f[i + 1] - f[i]);
    const double s = (draft_frac - d[j]) / (d[j + 1] - d[j]);
    return (1.0 - t) * (1.0 - s) * table.cw(i, j) + t * (1.0 - s) * table.cw(i + 1, j) +
           (1.0 - t) * s * table.cw(i, j + 1) + t * s * table.cw(i + 1, j + 1);
}

void write_drag_table(const DragTable& table, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "hullforge-drag-table 1\n";
    os << "loa " << format_double(table.loa) << "\n";
    os << "dd " << format_double(table.dd) << "\n";
    os << "froude_numbers";
    for (const double v : table.froude_numbers) os << " " << format_double(v);
    os << "\ndraft_fractions";
    for (const double v : table.draft_fractions) os << " " << format_double(v);
    os << "\ncw\n";
    for (std::size_t i = 0; i < table.cw.rows; ++i) {
        for (std::size_t j = 0; j < table.cw.cols; ++j) {
            os << (j ? " " : "") << format_double(table.cw(i, j));
        }
        os << "\n";
    }
    if (!os) throw IoError("write failed: " + path);
}

DragTable read_drag_table(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(is, line) || line != "hullforge-drag-table 1") {
        throw ParseError("not a drag table file: " + path);
    }
    DragTable table;
    auto expect_values = [&](const std::string& key, std::vector<double>& out) {
        if (!std::getline(is, line)) throw ParseError("truncated drag table: " + path);
        std::istringstream ss(line);
        std::string head;
        ss >> head;
        if (head != key) throw ParseError("expected '" + key + "' in " + path);
        std::string tok;
        while (ss >> tok) {
            double v = 0.0;
            if (!parse_double(tok, v)) throw ParseError("bad number '" + tok + "' in " + path);
            out.push_back(v);
        }
    };
    std::vector<double> scalar;
    expect_values("loa", scalar);
    if (scalar.size() != 1) throw ParseError("bad loa line in " + path);
    table.loa = scalar[0];
    scalar.clear();
    expect_values("dd", scalar);
    if (scalar.size() != 1) throw ParseError("bad dd line in " + path);
    table.dd = scalar[0];
    expect_values("froude_numbers", table.froude_numbers);
    expect_values("draft_fractions", table.draft_fractions);
    if (!std::getline(is, line) || line != "cw") throw ParseError("expected 'cw' in " + path);
    table.cw = Matrix(table.froude_numbers.size(), table.draft_fractions.size());
    for (std::size_t i = 0; i < table.cw.rows; ++i) {
        if (!std::getline(is, line)) throw ParseError("truncated cw matrix in " + path);
        std::istringstream ss(line);
        std::string tok;
        for (std::size_t j = 0; j < table.cw.cols; ++j) {
            if (!(ss >> tok)) throw ParseError("short cw row in " + path);
            double v = 0.0;
            if (!parse_double(tok, v)) throw ParseError("bad number '" + tok + "' in " + path);
            table.cw(i, j) = v;
        }
    }
    return table;
}

DragResult calc_drag(const HullParameters& p, const DragTable& table, double speed, double draft,
                     const FluidEnvironment& env) {
    if (!(speed > 0.0)) throw DomainError("speed must be positive");
    const double depth = p.depth();
    if (!(draft > 0.0) || draft > depth * (1.0 + 1e-12)) {
        throw DraftError("draft " + format_double(draft) + " outside (0, " +
                         format_double(depth) + "]");
    }

    const Hydrostatics hs = hydrostatics(p, draft);
    if (!(hs.waterline_length > 0.0)) {
        throw DraftError("hull has no waterline at draft " + format_double(draft));
    }

    const double cf = calc_cf(speed, hs.waterline_length, env);
    DragResult r;
    r.rf = 0.5 * env.rho * hs.wetted_surface * speed * speed * cf;
    r.fn = speed / std::sqrt(env.g * hs.waterline_length);
    const double cw = interp_cw(table, r.fn, draft / depth);
    r.rw = 0.5 * env.rho * speed * speed * table.loa * table.loa * cw;
    r.rt = r.rw + r.rf;
    return r;
}

PointGrid wigley_grid(double length, double beam, double draft, int nx, int nz) {
    PointGrid grid;
    grid.draft = draft;
    grid.lwl = length;
    grid.x.resize(static_cast<std::size_t>(nx));
    grid.z.resize(static_cast<std::size_t>(nz));
    for (int i = 0; i < nx; ++i) {
        grid.x[static_cast<std::size_t>(i)] = length * i / (nx - 1.0);
    }
    for (int j = 0; j < nz; ++j) {
        grid.z[static_cast<std::size_t>(j)] = -draft + draft * j / (nz - 1.0);
    }
    grid.y.assign(grid.x.size(), std::vector<double>(grid.z.size(), 0.0));
    for (std::size_t i = 0; i < grid.x.size(); ++i) {
        const double xi = 2.0 * grid.x[i] / length - 1.0;
        for (std::size_t j = 0; j < grid.z.size(); ++j) {
            const double zj = grid.z[j] / draft;
            grid.y[i][j] = 0.5 * beam * (1.0 - xi * xi) * (1.0 - zj * zj);
        }
    }
    return grid;
}

} // namespace hullforge
