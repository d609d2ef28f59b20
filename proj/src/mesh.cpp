#include "hullforge/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <unordered_map>

#include "hullforge/errors.hpp"

namespace hullforge {

double TriMesh::signed_volume() const {
    double v6 = 0.0;
    for (const auto& t : triangles) {
        const auto& a = vertices[t[0]];
        const auto& b = vertices[t[1]];
        const auto& c = vertices[t[2]];
        v6 += a[0] * (b[1] * c[2] - b[2] * c[1]) + a[1] * (b[2] * c[0] - b[0] * c[2]) +
              a[2] * (b[0] * c[1] - b[1] * c[0]);
    }
    return v6 / 6.0;
}

double TriMesh::surface_area() const {
    double area = 0.0;
    for (const auto& t : triangles) {
        const auto& a = vertices[t[0]];
        const auto& b = vertices[t[1]];
        const auto& c = vertices[t[2]];
        const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
        const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
        const double nx = uy * vz - uz * vy;
        const double ny = uz * vx - ux * vz;
        const double nz = ux * vy - uy * vx;
        area += 0.5 * std::sqrt(nx * nx + ny * ny + nz * nz);
    }
    return area;
}

ManifoldReport check_manifold(const TriMesh& mesh) {
    ManifoldReport rep;
    std::unordered_map<std::uint64_t, int> directed;
    directed.reserve(mesh.triangles.size() * 3);
    auto key = [](std::uint32_t a, std::uint32_t b) {
        return (static_cast<std::uint64_t>(a) << 32) | b;
    };
    for (const auto& t : mesh.triangles) {
        directed[key(t[0], t[1])]++;
        directed[key(t[1], t[2])]++;
        directed[key(t[2], t[0])]++;
    }
    bool closed = true, consistent = true;
    std::size_t undirected = 0;
    for (const auto& [k, count] : directed) {
        const auto a = static_cast<std::uint32_t>(k >> 32);
        const auto b = static_cast<std::uint32_t>(k & 0xffffffffu);
        if (count != 1) consistent = false;
        if (a < b) {
            ++undirected;
            auto rev = directed.find(key(b, a));
            const int rc = rev == directed.end() ? 0 : rev->second;
            if (count + rc != 2) closed = false;
        } else if (directed.find(key(b, a)) == directed.end()) {
            // Edge present only in this direction.
            ++undirected;
            closed = false;
        }
    }
    std::vector<bool> used(mesh.vertices.size(), false);
    for (const auto& t : mesh.triangles) {
        used[t[0]] = used[t[1]] = used[t[2]] = true;
    }
    const auto v = static_cast<long>(std::count(used.begin(), used.end(), true));
    rep.closed = closed;
    rep.consistent_winding = closed && consistent;
    rep.euler_characteristic =
        v - static_cast<long>(undirected) + static_cast<long>(mesh.triangles.size());
    rep.signed_volume = mesh.signed_volume();
    return rep;
}

namespace {

struct GridBuilder {
    std::vector<std::array<double, 3>> verts;
    std::vector<std::array<std::uint32_t, 3>> tris;

    std::uint32_t add_vertex(double x, double y, double z) {
        verts.push_back({x, y, z});
        return static_cast<std::uint32_t>(verts.size() - 1);
    }

    void add_tri(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        if (a == b || b == c || a == c) return;
        tris.push_back({a, b, c});
    }
};

} // namespace

TriMesh build_surface(const HullModel& hull, double z_top, int nx, int nz, bool cap_top) {
    nx = std::max(nx, 4);
    nz = std::max(nz, 4);
    const double loa = hull.loa();
    const double weld = 1e-9 * std::max(1.0, loa);

    GridBuilder gb;
    const auto rows = static_cast<std::size_t>(nz + 1);
    const auto cols = static_cast<std::size_t>(nx + 1);
    std::vector<std::vector<std::uint32_t>> port(rows, std::vector<std::uint32_t>(cols));
    std::vector<std::vector<std::uint32_t>> star(rows, std::vector<std::uint32_t>(cols));

    for (std::size_t j = 0; j < rows; ++j) {
        const double z = z_top * static_cast<double>(j) / nz;
        double a = std::max(0.0, hull.aft_extent(z));
        double f = std::min(loa, hull.forward_extent(z));
        if (f < a) a = f = 0.5 * (a + f);
        double px = 0.0, py = 0.0;
        for (std::size_t i = 0; i < cols; ++i) {
            const double x = a + (f - a) * static_cast<double>(i) / nx;
            const double y = hull.offset(x, z);
            if (i > 0 && std::abs(x - px) < weld && std::abs(y - py) < weld) {
                port[j][i] = port[j][i - 1];
                star[j][i] = star[j][i - 1];
            } else if (y < weld) {
                const std::uint32_t v = gb.add_vertex(x, 0.0, z);
                port[j][i] = v;
                star[j][i] = v;
            } else {
                port[j][i] = gb.add_vertex(x, y, z);
                star[j][i] = gb.add_vertex(x, -y, z);
            }
            px = x;
            py = y;
        }
    }

    // Side shells. Port winding gives +y outward normals; starboard is
    // the mirror image.
    for (std::size_t j = 0; j + 1 < rows; ++j) {
        for (std::size_t i = 0; i + 1 < cols; ++i) {
            const auto a = port[j][i], b = port[j][i + 1];
            const auto c = port[j + 1][i + 1], d = port[j + 1][i];
            const auto sa = star[j][i], sb = star[j][i + 1];
            const auto sc = star[j + 1][i + 1], sd = star[j + 1][i];
            // A triangle whose corners all sit on the centerline lies in
            // the symmetry plane, not on the hull; both shells would
            // emit it and double the face.
            const bool wa = a == sa, wb = b == sb, wc = c == sc, wd = d == sd;
            if (!(wa && wc && wb)) gb.add_tri(a, c, b);
            if (!(wa && wd && wc)) gb.add_tri(a, d, c);
            if (!(wa && wb && wc)) gb.add_tri(sa, sb, sc);
            if (!(wa && wc && wd)) gb.add_tri(sa, sc, sd);
        }
    }

    // Aft seam (transom face) and forward seam between the port and
    // starboard boundary chains; welded spans emit nothing.
    for (std::size_t j = 0; j + 1 < rows; ++j) {
        gb.add_tri(port[j][0], star[j][0], star[j + 1][0]);
        gb.add_tri(port[j][0], star[j + 1][0], port[j + 1][0]);
        const std::size_t e = cols - 1;
        gb.add_tri(port[j][e], star[j + 1][e], star[j][e]);
        gb.add_tri(port[j][e], port[j + 1][e], star[j + 1][e]);
    }

    // Bottom plate (flat-floored hulls have positive beam at z = 0).
    for (std::size_t i = 0; i + 1 < cols; ++i) {
        gb.add_tri(port[0][i], star[0][i + 1], star[0][i]);
        gb.add_tri(port[0][i], port[0][i + 1], star[0][i + 1]);
    }

    if (cap_top) {
        const std::size_t top = rows - 1;
        for (std::size_t i = 0; i + 1 < cols; ++i) {
            gb.add_tri(port[top][i], star[top][i], star[top][i + 1]);
            gb.add_tri(port[top][i], star[top][i + 1], port[top][i + 1]);
        }
    }

    // Compact away unreferenced vertices.
    TriMesh mesh;
    std::vector<std::uint32_t> remap(gb.verts.size(), UINT32_MAX);
    for (const auto& t : gb.tris) {
        for (const auto idx : t) {
            if (remap[idx] == UINT32_MAX) {
                remap[idx] = static_cast<std::uint32_t>(mesh.vertices.size());
                mesh.vertices.push_back(gb.verts[idx]);
            }
        }
    }
    mesh.triangles.reserve(gb.tris.size());
    for (const auto& t : gb.tris) {
        mesh.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
    }
    mesh.provenance = hull.params().hash();
    return mesh;
}

TriMesh build_mesh(const HullParameters& p, int nx, int nz) {
    const HullModel hull(p);
    TriMesh mesh = build_surface(hull, hull.depth(), nx, nz, true);
    const ManifoldReport rep = check_manifold(mesh);
    if (!rep.ok()) {
        std::string why;
        if (!rep.closed) why += " open-edges";
        if (!rep.consistent_winding) why += " inconsistent-winding";
        if (rep.euler_characteristic != 2)
            why += " euler=" + std::to_string(rep.euler_characteristic);
        if (rep.signed_volume <= 0.0) why += " nonpositive-volume";
        throw MeshError("triangulation is not a closed manifold:" + why);
    }
    return mesh;
}

void write_stl(const TriMesh& mesh, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);

    char header[80] = {};
    std::memcpy(header, "hullforge", 9);
    os.write(header, 80);
    const auto count = static_cast<std::uint32_t>(mesh.triangles.size());
    os.write(reinterpret_cast<const char*>(&count), 4);

    for (const auto& t : mesh.triangles) {
        const auto& a = mesh.vertices[t[0]];
        const auto& b = mesh.vertices[t[1]];
        const auto& c = mesh.vertices[t[2]];
        const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
        const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
        double nx = uy * vz - uz * vy;
        double ny = uz * vx - ux * vz;
        double nz = ux * vy - uy * vx;
        const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
        if (len > 0.0) {
            nx /= len;
            ny /= len;
            nz /= len;
        } else {
            nx = ny = nz = 0.0;
        }
        float rec[12] = {
            static_cast<float>(nx), static_cast<float>(ny), static_cast<float>(nz),
            static_cast<float>(a[0]), static_cast<float>(a[1]), static_cast<float>(a[2]),
            static_cast<float>(b[0]), static_cast<float>(b[1]), static_cast<float>(b[2]),
            static_cast<float>(c[0]), static_cast<float>(c[1]), static_cast<float>(c[2])};
        os.write(reinterpret_cast<const char*>(rec), 48);
        const std::uint16_t attr = 0;
        os.write(reinterpret_cast<const char*>(&attr), 2);
    }
    if (!os) throw IoError("write failed: " + path);
}

TriMesh read_stl(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path);
    char header[80];
    is.read(header, 80);
    std::uint32_t count = 0;
    is.read(reinterpret_cast<char*>(&count), 4);
    if (!is) throw ParseError("truncated STL header: " + path);

    TriMesh mesh;
    std::map<std::array<float, 3>, std::uint32_t> weld;
    for (std::uint32_t i = 0; i < count; ++i) {
        float rec[12];
        is.read(reinterpret_cast<char*>(rec), 48);
        std::uint16_t attr;
        is.read(reinterpret_cast<char*>(&attr), 2);
        if (!is) throw ParseError("truncated STL record: " + path);
        std::array<std::uint32_t, 3> tri{};
        for (int v = 0; v < 3; ++v) {
            const std::array<float, 3> key = {rec[3 + 3 * v], rec[4 + 3 * v], rec[5 + 3 * v]};
            auto it = weld.find(key);
            if (it == weld.end()) {
                it = weld.emplace(key, static_cast<std::uint32_t>(mesh.vertices.size())).first;
                mesh.vertices.push_back({key[0], key[1], key[2]});
            }
            tri[static_cast<std::size_t>(v)] = it->second;
        }
        mesh.triangles.push_back(tri);
    }
    return mesh;
}

} // namespace hullforge
