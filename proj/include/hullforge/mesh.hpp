#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hullforge/hull_model.hpp"
#include "hullforge/params.hpp"

namespace hullforge {

// Closed triangle mesh of a hull. Indices are 0-based; winding is
// outward (signed volume positive for a valid build).
struct TriMesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::uint64_t provenance = 0; // hash of the source parameter vector

    double signed_volume() const;
    double surface_area() const;
};

struct ManifoldReport {
    bool closed = false;          // every edge shared by exactly 2 triangles
    bool consistent_winding = false;
    long euler_characteristic = 0;
    double signed_volume = 0.0;
    bool ok() const { return closed && consistent_winding && euler_characteristic == 2 && signed_volume > 0.0; }
};

ManifoldReport check_manifold(const TriMesh& mesh);

// Triangulates the full hull up to the deck, capped at deck, transom
// and (for flat-floored hulls) the bottom. Throws MeshError when the
// result is not a closed manifold, which indicates an infeasible hull.
TriMesh build_mesh(const HullParameters& p, int nx = 80, int nz = 40);

// Shared worker: triangulates up to z = z_top. When cap_top is false
// the top boundary is left open (used for wetted-surface integration).
// No manifold validation is performed here.
TriMesh build_surface(const HullModel& hull, double z_top, int nx, int nz, bool cap_top);

// Binary STL, little-endian, 80-byte header, normals recomputed from
// winding. Throws IoError on filesystem failure.
void write_stl(const TriMesh& mesh, const std::string& path);

// Reads a binary STL back as a triangle soup welded on exact vertex
// coordinates. Used by tests and round-trip checks.
TriMesh read_stl(const std::string& path);

} // namespace hullforge
