#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hullforge/errors.hpp"
#include "hullforge/geometry.hpp"
#include "hullforge/hull_model.hpp"
#include "hullforge/mesh.hpp"
#include "hullforge/params.hpp"

#include "support.hpp"

using namespace hullforge;
using testsupport::set_named;
using testsupport::valid_base;

TEST_CASE("offsets are symmetric, finite and inside the beam box") {
    const HullParameters p = validate_params(valid_base());
    const HullModel hull(p);
    const double loa = hull.loa();
    const double depth = hull.depth();
    double y_max = 0.0;
    for (int i = 0; i <= 60; ++i) {
        for (int j = 0; j <= 30; ++j) {
            const double x = loa * i / 60;
            const double z = depth * j / 30;
            const double y = hull.offset(x, z);
            REQUIRE(std::isfinite(y));
            REQUIRE(y >= 0.0);
            y_max = std::max(y_max, y);
        }
    }
    CHECK(y_max > 0.1);        // the hull has a body
    CHECK(y_max < 0.5 * loa);  // and it is narrower than it is long
    CHECK(half_breadth(p, 0.5 * loa, 0.5 * depth) ==
          doctest::Approx(hull.offset(0.5 * loa, 0.5 * depth)));
}

TEST_CASE("point grid covers the hull band at the requested draft") {
    const HullParameters p = validate_params(valid_base());
    const double draft = 0.6 * p.depth();
    const PointGrid grid = point_grid(p, draft, 40, 20);

    REQUIRE(grid.x.size() == 40);
    REQUIRE(grid.z.size() == 20);
    REQUIRE(grid.y.size() == grid.x.size());
    CHECK(grid.draft == doctest::Approx(draft));
    CHECK(grid.lwl > 0.0);
    CHECK(grid.lwl <= p.loa());

    // z runs keel-up to the waterline as negative depths-below-surface
    // convention: extremes must span [-draft, 0].
    CHECK(grid.z.front() == doctest::Approx(-draft));
    CHECK(grid.z.back() == doctest::Approx(0.0));

    for (const auto& column : grid.y) {
        REQUIRE(column.size() == grid.z.size());
        for (const double y : column) {
            REQUIRE(std::isfinite(y));
            REQUIRE(y >= 0.0);
        }
    }
}

TEST_CASE("point grid rejects impossible drafts") {
    const HullParameters p = validate_params(valid_base());
    CHECK_THROWS_AS(point_grid(p, 0.0, 20, 10), DraftError);
    CHECK_THROWS_AS(point_grid(p, -0.5, 20, 10), DraftError);
    CHECK_THROWS_AS(point_grid(p, p.depth() * 1.5, 20, 10), DraftError);
}

TEST_CASE("hydrostatics agree with the independent mesh volume") {
    const HullParameters p = validate_params(valid_base());
    const double draft = 0.6 * p.depth();
    const Hydrostatics hs = hydrostatics(p, draft);

    CHECK(hs.displaced_volume > 0.0);
    CHECK(hs.wetted_surface > 0.0);
    CHECK(hs.waterline_length > 0.0);
    CHECK(hs.waterline_length <= p.loa());

    // Cross-check: triangulate the hull up to the waterline with a
    // closing deck cap; its signed volume integrates the same solid by
    // a completely different route.
    const TriMesh wetted = build_surface(HullModel(p), draft, 160, 80, true);
    CHECK(hs.displaced_volume ==
          doctest::Approx(wetted.signed_volume()).epsilon(0.02));

    // The open (uncapped) surface area is the wetted surface.
    const TriMesh open_surface = build_surface(HullModel(p), draft, 160, 80, false);
    CHECK(hs.wetted_surface ==
          doctest::Approx(open_surface.surface_area()).epsilon(0.02));
}

TEST_CASE("hydrostatics grow monotonically with draft") {
    const HullParameters p = validate_params(valid_base());
    double prev_vol = 0.0;
    for (const double f : {0.25, 0.5, 0.75, 1.0}) {
        const Hydrostatics hs = hydrostatics(p, f * p.depth());
        CHECK(hs.displaced_volume > prev_vol);
        prev_vol = hs.displaced_volume;
    }
    CHECK_THROWS_AS(hydrostatics(p, 0.0), DraftError);
    CHECK_THROWS_AS(hydrostatics(p, 2.0 * p.depth()), DraftError);
}

TEST_CASE("the reference hull is feasible with no violations") {
    const HullParameters p = validate_params(valid_base());
    const FeasibilityReport rep = feasibility_check(p);
    CHECK(rep.feasible);
    CHECK(rep.watertight);
    CHECK(rep.self_intersection_free);
    CHECK(rep.violated_checks.empty());
}

TEST_CASE("a strongly hollow entrance fails the offset check") {
    // A large negative drift angle pulls the entrance below the
    // centerplane; the raw offset dips negative and feasibility names
    // the failed check.
    auto raw = valid_base();
    raw[param_index("DRIFT(A)")] = -3.9;
    raw[param_index("DRIFT(B)")] = -3.9;
    raw[param_index("DRIFT(C)")] = 0.5;
    const HullParameters p = validate_params(raw);
    const HullModel hull(p);
    double y_min = 0.0;
    for (int i = 0; i <= 120; ++i) {
        for (int j = 0; j <= 60; ++j) {
            y_min = std::min(y_min, hull.raw_offset(hull.loa() * i / 120.0,
                                                    hull.depth() * j / 60.0));
        }
    }
    REQUIRE_MESSAGE(y_min < 0.0, "fixture should carve below the centerplane");
    const FeasibilityReport rep = feasibility_check(p);
    CHECK_FALSE(rep.feasible);
    CHECK_FALSE(rep.self_intersection_free);
    bool named = false;
    for (const auto& c : rep.violated_checks) named = named || c == "offsets_nonnegative";
    CHECK(named);
}

TEST_CASE("bulbs extend the hull envelope") {
    auto raw = valid_base();
    const HullParameters plain = validate_params(raw);
    raw = set_named(raw, "bit_BB", 1.0);
    raw = set_named(raw, "Lbb", 0.12);
    const HullParameters bulbed = validate_params(raw);

    const HullModel h0(plain);
    const HullModel h1(bulbed);
    // Below the bulb top the leading envelope must reach further
    // forward somewhere.
    double gain = 0.0;
    for (int j = 1; j <= 20; ++j) {
        const double z = bulbed.wl() * bulbed.depth() * j / 21.0;
        gain = std::max(gain, h1.forward_extent(z) - h0.forward_extent(z));
    }
    CHECK(gain > 0.05);
}
