#include <doctest.h>

#include <algorithm>
#include <set>

#include "cellforge/decompose.hpp"
#include "cellforge/error.hpp"
#include "fixtures.hpp"

using namespace cellforge;
using fixtures::box;
using fixtures::cyl;

namespace
{
DecomposeConfig no_merge()
{
    DecomposeConfig cfg;
    cfg.merge = false;
    return cfg;
}

// Grid-enumeration oracle for box-only expressions: count the finite grid
// boxes spanned by all box faces whose center lies in the solid.
std::size_t grid_cells(const CsgExpr& expr)
{
    std::array<std::set<double>, 3> coords;
    expr.visit_primitives(
        [&](const BoxPrim& b) {
            for (int a = 0; a < 3; ++a)
            {
                coords[a].insert(b.bounds[2 * a]);
                coords[a].insert(b.bounds[2 * a + 1]);
            }
        },
        [](const CylPrim&) { FAIL("box-only oracle"); });
    std::array<std::vector<double>, 3> c;
    for (int a = 0; a < 3; ++a)
        c[a].assign(coords[a].begin(), coords[a].end());
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < c[0].size(); ++i)
        for (std::size_t j = 0; j + 1 < c[1].size(); ++j)
            for (std::size_t k = 0; k + 1 < c[2].size(); ++k)
            {
                const Vec3 mid{(c[0][i] + c[0][i + 1]) / 2, (c[1][j] + c[1][j + 1]) / 2,
                               (c[2][k] + c[2][k + 1]) / 2};
                n += expr.contains(mid);
            }
    return n;
}

bool has_term(const Part& p, const Cell& c, SurfaceKind kind, Sign sign)
{
    return std::any_of(c.region.begin(), c.region.end(), [&](const Term& t) {
        return t.sign == sign && p.find_surface(t.surface)->kind == kind;
    });
}

} // namespace

TEST_CASE("unit box decomposes to one six-plane cell")
{
    const Part p = decompose(box(0, 1, 0, 1, 0, 1), {}, "cube");
    CHECK(p.id == "cube");
    REQUIRE(p.cells.size() == 1);
    CHECK(p.surfaces.size() == 6);
    CHECK(p.cells[0].region.size() == 6);
    CHECK_NOTHROW(validate_part(p, {}));
}

TEST_CASE("stacked boxes merge into one cell")
{
    const CsgExpr e = unite(box(0, 1, 0, 1, 0, 1), box(0, 1, 0, 1, 1, 2));
    CHECK(decompose(e, no_merge()).cells.size() == 2);
    const Part merged = decompose(e, {});
    CHECK(merged.cells.size() == 1);
    // z = 1 is no longer referenced.
    CHECK(merged.surfaces.size() == 6);
}

TEST_CASE("L-shape: grid oracle before merging, two cells after")
{
    const CsgExpr e = unite(box(0, 2, 0, 1, 0, 1), box(0, 1, 0, 1, 1, 2));
    CHECK(grid_cells(e) == 3);
    CHECK(decompose(e, no_merge()).cells.size() == 3);
    CHECK(decompose(e, {}).cells.size() == 2);
}

TEST_CASE("box-only fixtures match the grid oracle without merging")
{
    for (const auto& f : fixtures::csg_suite())
    {
        bool box_only = true;
        f.expr.visit_primitives([](const BoxPrim&) {}, [&](const CylPrim&) { box_only = false; });
        if (!box_only)
            continue;
        CAPTURE(f.name);
        CHECK(decompose(f.expr, no_merge()).cells.size() == grid_cells(f.expr));
    }
}

TEST_CASE("through hole: one cell outside the cylinder")
{
    const Part p = decompose(subtract(box(0, 1, 0, 1, 0, 1), cyl(Axis::Z, 0.5, 0.5, 0.2, -1, 2)), {});
    REQUIRE(p.cells.size() == 1);
    CHECK(p.surfaces.size() == 7);
    CHECK(has_term(p, p.cells[0], SurfaceKind::CylZ, Sign::Plus));
    CHECK(p.cells[0].region.size() == 7);
}

TEST_CASE("boss on a plate keeps the cylinder as its own cell")
{
    const Part p = decompose(unite(box(-2, 2, -2, 2, 0, 1), cyl(Axis::Z, 0, 0, 1, 1, 2)), {});
    CHECK(p.cells.size() == 2);
    std::size_t inside = 0;
    for (const auto& c : p.cells)
        inside += has_term(p, c, SurfaceKind::CylZ, Sign::Minus);
    CHECK(inside == 1);
    CHECK_NOTHROW(validate_part(p, {}));
}

TEST_CASE("surfaces are numbered densely from s1")
{
    const Part p = decompose(unite(box(0, 2, 0, 1, 0, 1), box(0, 1, 0, 1, 1, 2)), {});
    for (std::size_t i = 0; i < p.surfaces.size(); ++i)
        CHECK(p.surfaces[i].id == "s" + std::to_string(i + 1));
    for (std::size_t i = 0; i < p.cells.size(); ++i)
        CHECK(p.cells[i].id == "c" + std::to_string(i + 1));
    // Planes by axis come before cylinders.
    CHECK(p.surfaces.front().kind == SurfaceKind::PlaneX);
}

TEST_CASE("decompose is deterministic and seed independent for exact regions")
{
    const CsgExpr e = fixtures::csg_suite()[9].expr;
    DecomposeConfig a, b;
    b.seed = 99;
    CHECK(part_to_json(decompose(e, a)).dump() == part_to_json(decompose(e, a)).dump());
    CHECK(part_to_json(decompose(e, a)).dump() == part_to_json(decompose(e, b)).dump());
}

TEST_CASE("empty solid")
{
    CHECK_THROWS_AS(decompose(subtract(box(0, 1, 0, 1, 0, 1), box(-1, 2, -1, 2, -1, 2)), {}),
                    EmptySolid);
}

TEST_CASE("region_empty")
{
    const DecomposeConfig cfg;
    const Box3 b{{0, 0, 0}, {1, 1, 1}};
    auto z = [](double x, double y, double r, Sign s) {
        return Constraint{Surface::cylinder("k", Axis::Z, x, y, r), s};
    };
    std::vector<Constraint> far{z(5, 5, 1, Sign::Minus)};
    CHECK(region_empty(b, far, cfg));
    std::vector<Constraint> huge{z(0.5, 0.5, 10, Sign::Plus)};
    CHECK(region_empty(b, huge, cfg));
    std::vector<Constraint> small{z(0.5, 0.5, 0.2, Sign::Minus)};
    CHECK_FALSE(region_empty(b, small, cfg));
    std::vector<Constraint> ring{z(0.5, 0.5, 0.2, Sign::Plus)};
    CHECK_FALSE(region_empty(b, ring, cfg));
    // Two disjoint insides.
    std::vector<Constraint> two{z(0.2, 0.5, 0.1, Sign::Minus), z(0.8, 0.5, 0.1, Sign::Minus)};
    CHECK(region_empty(b, two, cfg));
    std::vector<Constraint> lens{z(0.4, 0.5, 0.2, Sign::Minus), z(0.6, 0.5, 0.2, Sign::Minus)};
    CHECK_FALSE(region_empty(b, lens, cfg));
}

TEST_CASE("verify_decomposition")
{
    const CsgExpr unit = box(0, 1, 0, 1, 0, 1);
    CHECK(verify_decomposition(unit, decompose(unit, {}), 10000, 1) == 1.0);

    // Dropping one of two unit cells: the disagreement is that cell's volume
    // over the sampling box (the solid's bounds grown by 5% per side).
    const CsgExpr stack = unite(box(0, 1, 0, 1, 0, 1), box(0, 1, 0, 1, 1, 2));
    Part p = decompose(stack, no_merge());
    REQUIRE(p.cells.size() == 2);
    p.cells.pop_back();
    const double sample_volume = 1.1 * 1.1 * 2.2;
    const double expected = 1.0 - 1.0 / sample_volume;
    CHECK(verify_decomposition(stack, p, 100000, 3) == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("fixture suite decomposes into valid parts")
{
    for (const auto& f : fixtures::csg_suite())
    {
        CAPTURE(f.name);
        const Part p = decompose(f.expr, {}, f.name);
        CHECK_NOTHROW(validate_part(p, {}));
        CHECK(verify_decomposition(f.expr, p, 20000, 11) >= 0.999);
    }
}
