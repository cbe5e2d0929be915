#pragma once

#include <array>
#include <string>
#include <vector>

#include "cellforge/csg.hpp"
#include "cellforge/geom.hpp"

namespace fixtures
{
using namespace cellforge;

struct CsgFixture
{
    std::string name;
    CsgExpr expr;
    bool connected = true;
};

inline CsgExpr box(double x0, double x1, double y0, double y1, double z0, double z1)
{
    return CsgExpr::box(x0, x1, y0, y1, z0, z1);
}

inline CsgExpr cyl(Axis a, double c1, double c2, double r, double h0, double h1)
{
    return CsgExpr::cylinder(a, c1, c2, r, h0, h1);
}

// Boxes, stacked/L/T unions, cylinder holes, multi-hole plates and bosses.
inline std::vector<CsgFixture> csg_suite()
{
    std::vector<CsgFixture> f;
    f.push_back({"unit_box", box(0, 1, 0, 1, 0, 1)});
    f.push_back({"offset_box", box(-1, 2, 0.5, 1.5, 0, 3)});
    f.push_back({"stack", unite(box(0, 1, 0, 1, 0, 1), box(0, 1, 0, 1, 1, 2))});
    f.push_back({"l_shape", unite(box(0, 2, 0, 1, 0, 1), box(0, 1, 0, 1, 1, 2))});
    f.push_back({"t_shape", unite(box(0, 3, 0, 1, 0, 1), box(1, 2, 1, 3, 0, 1))});
    f.push_back({"u_shape", unite(unite(box(0, 1, 0, 3, 0, 1), box(1, 3, 0, 1, 0, 1)),
                                  box(3, 4, 0, 3, 0, 1))});
    f.push_back({"plus", unite(box(1, 2, 0, 3, 0, 1), box(0, 3, 1, 2, 0, 1))});
    f.push_back({"stairs", unite(unite(box(0, 3, 0, 1, 0, 1), box(1, 3, 0, 1, 1, 2)),
                                 box(2, 3, 0, 1, 2, 3))});
    f.push_back({"through_hole", subtract(box(0, 1, 0, 1, 0, 1), cyl(Axis::Z, 0.5, 0.5, 0.2, -1, 2))});
    f.push_back({"plate_two_holes",
                 subtract(box(0, 4, 0, 2, 0, 0.5),
                          unite(cyl(Axis::Z, 1, 1, 0.4, -1, 1), cyl(Axis::Z, 3, 1, 0.4, -1, 1)))});
    {
        CsgExpr holes = cyl(Axis::Z, 1, 1, 0.3, -1, 1);
        for (auto [x, y] : {std::pair{3.0, 1.0}, {1.0, 3.0}, {3.0, 3.0}})
            holes = unite(holes, cyl(Axis::Z, x, y, 0.3, -1, 1));
        f.push_back({"plate_four_holes", subtract(box(0, 4, 0, 4, 0, 0.25), holes)});
    }
    f.push_back({"x_bore", subtract(box(0, 3, 0, 1, 0, 1), cyl(Axis::X, 0.5, 0.5, 0.25, -1, 4))});
    f.push_back({"blind_hole", subtract(box(0, 2, 0, 2, 0, 2), cyl(Axis::Y, 1, 1, 0.5, 1, 3))});
    f.push_back({"rod", cyl(Axis::Z, 0, 0, 1, 0, 2)});
    f.push_back({"boss", unite(box(-2, 2, -2, 2, 0, 1), cyl(Axis::Z, 0, 0, 1, 1, 2))});
    f.push_back({"side_boss", unite(box(0, 2, 0, 2, 0, 2), cyl(Axis::Y, 1, 1, 0.5, 2, 3))});
    f.push_back({"l_with_hole", subtract(unite(box(0, 4, 0, 1, 0, 1), box(0, 1, 0, 1, 1, 4)),
                                         cyl(Axis::Z, 2.5, 0.5, 0.3, -1, 2))});
    f.push_back({"intersection", intersect(box(0, 2, 0, 2, 0, 2), box(1, 3, 1, 3, 1, 3))});
    f.push_back({"notch", subtract(box(0, 3, 0, 2, 0, 2), box(1, 2, -1, 3, 1, 3))});
    f.push_back({"pocket", subtract(box(0, 3, 0, 3, 0, 2), box(1, 2, 1, 2, 1, 3))});
    f.push_back({"tube", subtract(cyl(Axis::Z, 0, 0, 2, 0, 1), cyl(Axis::Z, 0, 0, 0.5, -1, 2))});
    f.push_back({"cross_bores", subtract(subtract(box(0, 2, 0, 2, 0, 2), cyl(Axis::X, 1, 1, 0.3, -1, 3)),
                                         cyl(Axis::Y, 1, 1, 0.3, -1, 3))});
    f.push_back({"d_shape", intersect(cyl(Axis::Z, 0, 0, 1, 0, 1), box(-2, 0.5, -2, 2, -1, 2))});
    f.push_back({"flange", unite(cyl(Axis::X, 0, 0, 1.5, 0, 0.5), cyl(Axis::X, 0, 0, 0.75, 0.5, 2))});
    f.push_back({"two_islands", unite(box(0, 1, 0, 1, 0, 1), box(2, 3, 0, 1, 0, 1)), false});
    return f;
}

//! Plane-only part with one cell per box; geometrically equal planes share ids.
inline Part box_part(const std::vector<std::array<double, 6>>& boxes, std::string id = "boxes")
{
    Part part;
    part.id = std::move(id);
    auto surface_for = [&](Axis a, double v) {
        for (const auto& s : part.surfaces)
            if (s.axis() == a && s.offset() == v)
                return s.id;
        part.surfaces.push_back(Surface::plane("s" + std::to_string(part.surfaces.size() + 1), a, v));
        return part.surfaces.back().id;
    };
    for (const auto& b : boxes)
    {
        Cell c;
        c.id = "c" + std::to_string(part.cells.size() + 1);
        for (int a = 0; a < 3; ++a)
        {
            c.region.push_back({surface_for(static_cast<Axis>(a), b[2 * a]), Sign::Plus});
            c.region.push_back({surface_for(static_cast<Axis>(a), b[2 * a + 1]), Sign::Minus});
        }
        part.cells.push_back(std::move(c));
    }
    return part;
}

inline HalfSpaceCell box_cell(double x0, double x1, double y0, double y1, double z0, double z1,
                              std::string id = "c")
{
    HalfSpaceCell c;
    c.id = std::move(id);
    const double v[6] = {x0, x1, y0, y1, z0, z1};
    for (int a = 0; a < 3; ++a)
    {
        const auto ax = static_cast<Axis>(a);
        c.constraints.push_back({Surface::plane("p" + std::to_string(2 * a), ax, v[2 * a]), Sign::Plus});
        c.constraints.push_back(
            {Surface::plane("p" + std::to_string(2 * a + 1), ax, v[2 * a + 1]), Sign::Minus});
    }
    return c;
}

//! Row of n unit boxes along x: a path graph.
inline Part row_part(int n, std::string id = "row")
{
    std::vector<std::array<double, 6>> boxes;
    for (int i = 0; i < n; ++i)
        boxes.push_back({double(i), double(i + 1), 0, 1, 0, 1});
    return box_part(boxes, std::move(id));
}

//! Boxes [0,1]^3 and [1,2]x[0,1]^2 that share only the plane x = 1 by id.
inline Part pair_part()
{
    Part p;
    p.id = "pair";
    p.surfaces = {Surface::plane("s1", Axis::X, 0),  Surface::plane("s2", Axis::X, 1),
                  Surface::plane("s3", Axis::Y, 0),  Surface::plane("s4", Axis::Y, 1),
                  Surface::plane("s5", Axis::Z, 0),  Surface::plane("s6", Axis::Z, 1),
                  Surface::plane("s7", Axis::X, 2),  Surface::plane("s8", Axis::Y, 0),
                  Surface::plane("s9", Axis::Y, 1),  Surface::plane("s10", Axis::Z, 0),
                  Surface::plane("s11", Axis::Z, 1)};
    p.cells = {{"c1", {{"s1", Sign::Plus}, {"s2", Sign::Minus}, {"s3", Sign::Plus},
                       {"s4", Sign::Minus}, {"s5", Sign::Plus}, {"s6", Sign::Minus}}},
               {"c2", {{"s2", Sign::Plus}, {"s7", Sign::Minus}, {"s8", Sign::Plus},
                       {"s9", Sign::Minus}, {"s10", Sign::Plus}, {"s11", Sign::Minus}}}};
    return p;
}

} // namespace fixtures
