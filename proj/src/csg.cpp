#include "cellforge/csg.hpp"

#include <cmath>

#include "cellforge/error.hpp"

namespace cellforge
{
namespace
{
bool inside(const BoxPrim& b, const Vec3& p) noexcept
{
    for (int i = 0; i < 3; ++i)
        if (!(p[i] > b.bounds[2 * i] && p[i] < b.bounds[2 * i + 1]))
            return false;
    return true;
}

double radial(const CylPrim& c, const Vec3& p) noexcept
{
    const auto [u, v] = perpendicular(c.axis);
    return std::hypot(p[u] - c.c1, p[v] - c.c2);
}

bool inside(const CylPrim& c, const Vec3& p) noexcept
{
    const double h = p[to_int(c.axis)];
    return h > c.h0 && h < c.h1 && radial(c, p) < c.r;
}

template<class... Ts>
struct Overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

char axis_char(Axis a) { return static_cast<char>('x' + to_int(a)); }

Axis axis_from(const std::string& s)
{
    if (s == "x")
        return Axis::X;
    if (s == "y")
        return Axis::Y;
    if (s == "z")
        return Axis::Z;
    throw FormatError("axis must be x, y or z, got '" + s + "'");
}

} // namespace

CsgExpr CsgExpr::box(double x0, double x1, double y0, double y1, double z0, double z1)
{
    BoxPrim b{{x0, x1, y0, y1, z0, z1}};
    for (int i = 0; i < 3; ++i)
    {
        if (!std::isfinite(b.bounds[2 * i]) || !std::isfinite(b.bounds[2 * i + 1]) ||
            !(b.bounds[2 * i] < b.bounds[2 * i + 1]))
            throw FormatError("box bounds must be finite with lower < upper");
    }
    return CsgExpr(b);
}

CsgExpr CsgExpr::cylinder(Axis axis, double c1, double c2, double r, double h0, double h1)
{
    if (!std::isfinite(c1) || !std::isfinite(c2) || !std::isfinite(r) ||
        !std::isfinite(h0) || !std::isfinite(h1))
        throw FormatError("cylinder parameters must be finite");
    if (!(r > 0))
        throw FormatError("cylinder radius must be positive");
    if (!(h0 < h1))
        throw FormatError("cylinder needs h0 < h1");
    return CsgExpr(CylPrim{axis, c1, c2, r, h0, h1});
}

CsgExpr CsgExpr::combine(CsgOp op, CsgExpr lhs, CsgExpr rhs)
{
    return CsgExpr(Binary{op, std::make_shared<const CsgExpr>(std::move(lhs)),
                          std::make_shared<const CsgExpr>(std::move(rhs))});
}

bool CsgExpr::contains(const Vec3& p) const noexcept
{
    return std::visit(Overloaded{
                          [&](const BoxPrim& b) { return inside(b, p); },
                          [&](const CylPrim& c) { return inside(c, p); },
                          [&](const Binary& n) {
                              const bool l = n.lhs->contains(p);
                              switch (n.op)
                              {
                                  case CsgOp::Union: return l || n.rhs->contains(p);
                                  case CsgOp::Intersect: return l && n.rhs->contains(p);
                                  case CsgOp::Difference: return l && !n.rhs->contains(p);
                              }
                              return false;
                          },
                      },
                      node_);
}

Box3 CsgExpr::bounds() const noexcept
{
    return std::visit(Overloaded{
                          [](const BoxPrim& b) {
                              return Box3{{b.bounds[0], b.bounds[2], b.bounds[4]},
                                          {b.bounds[1], b.bounds[3], b.bounds[5]}};
                          },
                          [](const CylPrim& c) {
                              Box3 box;
                              const int a = to_int(c.axis);
                              const auto [u, v] = perpendicular(c.axis);
                              box.lo[a] = c.h0;
                              box.hi[a] = c.h1;
                              box.lo[u] = c.c1 - c.r;
                              box.hi[u] = c.c1 + c.r;
                              box.lo[v] = c.c2 - c.r;
                              box.hi[v] = c.c2 + c.r;
                              return box;
                          },
                          [](const Binary& n) {
                              const Box3 l = n.lhs->bounds();
                              switch (n.op)
                              {
                                  case CsgOp::Union: return l.unite(n.rhs->bounds());
                                  case CsgOp::Intersect: return l.intersect(n.rhs->bounds());
                                  case CsgOp::Difference: return l;
                              }
                              return l;
                          },
                      },
                      node_);
}

bool CsgExpr::near_boundary(const Vec3& p, double eps) const noexcept
{
    bool near = false;
    visit_primitives(
        [&](const BoxPrim& b) {
            for (int i = 0; i < 6; ++i)
                near = near || std::abs(p[i / 2] - b.bounds[i]) <= eps;
        },
        [&](const CylPrim& c) {
            const double h = p[to_int(c.axis)];
            near = near || std::abs(radial(c, p) - c.r) <= eps ||
                   std::abs(h - c.h0) <= eps || std::abs(h - c.h1) <= eps;
        });
    return near;
}

void CsgExpr::visit_primitives(const std::function<void(const BoxPrim&)>& on_box,
                               const std::function<void(const CylPrim&)>& on_cyl) const
{
    std::visit(Overloaded{
                   [&](const BoxPrim& b) { on_box(b); },
                   [&](const CylPrim& c) { on_cyl(c); },
                   [&](const Binary& n) {
                       n.lhs->visit_primitives(on_box, on_cyl);
                       n.rhs->visit_primitives(on_box, on_cyl);
                   },
               },
               node_);
}

Json csg_to_json(const CsgExpr& expr)
{
    return std::visit(
        Overloaded{
            [](const BoxPrim& b) {
                return Json{{"prim", "box"},
                            {"bounds", Json(std::vector<double>(b.bounds.begin(), b.bounds.end()))}};
            },
            [](const CylPrim& c) {
                return Json{{"prim", "cyl"},
                            {"axis", std::string(1, axis_char(c.axis))},
                            {"center", {c.c1, c.c2}},
                            {"r", c.r},
                            {"h", {c.h0, c.h1}}};
            },
            [](const CsgExpr::Binary& n) {
                const char* op = n.op == CsgOp::Union       ? "union"
                                 : n.op == CsgOp::Intersect ? "intersect"
                                                            : "difference";
                return Json{{"op", op}, {"l", csg_to_json(*n.lhs)}, {"r", csg_to_json(*n.rhs)}};
            },
        },
        expr.node());
}

CsgExpr csg_from_json(const Json& j)
{
    try
    {
        if (j.contains("op"))
        {
            const auto op = j.at("op").get<std::string>();
            CsgOp kind;
            if (op == "union")
                kind = CsgOp::Union;
            else if (op == "intersect")
                kind = CsgOp::Intersect;
            else if (op == "difference")
                kind = CsgOp::Difference;
            else
                throw FormatError("unknown CSG op '" + op + "'");
            return CsgExpr::combine(kind, csg_from_json(j.at("l")), csg_from_json(j.at("r")));
        }
        const auto prim = j.at("prim").get<std::string>();
        if (prim == "box")
        {
            const auto b = j.at("bounds").get<std::vector<double>>();
            if (b.size() != 6)
                throw FormatError("box bounds need 6 values");
            return CsgExpr::box(b[0], b[1], b[2], b[3], b[4], b[5]);
        }
        if (prim == "cyl")
        {
            const auto c = j.at("center").get<std::vector<double>>();
            const auto h = j.at("h").get<std::vector<double>>();
            if (c.size() != 2 || h.size() != 2)
                throw FormatError("cylinder center and h need 2 values each");
            return CsgExpr::cylinder(axis_from(j.at("axis").get<std::string>()), c[0], c[1],
                                     j.at("r").get<double>(), h[0], h[1]);
        }
        throw FormatError("unknown primitive '" + prim + "'");
    }
    catch (const Json::exception& e)
    {
        throw FormatError(std::string("malformed CSG JSON: ") + e.what());
    }
}

CsgExpr load_csg(const std::filesystem::path& path)
{
    try
    {
        return csg_from_json(Json::parse(read_text_file(path)));
    }
    catch (const Json::parse_error& e)
    {
        throw FormatError(path.string() + ": " + e.what());
    }
}

} // namespace cellforge
