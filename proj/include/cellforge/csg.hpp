#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <variant>

#include "cellforge/geom.hpp"
#include "cellforge/part_json.hpp"

namespace cellforge
{
struct BoxPrim
{
    //! x0, x1, y0, y1, z0, z1
    std::array<double, 6> bounds{};
};

//! Finite cylinder: lateral surface along `axis` plus two cap planes.
struct CylPrim
{
    Axis axis = Axis::Z;
    double c1 = 0; //!< center on the first perpendicular axis
    double c2 = 0; //!< center on the second perpendicular axis
    double r = 1;
    double h0 = 0;
    double h1 = 1;
};

enum class CsgOp
{
    Union,
    Intersect,
    Difference
};

/*!
 * Immutable CSG tree over axis-aligned primitives.
 *
 * Children are shared, so copies are cheap and subtrees may be reused.
 * Membership is evaluated on open sets: points on a primitive boundary are
 * outside the primitive.
 */
class CsgExpr
{
  public:
    struct Binary
    {
        CsgOp op;
        std::shared_ptr<const CsgExpr> lhs;
        std::shared_ptr<const CsgExpr> rhs;
    };
    using Node = std::variant<BoxPrim, CylPrim, Binary>;

    //! Throws FormatError for inverted bounds, r <= 0 or non-finite values.
    static CsgExpr box(double x0, double x1, double y0, double y1, double z0, double z1);
    static CsgExpr cylinder(Axis axis, double c1, double c2, double r, double h0,
                            double h1);
    static CsgExpr combine(CsgOp op, CsgExpr lhs, CsgExpr rhs);

    const Node& node() const noexcept { return node_; }

    bool contains(const Vec3& p) const noexcept;
    //! Conservative bounds (difference keeps the left operand's box).
    Box3 bounds() const noexcept;
    //! True when p lies within eps of any primitive's defining surface.
    bool near_boundary(const Vec3& p, double eps) const noexcept;

    void visit_primitives(const std::function<void(const BoxPrim&)>& on_box,
                          const std::function<void(const CylPrim&)>& on_cyl) const;

  private:
    explicit CsgExpr(Node n) : node_(std::move(n)) {}
    Node node_;
};

inline CsgExpr unite(CsgExpr a, CsgExpr b)
{
    return CsgExpr::combine(CsgOp::Union, std::move(a), std::move(b));
}
inline CsgExpr intersect(CsgExpr a, CsgExpr b)
{
    return CsgExpr::combine(CsgOp::Intersect, std::move(a), std::move(b));
}
inline CsgExpr subtract(CsgExpr a, CsgExpr b)
{
    return CsgExpr::combine(CsgOp::Difference, std::move(a), std::move(b));
}

// {"op":"union"|"intersect"|"difference","l":...,"r":...}
// {"prim":"box","bounds":[x0,x1,y0,y1,z0,z1]}
// {"prim":"cyl","axis":"x|y|z","center":[c1,c2],"r":r,"h":[h0,h1]}
Json csg_to_json(const CsgExpr& expr);
CsgExpr csg_from_json(const Json& j);
CsgExpr load_csg(const std::filesystem::path& path);

} // namespace cellforge
