#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cellforge
{
//---------------------------------------------------------------------------//
// Basic types
//---------------------------------------------------------------------------//
using Vec3 = std::array<double, 3>;

enum class Axis : std::uint8_t
{
    X = 0,
    Y = 1,
    Z = 2
};

constexpr int to_int(Axis a) noexcept { return static_cast<int>(a); }

//! The two axes perpendicular to `a`, in ascending order.
constexpr std::array<int, 2> perpendicular(Axis a) noexcept
{
    switch (a)
    {
        case Axis::X: return {1, 2};
        case Axis::Y: return {0, 2};
        default: return {0, 1};
    }
}

//! Axis-aligned box; infinite bounds are allowed.
struct Box3
{
    Vec3 lo;
    Vec3 hi;

    double extent(int axis) const noexcept { return hi[axis] - lo[axis]; }
    double max_extent() const noexcept;
    double diagonal() const noexcept;
    Vec3 center() const noexcept;
    bool is_finite() const noexcept;
    //! True when some axis has extent <= tol.
    bool is_thin(double tol = 0.0) const noexcept;

    Box3 intersect(const Box3& other) const noexcept;
    Box3 unite(const Box3& other) const noexcept;

    static Box3 infinite() noexcept;
};

//---------------------------------------------------------------------------//
// Surfaces and cells
//---------------------------------------------------------------------------//
enum class SurfaceKind : std::uint8_t
{
    PlaneX,
    PlaneY,
    PlaneZ,
    CylX,
    CylY,
    CylZ
};

constexpr bool is_plane(SurfaceKind k) noexcept
{
    return k <= SurfaceKind::PlaneZ;
}

constexpr Axis axis_of(SurfaceKind k) noexcept
{
    return static_cast<Axis>(static_cast<int>(k) % 3);
}

constexpr SurfaceKind plane_kind(Axis a) noexcept
{
    return static_cast<SurfaceKind>(to_int(a));
}

constexpr SurfaceKind cylinder_kind(Axis a) noexcept
{
    return static_cast<SurfaceKind>(3 + to_int(a));
}

//! Interchange name of a kind ("XPlane", "ZCylinder", ...).
std::string_view kind_name(SurfaceKind k) noexcept;
//! Parameter names in interchange order ("x0" for XPlane; "x0","y0","r" for
//! ZCylinder, ...).
std::span<const std::string_view> param_names(SurfaceKind k) noexcept;
std::optional<SurfaceKind> kind_from_name(std::string_view name) noexcept;

/*!
 * Axis-aligned plane or infinite cylinder.
 *
 * Planes use params[0] as the offset along their axis. Cylinders store the
 * center on the two perpendicular axes (ascending order) in params[0..1] and
 * the radius in params[2].
 */
struct Surface
{
    std::string id;
    SurfaceKind kind = SurfaceKind::PlaneX;
    std::array<double, 3> params{};

    static Surface plane(std::string id, Axis axis, double offset);
    static Surface cylinder(std::string id, Axis axis, double c1, double c2,
                            double r);

    Axis axis() const noexcept { return axis_of(kind); }
    double offset() const noexcept { return params[0]; }
    double radius() const noexcept { return params[2]; }
    //! Number of meaningful entries in params.
    std::size_t num_params() const noexcept { return is_plane(kind) ? 1 : 3; }
};

//! Same kind and parameters within `tol`.
bool same_geometry(const Surface& a, const Surface& b, double tol = 1e-9) noexcept;

enum class Sign : std::uint8_t
{
    Plus,
    Minus
};

constexpr Sign opposite(Sign s) noexcept
{
    return s == Sign::Plus ? Sign::Minus : Sign::Plus;
}

constexpr char sign_char(Sign s) noexcept { return s == Sign::Plus ? '+' : '-'; }

//! Signed reference to a surface by id.
struct Term
{
    std::string surface;
    Sign sign = Sign::Plus;

    bool operator==(const Term&) const = default;
};

struct Cell
{
    std::string id;
    std::vector<Term> region;
};

struct Part
{
    std::string id;
    std::vector<Surface> surfaces;
    std::vector<Cell> cells;

    const Surface* find_surface(std::string_view sid) const noexcept;
    const Cell* find_cell(std::string_view cid) const noexcept;
};

//---------------------------------------------------------------------------//
// Resolved cells: the form every predicate operates on
//---------------------------------------------------------------------------//
struct Constraint
{
    Surface surface;
    Sign sign = Sign::Plus;
};

struct HalfSpaceCell
{
    std::string id;
    std::vector<Constraint> constraints;

    bool plane_only() const noexcept;
};

//! Look up every term of `cell`; throws ReferenceError on a dangling id.
HalfSpaceCell resolve(const Cell& cell, std::span<const Surface> surfaces);
std::vector<HalfSpaceCell> resolve_cells(const Part& part);

struct KernelConfig
{
    double boundary_eps = 1e-9;
    double face_eps = 1e-6;
    int mc_samples_overlap = 4096;
    int mc_samples_face = 2048;
    std::uint64_t seed = 0;

    //! Throws std::invalid_argument on a nonpositive tolerance or count.
    void validate() const;
};

enum class PointClass
{
    Inside,
    Outside,
    Boundary
};

//! Signed distance-like margin: positive when `p` satisfies the constraint.
double margin(const Constraint& c, const Vec3& p) noexcept;

PointClass classify_point(const Vec3& p, const HalfSpaceCell& cell,
                          const KernelConfig& cfg);
//! Resolving overload; throws ReferenceError on dangling ids.
PointClass classify_point(const Vec3& p, const Cell& cell,
                          std::span<const Surface> surfaces,
                          const KernelConfig& cfg);

bool is_bounded(const HalfSpaceCell& cell) noexcept;

//! Tight analytic bounds; throws Unbounded. The result may be empty (lo >= hi
//! on some axis) for a degenerate cell.
Box3 bounding_box(const HalfSpaceCell& cell);

/*!
 * Find a point strictly inside the cell (margin > boundary_eps on every
 * constraint). Tries the bounding-box center, then up to `attempts` seeded
 * rejection samples. Unbounded cells yield nullopt.
 */
std::optional<Vec3> find_interior_point(const HalfSpaceCell& cell,
                                        const KernelConfig& cfg, int attempts);

//! Bounded and with a nonempty interior. Plane-only cells are decided
//! analytically; otherwise mc_samples_overlap rejection samples are used.
bool is_valid_cell(const HalfSpaceCell& cell, const KernelConfig& cfg);

/*!
 * Positive-area face contact.
 *
 * True iff some surface appears in both cells with opposite signs and at least
 * one seeded sample on the shared part of that surface satisfies every other
 * constraint of both cells to within face_eps. Throws InvalidCell for an
 * unbounded cell.
 */
bool cells_adjacent(const HalfSpaceCell& a, const HalfSpaceCell& b,
                    const KernelConfig& cfg);

//! Interior intersection test; exact for plane-only pairs, sampled otherwise.
bool cells_overlap(const HalfSpaceCell& a, const HalfSpaceCell& b,
                   const KernelConfig& cfg);

//! Connectivity of the face-adjacency graph. Requires a nonempty list.
bool all_connected(std::span<const HalfSpaceCell> cells, const KernelConfig& cfg);

//! Check every Part invariant; throws InvalidPart (or ReferenceError).
void validate_part(const Part& part, const KernelConfig& cfg);

//! Union of all cell bounding boxes. Throws Unbounded / InvalidPart.
Box3 part_bounds(const Part& part);

} // namespace cellforge
