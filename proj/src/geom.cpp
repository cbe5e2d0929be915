#include "cellforge/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "cellforge/error.hpp"
#include "cellforge/random.hpp"

namespace cellforge
{
namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<std::string_view, 6> kKindNames = {
    "XPlane", "YPlane", "ZPlane", "XCylinder", "YCylinder", "ZCylinder"};

constexpr std::array<std::string_view, 1> kParamsPlaneX = {"x0"};
constexpr std::array<std::string_view, 1> kParamsPlaneY = {"y0"};
constexpr std::array<std::string_view, 1> kParamsPlaneZ = {"z0"};
constexpr std::array<std::string_view, 3> kParamsCylX = {"y0", "z0", "r"};
constexpr std::array<std::string_view, 3> kParamsCylY = {"x0", "z0", "r"};
constexpr std::array<std::string_view, 3> kParamsCylZ = {"x0", "y0", "r"};

std::uint64_t hash_box(std::uint64_t h, const Box3& b) noexcept
{
    for (int i = 0; i < 3; ++i)
    {
        h = hash_combine(h, hash_double(b.lo[i]));
        h = hash_combine(h, hash_double(b.hi[i]));
    }
    return h;
}

std::uint64_t hash_surface(std::uint64_t h, const Surface& s) noexcept
{
    h = hash_combine(h, static_cast<std::uint64_t>(s.kind));
    for (std::size_t i = 0; i < s.num_params(); ++i)
        h = hash_combine(h, hash_double(s.params[i]));
    return h;
}

Vec3 sample_in(const Box3& b, SplitMix64& rng) noexcept
{
    return {rng.uniform(b.lo[0], b.hi[0]), rng.uniform(b.lo[1], b.hi[1]),
            rng.uniform(b.lo[2], b.hi[2])};
}

double min_margin(const HalfSpaceCell& cell, const Vec3& p) noexcept
{
    double m = kInf;
    for (const auto& c : cell.constraints)
        m = std::min(m, margin(c, p));
    return m;
}

//! Every constraint not lying on `shared` holds to within tol.
bool satisfies_except(const HalfSpaceCell& cell, const Surface& shared,
                      const Vec3& p, double tol) noexcept
{
    for (const auto& c : cell.constraints)
    {
        if (same_geometry(c.surface, shared))
            continue;
        if (margin(c, p) < -tol)
            return false;
    }
    return true;
}

void require_bounded(const HalfSpaceCell& cell)
{
    if (!is_bounded(cell))
        throw InvalidCell("cell '" + cell.id + "' is unbounded");
}

//! Sampled contact test across one shared surface.
bool face_contact(const HalfSpaceCell& a, const HalfSpaceCell& b,
                  const Surface& shared, const Box3& common,
                  const KernelConfig& cfg)
{
    const int k = to_int(shared.axis());
    const auto [u, v] = perpendicular(shared.axis());

    SplitMix64 rng(hash_box(hash_surface(cfg.seed, shared), common));
    if (is_plane(shared.kind))
    {
        // The contact patch lies inside the common rectangle of the two boxes.
        if (common.extent(u) <= cfg.face_eps || common.extent(v) <= cfg.face_eps)
            return false;
        for (int i = 0; i < cfg.mc_samples_face; ++i)
        {
            Vec3 p;
            p[k] = shared.offset();
            p[u] = rng.uniform(common.lo[u], common.hi[u]);
            p[v] = rng.uniform(common.lo[v], common.hi[v]);
            if (satisfies_except(a, shared, p, cfg.face_eps) &&
                satisfies_except(b, shared, p, cfg.face_eps))
                return true;
        }
        return false;
    }

    if (common.extent(k) <= cfg.face_eps)
        return false;
    for (int i = 0; i < cfg.mc_samples_face; ++i)
    {
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        Vec3 p;
        p[k] = rng.uniform(common.lo[k], common.hi[k]);
        p[u] = shared.params[0] + shared.radius() * std::cos(theta);
        p[v] = shared.params[1] + shared.radius() * std::sin(theta);
        if (satisfies_except(a, shared, p, cfg.face_eps) &&
            satisfies_except(b, shared, p, cfg.face_eps))
            return true;
    }
    return false;
}

} // namespace

//---------------------------------------------------------------------------//
// Box3
//---------------------------------------------------------------------------//
double Box3::max_extent() const noexcept
{
    return std::max({extent(0), extent(1), extent(2)});
}

double Box3::diagonal() const noexcept
{
    return std::hypot(extent(0), extent(1), extent(2));
}

Vec3 Box3::center() const noexcept
{
    return {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])};
}

bool Box3::is_finite() const noexcept
{
    for (int i = 0; i < 3; ++i)
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]))
            return false;
    return true;
}

bool Box3::is_thin(double tol) const noexcept
{
    for (int i = 0; i < 3; ++i)
        if (!(extent(i) > tol))
            return true;
    return false;
}

Box3 Box3::intersect(const Box3& other) const noexcept
{
    Box3 r;
    for (int i = 0; i < 3; ++i)
    {
        r.lo[i] = std::max(lo[i], other.lo[i]);
        r.hi[i] = std::min(hi[i], other.hi[i]);
    }
    return r;
}

Box3 Box3::unite(const Box3& other) const noexcept
{
    Box3 r;
    for (int i = 0; i < 3; ++i)
    {
        r.lo[i] = std::min(lo[i], other.lo[i]);
        r.hi[i] = std::max(hi[i], other.hi[i]);
    }
    return r;
}

Box3 Box3::infinite() noexcept
{
    return {{-kInf, -kInf, -kInf}, {kInf, kInf, kInf}};
}

//---------------------------------------------------------------------------//
// Surfaces
//---------------------------------------------------------------------------//
std::string_view kind_name(SurfaceKind k) noexcept
{
    return kKindNames[static_cast<std::size_t>(k)];
}

std::span<const std::string_view> param_names(SurfaceKind k) noexcept
{
    switch (k)
    {
        case SurfaceKind::PlaneX: return kParamsPlaneX;
        case SurfaceKind::PlaneY: return kParamsPlaneY;
        case SurfaceKind::PlaneZ: return kParamsPlaneZ;
        case SurfaceKind::CylX: return kParamsCylX;
        case SurfaceKind::CylY: return kParamsCylY;
        case SurfaceKind::CylZ: return kParamsCylZ;
    }
    return {};
}

std::optional<SurfaceKind> kind_from_name(std::string_view name) noexcept
{
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (kKindNames[i] == name)
            return static_cast<SurfaceKind>(i);
    return std::nullopt;
}

Surface Surface::plane(std::string id, Axis axis, double offset)
{
    return Surface{std::move(id), plane_kind(axis), {offset, 0.0, 0.0}};
}

Surface Surface::cylinder(std::string id, Axis axis, double c1, double c2,
                          double r)
{
    return Surface{std::move(id), cylinder_kind(axis), {c1, c2, r}};
}

bool same_geometry(const Surface& a, const Surface& b, double tol) noexcept
{
    if (a.kind != b.kind)
        return false;
    for (std::size_t i = 0; i < a.num_params(); ++i)
        if (std::abs(a.params[i] - b.params[i]) > tol)
            return false;
    return true;
}

const Surface* Part::find_surface(std::string_view sid) const noexcept
{
    for (const auto& s : surfaces)
        if (s.id == sid)
            return &s;
    return nullptr;
}

const Cell* Part::find_cell(std::string_view cid) const noexcept
{
    for (const auto& c : cells)
        if (c.id == cid)
            return &c;
    return nullptr;
}

bool HalfSpaceCell::plane_only() const noexcept
{
    return std::all_of(constraints.begin(), constraints.end(),
                       [](const Constraint& c) { return is_plane(c.surface.kind); });
}

HalfSpaceCell resolve(const Cell& cell, std::span<const Surface> surfaces)
{
    HalfSpaceCell out;
    out.id = cell.id;
    out.constraints.reserve(cell.region.size());
    for (const auto& t : cell.region)
    {
        auto it = std::find_if(surfaces.begin(), surfaces.end(),
                               [&](const Surface& s) { return s.id == t.surface; });
        if (it == surfaces.end())
            throw ReferenceError("cell '" + cell.id +
                                 "' references undefined surface '" + t.surface + "'");
        out.constraints.push_back({*it, t.sign});
    }
    return out;
}

std::vector<HalfSpaceCell> resolve_cells(const Part& part)
{
    std::vector<HalfSpaceCell> out;
    out.reserve(part.cells.size());
    for (const auto& c : part.cells)
        out.push_back(resolve(c, part.surfaces));
    return out;
}

void KernelConfig::validate() const
{
    if (!(boundary_eps > 0) || !(face_eps > 0))
        throw std::invalid_argument("kernel tolerances must be positive");
    if (mc_samples_face < 1 || mc_samples_overlap < 1)
        throw std::invalid_argument("kernel sample counts must be >= 1");
}

//---------------------------------------------------------------------------//
// Predicates
//---------------------------------------------------------------------------//
double margin(const Constraint& c, const Vec3& p) noexcept
{
    const Surface& s = c.surface;
    double outward; // positive on the Plus side
    if (is_plane(s.kind))
    {
        outward = p[to_int(s.axis())] - s.offset();
    }
    else
    {
        const auto [u, v] = perpendicular(s.axis());
        outward = std::hypot(p[u] - s.params[0], p[v] - s.params[1]) - s.radius();
    }
    return c.sign == Sign::Plus ? outward : -outward;
}

PointClass classify_point(const Vec3& p, const HalfSpaceCell& cell,
                          const KernelConfig& cfg)
{
    const double m = min_margin(cell, p);
    if (m > cfg.boundary_eps)
        return PointClass::Inside;
    if (m < -cfg.boundary_eps)
        return PointClass::Outside;
    return PointClass::Boundary;
}

PointClass classify_point(const Vec3& p, const Cell& cell,
                          std::span<const Surface> surfaces,
                          const KernelConfig& cfg)
{
    return classify_point(p, resolve(cell, surfaces), cfg);
}

bool is_bounded(const HalfSpaceCell& cell) noexcept
{
    std::array<bool, 3> lower{}, upper{};
    for (const auto& c : cell.constraints)
    {
        const int a = to_int(c.surface.axis());
        if (is_plane(c.surface.kind))
        {
            (c.sign == Sign::Plus ? lower : upper)[a] = true;
        }
        else if (c.sign == Sign::Minus)
        {
            for (int p : perpendicular(c.surface.axis()))
                lower[p] = upper[p] = true;
        }
    }
    for (int i = 0; i < 3; ++i)
        if (!lower[i] || !upper[i])
            return false;
    return true;
}

Box3 bounding_box(const HalfSpaceCell& cell)
{
    if (!is_bounded(cell))
        throw Unbounded("cell '" + cell.id + "' is unbounded");
    Box3 b = Box3::infinite();
    for (const auto& c : cell.constraints)
    {
        const Surface& s = c.surface;
        const int a = to_int(s.axis());
        if (is_plane(s.kind))
        {
            if (c.sign == Sign::Plus)
                b.lo[a] = std::max(b.lo[a], s.offset());
            else
                b.hi[a] = std::min(b.hi[a], s.offset());
        }
        else if (c.sign == Sign::Minus)
        {
            const auto perp = perpendicular(s.axis());
            for (int i = 0; i < 2; ++i)
            {
                b.lo[perp[i]] = std::max(b.lo[perp[i]], s.params[i] - s.radius());
                b.hi[perp[i]] = std::min(b.hi[perp[i]], s.params[i] + s.radius());
            }
        }
    }
    return b;
}

std::optional<Vec3> find_interior_point(const HalfSpaceCell& cell,
                                        const KernelConfig& cfg, int attempts)
{
    if (!is_bounded(cell))
        return std::nullopt;
    const Box3 box = bounding_box(cell);
    if (box.is_thin())
        return std::nullopt;

    const Vec3 mid = box.center();
    if (min_margin(cell, mid) > cfg.boundary_eps)
        return mid;
    SplitMix64 rng(hash_box(hash_combine(cfg.seed, 0x1A7E), box));
    for (int i = 0; i < attempts; ++i)
    {
        const Vec3 p = sample_in(box, rng);
        if (min_margin(cell, p) > cfg.boundary_eps)
            return p;
    }
    return std::nullopt;
}

bool is_valid_cell(const HalfSpaceCell& cell, const KernelConfig& cfg)
{
    if (cell.constraints.empty() || !is_bounded(cell))
        return false;
    const Box3 box = bounding_box(cell);
    if (box.is_thin(2.0 * cfg.boundary_eps))
        return false;
    if (cell.plane_only())
        return true;
    return find_interior_point(cell, cfg, cfg.mc_samples_overlap).has_value();
}

bool cells_adjacent(const HalfSpaceCell& a, const HalfSpaceCell& b,
                    const KernelConfig& cfg)
{
    require_bounded(a);
    require_bounded(b);
    const Box3 common = bounding_box(a).intersect(bounding_box(b));
    for (int i = 0; i < 3; ++i)
        if (common.lo[i] > common.hi[i] + cfg.face_eps)
            return false;

    for (const auto& ca : a.constraints)
    {
        for (const auto& cb : b.constraints)
        {
            if (ca.sign == cb.sign || !same_geometry(ca.surface, cb.surface))
                continue;
            if (face_contact(a, b, ca.surface, common, cfg))
                return true;
        }
    }
    return false;
}

bool cells_overlap(const HalfSpaceCell& a, const HalfSpaceCell& b,
                   const KernelConfig& cfg)
{
    require_bounded(a);
    require_bounded(b);
    const Box3 common = bounding_box(a).intersect(bounding_box(b));
    if (common.is_thin(cfg.boundary_eps))
        return false;
    // A plane-only cell is exactly its bounding box.
    if (a.plane_only() && b.plane_only())
        return true;

    SplitMix64 rng(hash_box(hash_combine(cfg.seed, 0x0E1A), common));
    for (int i = 0; i < cfg.mc_samples_overlap; ++i)
    {
        const Vec3 p = sample_in(common, rng);
        if (min_margin(a, p) > cfg.boundary_eps && min_margin(b, p) > cfg.boundary_eps)
            return true;
    }
    return false;
}

bool all_connected(std::span<const HalfSpaceCell> cells, const KernelConfig& cfg)
{
    if (cells.empty())
        throw std::invalid_argument("all_connected requires at least one cell");
    const std::size_t n = cells.size();
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty())
    {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < n; ++j)
        {
            if (seen[j] || !cells_adjacent(cells[i], cells[j], cfg))
                continue;
            seen[j] = true;
            ++reached;
            stack.push_back(j);
        }
    }
    return reached == n;
}

void validate_part(const Part& part, const KernelConfig& cfg)
{
    std::set<std::string> surface_ids, cell_ids, used;
    for (const auto& s : part.surfaces)
    {
        if (!surface_ids.insert(s.id).second)
            throw InvalidPart("duplicate surface id '" + s.id + "'");
        for (std::size_t i = 0; i < s.num_params(); ++i)
            if (!std::isfinite(s.params[i]))
                throw InvalidPart("surface '" + s.id + "' has a non-finite parameter");
        if (!is_plane(s.kind) && !(s.radius() > 0))
            throw InvalidPart("cylinder '" + s.id + "' needs a positive radius");
    }

    std::vector<HalfSpaceCell> resolved;
    for (const auto& c : part.cells)
    {
        if (!cell_ids.insert(c.id).second)
            throw InvalidPart("duplicate cell id '" + c.id + "'");
        if (c.region.empty())
            throw InvalidPart("cell '" + c.id + "' has an empty region");
        std::set<std::pair<std::string, Sign>> terms;
        for (const auto& t : c.region)
        {
            if (!terms.emplace(t.surface, t.sign).second)
                throw InvalidPart("cell '" + c.id + "' repeats term " +
                                  sign_char(t.sign) + t.surface);
            used.insert(t.surface);
        }
        resolved.push_back(resolve(c, part.surfaces));
        if (!is_bounded(resolved.back()))
            throw InvalidPart("cell '" + c.id + "' is unbounded");
        if (!is_valid_cell(resolved.back(), cfg))
            throw InvalidPart("cell '" + c.id + "' has an empty interior");
    }
    for (const auto& s : part.surfaces)
        if (!used.count(s.id))
            throw InvalidPart("surface '" + s.id + "' is not referenced by any cell");

    for (std::size_t i = 0; i < resolved.size(); ++i)
        for (std::size_t j = i + 1; j < resolved.size(); ++j)
            if (cells_overlap(resolved[i], resolved[j], cfg))
                throw InvalidPart("cells '" + resolved[i].id + "' and '" +
                                  resolved[j].id + "' overlap");
}

Box3 part_bounds(const Part& part)
{
    if (part.cells.empty())
        throw InvalidPart("part '" + part.id + "' has no cells");
    std::optional<Box3> box;
    for (const auto& c : resolve_cells(part))
    {
        const Box3 b = bounding_box(c);
        box = box ? box->unite(b) : b;
    }
    return *box;
}

} // namespace cellforge
