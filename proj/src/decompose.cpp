#include "cellforge/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "cellforge/error.hpp"
#include "cellforge/random.hpp"

namespace cellforge
{
namespace
{
constexpr double kMergeTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kEmptyProbe = 64;

struct Lateral
{
    Axis axis;
    double c1, c2, r;
    //! Axial extents of every finite cylinder sharing this lateral surface.
    std::vector<std::pair<double, double>> spans;
};

using ProtoTerm = std::pair<int, Sign>; // index into the surface table

struct ProtoCell
{
    std::vector<ProtoTerm> terms; // kept sorted
};

void add_unique(std::vector<double>& values, double v)
{
    for (double w : values)
        if (std::abs(w - v) <= kMergeTol)
            return;
    values.push_back(v);
}

double clamp_distance(double c, double lo, double hi) noexcept
{
    if (c < lo)
        return lo - c;
    if (c > hi)
        return c - hi;
    return 0.0;
}

//! Closest and farthest distance from a circle center to a cross-section.
std::pair<double, double> rect_distances(const Box3& box, Axis axis, double c1,
                                         double c2) noexcept
{
    const auto [u, v] = perpendicular(axis);
    const double near = std::hypot(clamp_distance(c1, box.lo[u], box.hi[u]),
                                   clamp_distance(c2, box.lo[v], box.hi[v]));
    const double far = std::hypot(std::max(std::abs(c1 - box.lo[u]), std::abs(c1 - box.hi[u])),
                                  std::max(std::abs(c2 - box.lo[v]), std::abs(c2 - box.hi[v])));
    return {near, far};
}

//! The lateral surface splits the box's cross-section into two nonempty parts.
bool circle_crosses(const Box3& box, const Lateral& lat) noexcept
{
    const auto [near, far] = rect_distances(box, lat.axis, lat.c1, lat.c2);
    return near < lat.r && far > lat.r;
}

bool within_span(const Box3& box, const Lateral& lat) noexcept
{
    const int a = to_int(lat.axis);
    for (const auto& [h0, h1] : lat.spans)
        if (box.lo[a] >= h0 - kMergeTol && box.hi[a] <= h1 + kMergeTol)
            return true;
    return false;
}

HalfSpaceCell to_cell(const ProtoCell& proto, const std::vector<Surface>& table)
{
    HalfSpaceCell cell;
    for (const auto& [idx, sign] : proto.terms)
        cell.constraints.push_back({table[idx], sign});
    return cell;
}

//! Split terms into (axis-`a` plane terms, everything else).
std::pair<std::vector<ProtoTerm>, std::vector<ProtoTerm>>
split_axis_planes(const ProtoCell& c, int a, const std::vector<Surface>& table)
{
    std::vector<ProtoTerm> on_axis, rest;
    for (const auto& t : c.terms)
    {
        const Surface& s = table[t.first];
        (is_plane(s.kind) && to_int(s.axis()) == a ? on_axis : rest).push_back(t);
    }
    return {on_axis, rest};
}

//! If `lower` sits directly below `upper` along axis a and they agree on every
//! other term, return the fused cell.
std::optional<ProtoCell> try_merge(const ProtoCell& lower, const ProtoCell& upper, int a,
                                   const std::vector<Surface>& table)
{
    auto [lo_axis, lo_rest] = split_axis_planes(lower, a, table);
    auto [up_axis, up_rest] = split_axis_planes(upper, a, table);
    if (lo_rest != up_rest)
        return std::nullopt;

    std::optional<int> shared;
    for (const auto& [idx, sign] : lo_axis)
        if (sign == Sign::Minus &&
            std::find(up_axis.begin(), up_axis.end(), ProtoTerm{idx, Sign::Plus}) != up_axis.end())
            shared = idx;
    if (!shared)
        return std::nullopt;

    ProtoCell merged{lo_rest};
    for (const auto& t : lo_axis)
        if (t.second == Sign::Plus)
            merged.terms.push_back(t);
    for (const auto& t : up_axis)
        if (t.second == Sign::Minus)
            merged.terms.push_back(t);
    std::sort(merged.terms.begin(), merged.terms.end());
    return merged;
}

void merge_cells(std::vector<ProtoCell>& cells, const std::vector<Surface>& table)
{
    bool changed = true;
    while (changed)
    {
        changed = false;
        for (int a = 0; a < 3; ++a)
        {
            bool merged_on_axis = true;
            while (merged_on_axis)
            {
                merged_on_axis = false;
                for (std::size_t i = 0; i < cells.size() && !merged_on_axis; ++i)
                {
                    for (std::size_t j = i + 1; j < cells.size() && !merged_on_axis; ++j)
                    {
                        auto m = try_merge(cells[i], cells[j], a, table);
                        if (!m)
                            m = try_merge(cells[j], cells[i], a, table);
                        if (!m)
                            continue;
                        cells[i] = std::move(*m);
                        cells.erase(cells.begin() + static_cast<std::ptrdiff_t>(j));
                        merged_on_axis = changed = true;
                    }
                }
            }
        }
    }
}

} // namespace

bool region_empty(const Box3& box, std::span<const Constraint> cyl_constraints,
                  const DecomposeConfig& cfg)
{
    std::vector<Constraint> cyls;
    for (const auto& c : cyl_constraints)
        if (!is_plane(c.surface.kind))
            cyls.push_back(c);

    if (box.is_thin())
        return true;
    if (cyls.empty())
        return false;
    if (cyls.size() == 1)
    {
        const Surface& s = cyls.front().surface;
        const auto [near, far] = rect_distances(box, s.axis(), s.params[0], s.params[1]);
        return cyls.front().sign == Sign::Minus ? !(near < s.radius()) : !(far > s.radius());
    }

    // Restrict the sampling domain by the inside constraints.
    Box3 domain = box;
    for (const auto& c : cyls)
    {
        if (c.sign != Sign::Minus)
            continue;
        const auto perp = perpendicular(c.surface.axis());
        for (int i = 0; i < 2; ++i)
        {
            domain.lo[perp[i]] = std::max(domain.lo[perp[i]], c.surface.params[i] - c.surface.radius());
            domain.hi[perp[i]] = std::min(domain.hi[perp[i]], c.surface.params[i] + c.surface.radius());
        }
    }
    if (domain.is_thin())
        return true;
    if (!domain.is_finite())
        return false; // TODO: clamp unbounded domains instead of assuming a hit

    std::uint64_t h = hash_combine(cfg.seed, 0xE3B7);
    for (int i = 0; i < 3; ++i)
        h = hash_combine(hash_combine(h, hash_double(domain.lo[i])), hash_double(domain.hi[i]));
    SplitMix64 rng(h);
    for (int n = 0; n < cfg.empty_samples; ++n)
    {
        const Vec3 p{rng.uniform(domain.lo[0], domain.hi[0]),
                     rng.uniform(domain.lo[1], domain.hi[1]),
                     rng.uniform(domain.lo[2], domain.hi[2])};
        bool hit = true;
        for (const auto& c : cyls)
            hit = hit && margin(c, p) > cfg.kernel.boundary_eps;
        if (hit)
            return false;
    }
    return true;
}

Part decompose(const CsgExpr& expr, const DecomposeConfig& cfg, std::string part_id)
{
    if (cfg.classify_samples < 1)
        throw std::invalid_argument("classify_samples must be >= 1");

    // 1. Defining surfaces.
    std::array<std::vector<double>, 3> planes;
    std::vector<Lateral> laterals;
    expr.visit_primitives(
        [&](const BoxPrim& b) {
            for (int i = 0; i < 6; ++i)
                add_unique(planes[i / 2], b.bounds[i]);
        },
        [&](const CylPrim& c) {
            add_unique(planes[to_int(c.axis)], c.h0);
            add_unique(planes[to_int(c.axis)], c.h1);
            for (auto& lat : laterals)
            {
                if (lat.axis == c.axis && std::abs(lat.c1 - c.c1) <= kMergeTol &&
                    std::abs(lat.c2 - c.c2) <= kMergeTol && std::abs(lat.r - c.r) <= kMergeTol)
                {
                    lat.spans.emplace_back(c.h0, c.h1);
                    return;
                }
            }
            laterals.push_back({c.axis, c.c1, c.c2, c.r, {{c.h0, c.h1}}});
        });

    std::vector<Surface> table;
    std::array<std::vector<int>, 3> plane_index;
    for (int a = 0; a < 3; ++a)
    {
        std::sort(planes[a].begin(), planes[a].end());
        for (double off : planes[a])
        {
            plane_index[a].push_back(static_cast<int>(table.size()));
            table.push_back(Surface::plane("", static_cast<Axis>(a), off));
        }
    }
    const int first_lateral = static_cast<int>(table.size());
    for (const auto& lat : laterals)
        table.push_back(Surface::cylinder("", lat.axis, lat.c1, lat.c2, lat.r));

    // 2-4. Grid boxes, cylinder splits, classification.
    std::vector<ProtoCell> cells;
    std::array<std::size_t, 3> count{};
    for (int a = 0; a < 3; ++a)
        count[a] = planes[a].size() + 1;

    std::array<std::size_t, 3> idx{};
    for (idx[0] = 0; idx[0] < count[0]; ++idx[0])
    for (idx[1] = 0; idx[1] < count[1]; ++idx[1])
    for (idx[2] = 0; idx[2] < count[2]; ++idx[2])
    {
        Box3 box = Box3::infinite();
        std::vector<ProtoTerm> base;
        for (int a = 0; a < 3; ++a)
        {
            if (idx[a] > 0)
            {
                box.lo[a] = planes[a][idx[a] - 1];
                base.emplace_back(plane_index[a][idx[a] - 1], Sign::Plus);
            }
            if (idx[a] < planes[a].size())
            {
                box.hi[a] = planes[a][idx[a]];
                base.emplace_back(plane_index[a][idx[a]], Sign::Minus);
            }
        }

        std::vector<int> crossing;
        for (std::size_t l = 0; l < laterals.size(); ++l)
            if (within_span(box, laterals[l]) && circle_crosses(box, laterals[l]))
                crossing.push_back(first_lateral + static_cast<int>(l));
        if (crossing.size() >= 8 * sizeof(unsigned) - 1)
            throw std::length_error("too many cylinders cross one grid box");

        for (unsigned combo = 0; combo < (1u << crossing.size()); ++combo)
        {
            ProtoCell proto{base};
            std::vector<Constraint> cyl_terms;
            for (std::size_t k = 0; k < crossing.size(); ++k)
            {
                const Sign s = (combo >> k) & 1u ? Sign::Minus : Sign::Plus;
                proto.terms.emplace_back(crossing[k], s);
                cyl_terms.push_back({table[crossing[k]], s});
            }
            std::sort(proto.terms.begin(), proto.terms.end());

            // Unbounded regions cannot belong to a finite solid.
            const HalfSpaceCell region = to_cell(proto, table);
            if (!is_bounded(region))
                continue;
            const Box3 rbox = bounding_box(region);
            if (rbox.is_thin(2.0 * cfg.kernel.boundary_eps) || region_empty(rbox, cyl_terms, cfg))
                continue;

            std::uint64_t seed = hash_combine(cfg.seed, combo);
            for (std::size_t v : idx)
                seed = hash_combine(seed, v);
            SplitMix64 rng(seed);

            int attempts = 0, found = 0, inside = 0;
            const int budget = kEmptyProbe * cfg.classify_samples;
            while (found < cfg.classify_samples && attempts < budget)
            {
                if (attempts == kEmptyProbe && found == 0)
                    break;
                ++attempts;
                const Vec3 p{rng.uniform(rbox.lo[0], rbox.hi[0]),
                             rng.uniform(rbox.lo[1], rbox.hi[1]),
                             rng.uniform(rbox.lo[2], rbox.hi[2])};
                if (classify_point(p, region, cfg.kernel) != PointClass::Inside)
                    continue;
                ++found;
                inside += expr.contains(p) ? 1 : 0;
            }
            if (found == 0)
                continue;
            if (inside != 0 && inside != found)
                throw MixedRegion("region at grid (" + std::to_string(idx[0]) + "," +
                                  std::to_string(idx[1]) + "," + std::to_string(idx[2]) +
                                  ") is partially inside the solid");
            if (inside == found)
                cells.push_back(std::move(proto));
        }
    }
    if (cells.empty())
        throw EmptySolid("expression '" + part_id + "' has no interior");

    // 5. Merge.
    if (cfg.merge)
        merge_cells(cells, table);

    // Number used surfaces by (axis, offset/center, kind, radius).
    std::vector<int> used;
    for (const auto& c : cells)
        for (const auto& t : c.terms)
            used.push_back(t.first);
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    auto key = [&](int i) {
        const Surface& s = table[i];
        const bool cyl = !is_plane(s.kind);
        return std::make_tuple(to_int(s.axis()), s.params[0], cyl, s.params[1], s.params[2]);
    };
    std::sort(used.begin(), used.end(), [&](int a, int b) { return key(a) < key(b); });

    Part part;
    part.id = std::move(part_id);
    std::map<int, std::size_t> number;
    for (int i : used)
    {
        number[i] = part.surfaces.size();
        Surface s = table[i];
        s.id = "s" + std::to_string(part.surfaces.size() + 1);
        part.surfaces.push_back(std::move(s));
    }
    for (auto& c : cells)
    {
        std::sort(c.terms.begin(), c.terms.end(), [&](const ProtoTerm& a, const ProtoTerm& b) {
            return std::make_pair(number[a.first], a.second) <
                   std::make_pair(number[b.first], b.second);
        });
        Cell cell;
        cell.id = "c" + std::to_string(part.cells.size() + 1);
        for (const auto& [i, sign] : c.terms)
            cell.region.push_back({part.surfaces[number[i]].id, sign});
        part.cells.push_back(std::move(cell));
    }
    return part;
}

double verify_decomposition(const CsgExpr& expr, const Part& part, int n,
                            std::uint64_t seed, const KernelConfig& kernel)
{
    if (n < 1)
        throw std::invalid_argument("verify_decomposition needs n >= 1");
    const auto cells = resolve_cells(part);

    Box3 box = expr.bounds();
    for (int a = 0; a < 3; ++a)
    {
        const double grow = 0.05 * box.extent(a);
        box.lo[a] -= grow;
        box.hi[a] += grow;
    }

    SplitMix64 rng(seed);
    std::size_t considered = 0, agree = 0;
    for (int i = 0; i < n; ++i)
    {
        const Vec3 p{rng.uniform(box.lo[0], box.hi[0]), rng.uniform(box.lo[1], box.hi[1]),
                     rng.uniform(box.lo[2], box.hi[2])};
        if (expr.near_boundary(p, kernel.boundary_eps))
            continue;
        bool near_part = false;
        for (const auto& s : part.surfaces)
            near_part = near_part || std::abs(margin({s, Sign::Plus}, p)) <= kernel.boundary_eps;
        if (near_part)
            continue;

        ++considered;
        const bool in_part = std::any_of(cells.begin(), cells.end(), [&](const HalfSpaceCell& c) {
            return classify_point(p, c, kernel) == PointClass::Inside;
        });
        agree += in_part == expr.contains(p) ? 1 : 0;
    }
    return considered == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(considered);
}

} // namespace cellforge
