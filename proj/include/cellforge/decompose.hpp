#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "cellforge/csg.hpp"
#include "cellforge/geom.hpp"

namespace cellforge
{
struct DecomposeConfig
{
    //! Interior samples per region; all must agree on membership.
    int classify_samples = 16;
    //! Samples for the emptiness test of regions cut by 2+ cylinders.
    int empty_samples = 256;
    bool merge = true;
    std::uint64_t seed = 0;
    KernelConfig kernel;
};

/*!
 * Split a CSG expression into pairwise-disjoint half-space cells.
 *
 * Space is cut into grid boxes by every box face and cylinder cap, each grid
 * box is split further by the lateral surfaces of the cylinders crossing it,
 * and every resulting region is classified by sampling against the
 * expression. Regions inside the solid become cells; with `merge` set,
 * face-neighbours whose union is again a single conjunction are fused
 * (x, then y, then z, lowest index first) until nothing changes.
 *
 * Throws MixedRegion when a region's samples disagree and EmptySolid when no
 * region is inside.
 */
Part decompose(const CsgExpr& expr, const DecomposeConfig& cfg,
               std::string part_id = "part");

/*!
 * Emptiness of a box restricted by cylinder constraints.
 *
 * With at most one constraint the answer is exact (circle against the box's
 * cross-section); otherwise `cfg.empty_samples` seeded samples are drawn and
 * the region is empty iff none lands strictly inside. Non-cylinder
 * constraints are ignored.
 */
bool region_empty(const Box3& box, std::span<const Constraint> cyl_constraints,
                  const DecomposeConfig& cfg);

/*!
 * Fraction of `n` seeded points (in the expression's bounds grown by 10%)
 * where membership in `expr` and in the union of `part`'s cells agree.
 * Points within boundary_eps of any surface are skipped.
 */
double verify_decomposition(const CsgExpr& expr, const Part& part, int n,
                            std::uint64_t seed, const KernelConfig& kernel = {});

} // namespace cellforge
