#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cellforge/geom.hpp"

namespace cellforge
{
//! Proper rotation of the axis frame: new[perm[a]] = sign[a] * old[a].
struct AxisRotation
{
    std::array<int, 3> perm{0, 1, 2};
    std::array<int, 3> sign{1, 1, 1};
};

//! The 24 rotations mapping the coordinate axes onto themselves, identity
//! first. Reflections are excluded.
std::span<const AxisRotation> axis_rotations();

//! Image of `part` under p -> scale * R p + translation (scale > 0).
Part transform_part(const Part& part, const AxisRotation& rotation, double scale,
                    const Vec3& translation);

struct CanonicalKey
{
    std::string digest;         //!< lowercase hex SHA-256
    std::string canonical_text; //!< minimizing serialization

    bool operator==(const CanonicalKey& o) const { return digest == o.digest; }
};

/*!
 * Similarity-invariant key of a part.
 *
 * The part is moved so its bounds start at the origin and scaled to unit
 * maximum extent; each of the 24 axis rotations is then applied (re-anchored
 * at the origin), the result canonicalized at 6 decimals and serialized. The
 * key is the SHA-256 of the smallest serialization. Throws Degenerate for a
 * part with zero extent.
 */
CanonicalKey canonical_key(const Part& part);

struct DedupResult
{
    std::vector<Part> kept;
    //! (dropped id, id of the earlier part it duplicates)
    std::vector<std::pair<std::string, std::string>> dropped;
};

//! First occurrence wins; order of `parts` defines survivorship.
DedupResult dedup_parts(std::span<const Part> parts);

std::string sha256_hex(std::string_view data);

} // namespace cellforge
