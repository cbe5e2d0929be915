#include "cellforge/dedup.hpp"

#include <algorithm>
#include <map>

#include <openssl/evp.h>

#include "cellforge/error.hpp"
#include "cellforge/script.hpp"

namespace cellforge
{
namespace
{
std::array<AxisRotation, 24> make_rotations()
{
    std::array<AxisRotation, 24> out{};
    std::size_t n = 0;
    std::array<int, 3> perm{0, 1, 2};
    do
    {
        // Parity of the permutation.
        int inversions = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                inversions += perm[i] > perm[j] ? 1 : 0;
        const int parity = inversions % 2 ? -1 : 1;
        for (int mask = 0; mask < 8; ++mask)
        {
            std::array<int, 3> sign{};
            int det = parity;
            for (int a = 0; a < 3; ++a)
            {
                sign[a] = (mask >> a) & 1 ? -1 : 1;
                det *= sign[a];
            }
            if (det == 1)
                out[n++] = AxisRotation{perm, sign};
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

Vec3 apply(const AxisRotation& r, double scale, const Vec3& t, const Vec3& p)
{
    Vec3 q{};
    for (int a = 0; a < 3; ++a)
        q[r.perm[a]] = scale * r.sign[a] * p[a];
    for (int a = 0; a < 3; ++a)
        q[a] += t[a];
    return q;
}

} // namespace

std::span<const AxisRotation> axis_rotations()
{
    static const auto rotations = make_rotations();
    return rotations;
}

Part transform_part(const Part& part, const AxisRotation& rotation, double scale,
                    const Vec3& translation)
{
    if (!(scale > 0))
        throw std::invalid_argument("scale must be positive");

    Part out;
    out.id = part.id;
    out.cells = part.cells;
    std::map<std::string, bool> flipped;
    for (const auto& s : part.surfaces)
    {
        const int a = to_int(s.axis());
        const Axis na = static_cast<Axis>(rotation.perm[a]);
        if (is_plane(s.kind))
        {
            Vec3 p{};
            p[a] = s.offset();
            const Vec3 q = apply(rotation, scale, translation, p);
            out.surfaces.push_back(Surface::plane(s.id, na, q[to_int(na)]));
            flipped[s.id] = rotation.sign[a] < 0;
        }
        else
        {
            const auto [u, v] = perpendicular(s.axis());
            Vec3 p{};
            p[u] = s.params[0];
            p[v] = s.params[1];
            const Vec3 q = apply(rotation, scale, translation, p);
            const auto [nu, nv] = perpendicular(na);
            out.surfaces.push_back(
                Surface::cylinder(s.id, na, q[nu], q[nv], scale * s.radius()));
            flipped[s.id] = false;
        }
    }
    for (auto& c : out.cells)
        for (auto& t : c.region)
            if (flipped[t.surface])
                t.sign = opposite(t.sign);
    return out;
}

CanonicalKey canonical_key(const Part& part)
{
    const Box3 box = part_bounds(part);
    const double extent = box.max_extent();
    if (!(extent > 0))
        throw Degenerate("part '" + part.id + "' has zero extent");

    const double scale = 1.0 / extent;
    const Vec3 shift{-box.lo[0] * scale, -box.lo[1] * scale, -box.lo[2] * scale};
    const Part unit = transform_part(part, axis_rotations()[0], scale, shift);

    std::string best;
    for (const auto& rot : axis_rotations())
    {
        // Re-anchor flipped axes so the rotated bounds start at the origin.
        Vec3 anchor{};
        for (int a = 0; a < 3; ++a)
            if (rot.sign[a] < 0)
                anchor[rot.perm[a]] = box.extent(a) * scale;
        const Part turned = transform_part(unit, rot, 1.0, anchor);
        std::string text = serialize(canonicalize(part_to_ast(turned), 6), 6);
        if (best.empty() || text < best)
            best = std::move(text);
    }
    return {sha256_hex(best), best};
}

DedupResult dedup_parts(std::span<const Part> parts)
{
    DedupResult result;
    std::map<std::string, std::string> first_by_key;
    for (const auto& p : parts)
    {
        const auto key = canonical_key(p);
        auto [it, inserted] = first_by_key.emplace(key.digest, p.id);
        if (inserted)
            result.kept.push_back(p);
        else
            result.dropped.emplace_back(p.id, it->second);
    }
    return result;
}

std::string sha256_hex(std::string_view data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i)
    {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

} // namespace cellforge
