#include <doctest.h>

#include <set>

#include "cellforge/decompose.hpp"
#include "cellforge/dedup.hpp"
#include "cellforge/error.hpp"
#include "cellforge/random.hpp"
#include "fixtures.hpp"

using namespace cellforge;

namespace
{
Part l_part()
{
    return decompose(fixtures::csg_suite()[3].expr, {}, "L");
}

AxisRotation quarter_turn_z()
{
    // (x, y, z) -> (-y, x, z)
    return {{1, 0, 2}, {1, -1, 1}};
}

} // namespace

TEST_CASE("the rotation group")
{
    const auto rots = axis_rotations();
    REQUIRE(rots.size() == 24);
    CHECK(rots[0].perm == std::array<int, 3>{0, 1, 2});
    CHECK(rots[0].sign == std::array<int, 3>{1, 1, 1});
    std::set<std::pair<std::array<int, 3>, std::array<int, 3>>> distinct;
    for (const auto& r : rots)
        distinct.insert({r.perm, r.sign});
    CHECK(distinct.size() == 24);
}

TEST_CASE("transform_part keeps cells valid")
{
    const Part p = l_part();
    SplitMix64 rng(3);
    for (const auto& rot : axis_rotations())
    {
        const Part q = transform_part(p, rot, 1.5, {rng.uniform(-5, 5), 2, -1});
        CHECK_NOTHROW(validate_part(q, {}));
    }
}

TEST_CASE("keys are invariant under translation, scale and rotation")
{
    const Part p = l_part();
    const std::string key = canonical_key(p).digest;
    CHECK(key.size() == 64);
    const AxisRotation id = axis_rotations()[0];
    CHECK(canonical_key(transform_part(p, id, 1, {3, -2, 7})).digest == key);
    CHECK(canonical_key(transform_part(p, id, 2.5, {0, 0, 0})).digest == key);
    CHECK(canonical_key(transform_part(p, quarter_turn_z(), 1, {0, 0, 0})).digest == key);

    const Part holed = decompose(fixtures::csg_suite()[16].expr, {}, "lh");
    CHECK(canonical_key(transform_part(holed, axis_rotations()[17], 0.3, {1, 1, 1})).digest ==
          canonical_key(holed).digest);
}

TEST_CASE("dissimilar shapes get different keys")
{
    const Part cube = fixtures::box_part({{0, 1, 0, 1, 0, 1}});
    const Part slab = fixtures::box_part({{0, 1, 0, 1, 0, 2}});
    CHECK(canonical_key(cube).digest != canonical_key(slab).digest);
}

TEST_CASE("dedup_parts keeps first occurrences")
{
    const Part a = l_part();
    Part moved = transform_part(a, axis_rotations()[0], 1, {4, 4, 4});
    moved.id = "L2";
    Part b = fixtures::row_part(3, "B");
    const std::vector<Part> parts{a, moved, b};
    const DedupResult r = dedup_parts(parts);
    REQUIRE(r.kept.size() == 2);
    CHECK(r.kept[0].id == "L");
    CHECK(r.kept[1].id == "B");
    REQUIRE(r.dropped.size() == 1);
    CHECK(r.dropped[0] == std::pair<std::string, std::string>{"L2", "L"});

    const DedupResult none = dedup_parts({});
    CHECK(none.kept.empty());
    CHECK(none.dropped.empty());
}

TEST_CASE("sha256")
{
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
