#include <doctest.h>

#include <numbers>

#include "cellforge/dedup.hpp"
#include "cellforge/error.hpp"
#include "cellforge/render.hpp"
#include "fixtures.hpp"

using namespace cellforge;

namespace
{
HalfSpaceCell rod(double r)
{
    return {"rod",
            {{Surface::cylinder("k", Axis::Z, 0, 0, r), Sign::Minus},
             {Surface::plane("b", Axis::Z, 0), Sign::Plus},
             {Surface::plane("t", Axis::Z, 1), Sign::Minus}}};
}

} // namespace

TEST_CASE("unit box views are nonempty and stable")
{
    const std::vector<HalfSpaceCell> cells{fixtures::box_cell(0, 1, 0, 1, 0, 1)};
    const auto a = render_views(cells, 64, {});
    const auto b = render_views(cells, 64, {}, std::nullopt, 4);
    for (std::size_t i = 0; i < 4; ++i)
    {
        CHECK(a[i].view_id == int(i) + 1);
        CHECK(a[i].width == 64);
        CHECK(a[i].height == 64);
        CHECK(a[i].foreground() > 0);
        CHECK(a[i].foreground() < 64u * 64u);
        CHECK(sha256_hex(encode_pgm(a[i])) == sha256_hex(encode_pgm(b[i])));
    }
}

TEST_CASE("no cells is an error")
{
    CHECK_THROWS_AS(render_views({}, 32, {}), EmptyGeometry);
    CHECK_THROWS_AS(render_top_down({}, 32, {}), EmptyGeometry);
}

TEST_CASE("top-down disc covers pi/4 of its square")
{
    const std::vector<HalfSpaceCell> cells{rod(1.0)};
    const ViewImage img = render_top_down(cells, 128, {});
    const double ratio = double(img.foreground()) / double(img.width * img.height);
    CHECK(ratio == doctest::Approx(std::numbers::pi / 4).epsilon(0.02));
}

TEST_CASE("adding cells never removes foreground")
{
    const Box3 frame{{0, 0, 0}, {2, 1, 1}};
    const std::vector<HalfSpaceCell> one{fixtures::box_cell(0, 1, 0, 1, 0, 1)};
    const std::vector<HalfSpaceCell> two{fixtures::box_cell(0, 1, 0, 1, 0, 1),
                                         fixtures::box_cell(1, 2, 0, 1, 0, 1)};
    const auto a = render_views(one, 48, {}, frame);
    const auto b = render_views(two, 48, {}, frame);
    for (std::size_t v = 0; v < 4; ++v)
        for (std::size_t i = 0; i < a[v].pixels.size(); ++i)
            if (a[v].pixels[i])
                CHECK(b[v].pixels[i]);
}

TEST_CASE("view directions")
{
    const auto d = view_directions();
    for (const auto& v : d)
    {
        CHECK(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] == doctest::Approx(1.0));
        CHECK(v[2] > 0);
    }
    CHECK(d[0][0] > 0);
    CHECK(d[0][1] > 0);
    CHECK(d[1][0] < 0);
    CHECK(d[2][1] < 0);
    CHECK(d[3][0] < 0);
    CHECK(d[3][1] < 0);
}

TEST_CASE("PGM bytes")
{
    ViewImage img;
    img.width = 2;
    img.height = 1;
    img.pixels = {0, 255};
    CHECK(encode_pgm(img) == std::string("P5\n2 1\n255\n\x00\xff", 13));
}
