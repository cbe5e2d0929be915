#include "cellforge/render.hpp"

#include <algorithm>
#include <cmath>

#include "cellforge/error.hpp"
#include "cellforge/parallel.hpp"

namespace cellforge
{
namespace
{
Vec3 normalize(const Vec3& v) noexcept
{
    const double n = std::hypot(v[0], v[1], v[2]);
    return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 cross(const Vec3& a, const Vec3& b) noexcept
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

bool any_inside(std::span<const HalfSpaceCell> cells, const Vec3& p, const KernelConfig& cfg)
{
    for (const auto& c : cells)
        if (classify_point(p, c, cfg) == PointClass::Inside)
            return true;
    return false;
}

//! Parameter interval where origin + t*dir lies in the box.
bool clip_ray(const Box3& box, const Vec3& origin, const Vec3& dir, double& t0, double& t1) noexcept
{
    for (int a = 0; a < 3; ++a)
    {
        if (std::abs(dir[a]) < 1e-300)
        {
            if (origin[a] < box.lo[a] || origin[a] > box.hi[a])
                return false;
            continue;
        }
        double ta = (box.lo[a] - origin[a]) / dir[a];
        double tb = (box.hi[a] - origin[a]) / dir[a];
        if (ta > tb)
            std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    return t0 <= t1;
}

Box3 frame_of(std::span<const HalfSpaceCell> cells, std::optional<Box3> frame)
{
    if (cells.empty())
        throw EmptyGeometry("nothing to render");
    if (frame)
        return *frame;
    Box3 box = bounding_box(cells.front());
    for (const auto& c : cells.subspan(1))
        box = box.unite(bounding_box(c));
    return box;
}

std::uint8_t shade(double depth, double range) noexcept
{
    const double f = std::clamp(depth / range, 0.0, 1.0);
    return static_cast<std::uint8_t>(255 - static_cast<int>(std::lround(254.0 * f)));
}

} // namespace

std::size_t ViewImage::foreground() const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(pixels.begin(), pixels.end(), [](std::uint8_t v) { return v != 0; }));
}

std::array<Vec3, 4> view_directions() noexcept
{
    return {normalize({1, 1, 1}), normalize({-1, 1, 1}), normalize({1, -1, 1}),
            normalize({-1, -1, 1})};
}

std::array<ViewImage, 4> render_views(std::span<const HalfSpaceCell> cells, int size,
                                      const KernelConfig& cfg, std::optional<Box3> frame,
                                      std::size_t jobs)
{
    if (size < 1)
        throw std::invalid_argument("image size must be positive");
    const Box3 box = frame_of(cells, frame);
    const double diag = box.diagonal();
    const double radius = 0.5 * diag;
    const double step = diag / (4.0 * size);
    const Vec3 center = box.center();

    std::array<ViewImage, 4> views;
    const auto dirs = view_directions();
    for (int v = 0; v < 4; ++v)
    {
        const Vec3 c = dirs[v];
        const Vec3 forward{-c[0], -c[1], -c[2]};
        const Vec3 right = normalize(cross(forward, {0, 0, 1}));
        const Vec3 up = cross(right, forward);

        ViewImage& img = views[v];
        img.width = img.height = size;
        img.view_id = v + 1;
        img.pixels.assign(static_cast<std::size_t>(size) * size, 0);

        parallel_for(static_cast<std::size_t>(size), jobs, [&](std::size_t row) {
            const double t_coord = radius - (static_cast<double>(row) + 0.5) * diag / size;
            for (int col = 0; col < size; ++col)
            {
                const double s_coord = -radius + (col + 0.5) * diag / size;
                Vec3 origin;
                for (int a = 0; a < 3; ++a)
                    origin[a] = center[a] + radius * c[a] + s_coord * right[a] + t_coord * up[a];
                double t0 = 0, t1 = diag;
                if (!clip_ray(box, origin, forward, t0, t1))
                    continue;
                for (auto k = static_cast<long>(std::ceil(t0 / step)); k * step <= t1; ++k)
                {
                    const double t = k * step;
                    const Vec3 p{origin[0] + t * forward[0], origin[1] + t * forward[1],
                                 origin[2] + t * forward[2]};
                    if (any_inside(cells, p, cfg))
                    {
                        img.pixels[row * size + col] = shade(t, diag);
                        break;
                    }
                }
            }
        });
    }
    return views;
}

ViewImage render_top_down(std::span<const HalfSpaceCell> cells, int size,
                          const KernelConfig& cfg, std::optional<Box3> frame)
{
    if (size < 1)
        throw std::invalid_argument("image size must be positive");
    const Box3 box = frame_of(cells, frame);
    const double step = box.diagonal() / (4.0 * size);

    ViewImage img;
    img.width = img.height = size;
    img.pixels.assign(static_cast<std::size_t>(size) * size, 0);
    for (int row = 0; row < size; ++row)
    {
        const double y = box.hi[1] - (row + 0.5) * box.extent(1) / size;
        for (int col = 0; col < size; ++col)
        {
            const double x = box.lo[0] + (col + 0.5) * box.extent(0) / size;
            for (double depth = 0.5 * step; depth < box.extent(2); depth += step)
            {
                if (any_inside(cells, {x, y, box.hi[2] - depth}, cfg))
                {
                    img.pixels[static_cast<std::size_t>(row) * size + col] =
                        shade(depth, box.extent(2));
                    break;
                }
            }
        }
    }
    return img;
}

std::string encode_pgm(const ViewImage& image)
{
    std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                      "\n255\n";
    out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
    return out;
}

} // namespace cellforge
