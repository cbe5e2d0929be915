#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellforge/geom.hpp"

namespace cellforge
{
struct ViewImage
{
    int width = 0;
    int height = 0;
    //! Row-major, top row first. 0 is background, 1..255 depth-shaded.
    std::vector<std::uint8_t> pixels;
    int view_id = 0; //!< 1..4 for corner views, 0 for the top-down debug view

    std::size_t foreground() const noexcept;
};

//! Unit directions from the scene center towards the four cameras:
//! (+,+,+), (-,+,+), (+,-,+), (-,-,+).
std::array<Vec3, 4> view_directions() noexcept;

/*!
 * Orthographic ray-marched views from the four upper corners.
 *
 * Each pixel marches with step diag / (4 * size) through the frame (default:
 * bounds of the cells) and stops at the first sample strictly inside a cell;
 * the shade falls linearly with depth. Throws EmptyGeometry for no cells.
 */
std::array<ViewImage, 4> render_views(std::span<const HalfSpaceCell> cells, int size,
                                      const KernelConfig& cfg,
                                      std::optional<Box3> frame = std::nullopt,
                                      std::size_t jobs = 1);

//! Straight-down view whose image covers exactly the frame's xy rectangle.
ViewImage render_top_down(std::span<const HalfSpaceCell> cells, int size,
                          const KernelConfig& cfg, std::optional<Box3> frame = std::nullopt);

//! Binary PGM: "P5\n<w> <h>\n255\n" followed by the pixel bytes.
std::string encode_pgm(const ViewImage& image);

} // namespace cellforge
