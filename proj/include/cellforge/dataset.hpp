#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cellforge/annotate.hpp"
#include "cellforge/decompose.hpp"
#include "cellforge/geom.hpp"
#include "cellforge/part_json.hpp"
#include "cellforge/sequence.hpp"

namespace cellforge
{
enum class Augment
{
    None,       //!< least connected order, middle cut
    Cut,        //!< least connected order, every cut
    Order,      //!< up to `cap` orders, middle cut
    CutAndOrder //!< up to `cap` orders, every cut
};

std::string_view augment_name(Augment a) noexcept;
std::optional<Augment> augment_from_name(std::string_view name) noexcept;

struct PipelineConfig
{
    KernelConfig kernel;
    DecomposeConfig decompose;
    AnnotateConfig annotate;
    Augment augment = Augment::None;
    std::size_t cap = 24;
    double split_ratio = 0.9;
    std::size_t min_cells = 2;
    std::size_t max_cells = 10;
    int quantize_decimals = 6;
    int render_size = 64;
    bool render = false;
    bool annotate_rows = false;
    bool dedup = true;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;

    //! Throws std::invalid_argument when a field is out of range.
    void validate() const;
    //! Propagate `seed` into every module configuration.
    void set_seed(std::uint64_t s) noexcept;
};

/*!
 * Apply a flat key=value configuration ('#' starts a comment). Keys carry a
 * section prefix: geom., decompose., sequence., script., dedup., render.,
 * annotate., dataset. Unknown keys and malformed values throw FormatError.
 */
void apply_config_text(std::string_view text, PipelineConfig& cfg);
void apply_config_file(const std::filesystem::path& path, PipelineConfig& cfg);

enum class RejectReason
{
    TooManyCells,
    TooFewCells,
    UnsupportedSurface,
    Disconnected //!< assigned by run_build: no connected build order exists
};

std::string_view reject_name(RejectReason r) noexcept;

struct FilterVerdict
{
    std::optional<RejectReason> reject; //!< nullopt means accepted
    std::string detail;

    bool accepted() const noexcept { return !reject; }
};

FilterVerdict filter_part(const Part& part, std::size_t min_cells = 2, std::size_t max_cells = 10);
//! Filter straight from Part JSON so unsupported surface kinds are reported
//! instead of failing to load.
FilterVerdict filter_part_json(const Json& j, std::size_t min_cells = 2, std::size_t max_cells = 10);

struct DatasetRow
{
    std::string part_id;
    std::vector<std::string> order;
    std::size_t cut = 0;
    std::string input_script;
    std::string output_script;
    std::vector<std::string> reused; //!< part surface ids
    std::optional<std::string> annotation;
};

Json dataset_row_to_json(const DatasetRow& row);
DatasetRow dataset_row_from_json(const Json& j);
//! One row per line, fixed key order, trailing newline.
std::string rows_to_jsonl(std::span<const DatasetRow> rows);

/*!
 * Completion examples for every part, sorted by part id, then order, then cut.
 * Parts are processed on cfg.jobs threads; the output does not depend on it.
 */
std::vector<DatasetRow> build_dataset(std::span<const Part> parts, const PipelineConfig& cfg);

struct DatasetSplit
{
    std::vector<DatasetRow> train;
    std::vector<DatasetRow> test;
};

//! Part-level seeded split; round(ratio * parts) parts go to train.
DatasetSplit split_dataset(std::span<const DatasetRow> rows, double ratio, std::uint64_t seed);

//! Parts by cell count: buckets 1..9 and 10+.
struct CellHistogram
{
    std::array<std::size_t, 10> counts{};

    std::size_t total() const noexcept;
    std::string csv() const;
    std::string chart(std::size_t width = 40) const;
};

CellHistogram cell_histogram(std::span<const Part> parts);

} // namespace cellforge
