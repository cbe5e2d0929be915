#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cellforge/dataset.hpp"
#include "cellforge/render.hpp"
#include "cellforge/script.hpp"

namespace cellforge
{

//! A part source as found on disk: either a CSG expression or a Part.
struct SourceItem
{
    std::string id;
    Json json;
    bool is_csg = false;
};

/*!
 * Read sources from a directory of *.json files (sorted by file name, id =
 * file stem unless a Part carries its own) or from a .jsonl file of Part
 * objects.
 */
std::vector<SourceItem> load_sources(const std::filesystem::path& path);

//! Like load_sources but every item must be a Part.
std::vector<Part> load_parts(const std::filesystem::path& path);

std::string parts_to_jsonl(std::span<const Part> parts);

//! Cells of a completion example: input cells followed by output cells, with
//! output references to reused surfaces resolved against the input script.
std::vector<HalfSpaceCell> example_cells(const ScriptAst& input, const ScriptAst& output);

//! Annotate every row from the four views of its output cells, framed by the
//! whole example. Rows are annotated on `jobs` threads.
void annotate_rows(std::vector<DatasetRow>& rows, const PipelineConfig& cfg);

struct BuildSummary
{
    std::size_t sources = 0;
    std::size_t rejected = 0;
    std::size_t duplicates = 0;
    std::size_t parts = 0;
    std::size_t rows = 0;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
};

/*!
 * Full pipeline: decompose, filter, dedup, sequence, split, write.
 *
 * Writes into out_dir: parts.jsonl, rejected.csv, duplicates.csv,
 * dataset.jsonl, train.jsonl, test.jsonl, stats.csv, stats.txt and, when
 * rendering is enabled, renders/<part>_view<k>.pgm.
 */
BuildSummary run_build(const std::filesystem::path& input, const std::filesystem::path& out_dir,
                       const PipelineConfig& cfg);

} // namespace cellforge
