#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cellforge/geom.hpp"
#include "cellforge/part_json.hpp"
#include "cellforge/script.hpp"

namespace cellforge
{
//! Per-example verdicts on a generated completion.
struct MetricsRow
{
    std::string example_id;
    bool correct_syntax = false;
    bool all_cells_connected = false;
    bool no_overlapping_cells = false;
    bool correct_syntax_and_logic = false;
    bool all_surfaces_used = false;
    bool same_number_of_cells = false;
    bool structural_match = false;
    bool exact_match = false;
    std::size_t n_input_cells = 0;
    std::size_t n_truth_cells = 0;
    std::size_t n_generated_cells = 0;
    std::string note;
};

inline constexpr std::size_t kMatrixSize = 9;

struct MetricsReport
{
    std::size_t rows = 0;
    double correct_syntax = 0;
    double all_cells_connected = 0;
    double no_overlapping_cells = 0;
    double correct_syntax_and_logic = 0;
    double all_surfaces_used = 0;
    double same_number_of_cells = 0;
    double structural_match = 0;
    double exact_match = 0;

    //! Cell-count matrix: rows are truth counts 1..9, columns generated counts
    //! 1..9 then "10+". Raw counts and row-normalized shares.
    std::array<std::array<std::size_t, kMatrixSize + 1>, kMatrixSize> cell_count_hits{};
    std::array<std::array<double, kMatrixSize + 1>, kMatrixSize> cell_count_share{};

    //! Structural-match share by input cells (rows) and truth cells (columns),
    //! 1..9 each; nullopt where no example falls in the bucket.
    std::array<std::array<std::size_t, kMatrixSize>, kMatrixSize> equality_total{};
    std::array<std::array<std::optional<double>, kMatrixSize>, kMatrixSize> equality_share{};
};

/*!
 * Score one completion.
 *
 * The input must parse (BadInput otherwise). Generated and truth completions
 * are parsed against the input's reuse header. Connectivity and overlap are
 * evaluated over input and generated cells together; comparisons use
 * canonical forms at `decimals` with the reused surfaces resolved from the input.
 */
MetricsRow evaluate_example(std::string_view input_text, std::string_view generated_text,
                            std::string_view truth_text, const KernelConfig& cfg,
                            std::string example_id = {}, int decimals = kDefaultDecimals);

//! Throws EmptyInput for no rows.
MetricsReport aggregate(std::span<const MetricsRow> rows);

Json row_to_json(const MetricsRow& row);
Json report_to_json(const MetricsReport& report);
//! CSV with header "truth\gen,1,...,9,10+"; shares use 6 decimals.
std::string cell_count_csv(const MetricsReport& report);
//! CSV with header "input\truth,1,...,9"; empty buckets are left blank.
std::string equality_csv(const MetricsReport& report);

} // namespace cellforge
