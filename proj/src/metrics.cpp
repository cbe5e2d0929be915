#include "cellforge/metrics.hpp"

#include <algorithm>
#include <set>

#include "cellforge/error.hpp"
#include "cellforge/script.hpp"

namespace cellforge
{
namespace
{
HalfSpaceCell resolve_layered(const Cell& cell, const ScriptAst& primary, const ScriptAst& fallback,
                              const std::string& prefix)
{
    HalfSpaceCell out;
    out.id = prefix + cell.id;
    for (const auto& t : cell.region)
    {
        const Surface* s = primary.find_surface(t.surface);
        if (!s)
            s = fallback.find_surface(t.surface);
        if (!s)
            throw ReferenceError("unresolved surface '" + t.surface + "'");
        out.constraints.push_back({*s, t.sign});
    }
    return out;
}

std::string share_text(double v) { return format_fixed(v, 6); }

} // namespace

MetricsRow evaluate_example(std::string_view input_text, std::string_view generated_text,
                            std::string_view truth_text, const KernelConfig& cfg,
                            std::string example_id, int decimals)
{
    MetricsRow row;
    row.example_id = std::move(example_id);

    ScriptAst input, truth;
    try
    {
        input = parse(input_text);
    }
    catch (const ParseError& e)
    {
        throw BadInput("input script does not parse: " + std::string(e.what()));
    }
    const std::vector<std::string> header = input.reuse_header.value_or(std::vector<std::string>{});
    try
    {
        truth = parse(truth_text, header);
    }
    catch (const ParseError& e)
    {
        throw BadInput("ground-truth script does not parse: " + std::string(e.what()));
    }

    std::vector<HalfSpaceCell> combined;
    for (const auto& c : input.cells)
    {
        combined.push_back(resolve_layered(c, input, input, "input:"));
        if (!is_valid_cell(combined.back(), cfg))
            throw BadInput("input cell '" + c.id + "' is unbounded or empty");
    }
    row.n_input_cells = input.cells.size();
    row.n_truth_cells = truth.cells.size();

    ScriptAst generated;
    try
    {
        generated = parse(generated_text, header);
    }
    catch (const ParseError& e)
    {
        row.note = e.what();
        return row;
    }
    row.correct_syntax = true;
    row.n_generated_cells = generated.cells.size();

    std::vector<std::string> invalid;
    for (const auto& c : generated.cells)
    {
        combined.push_back(resolve_layered(c, generated, input, "generated:"));
        if (!is_valid_cell(combined.back(), cfg))
            invalid.push_back(c.id);
    }

    if (!invalid.empty())
    {
        row.note = "invalid generated cell(s):";
        for (const auto& id : invalid)
            row.note += " " + id;
    }
    else if (!combined.empty())
    {
        row.all_cells_connected = all_connected(combined, cfg);
        row.no_overlapping_cells = true;
        for (std::size_t i = 0; i < combined.size() && row.no_overlapping_cells; ++i)
            for (std::size_t j = i + 1; j < combined.size(); ++j)
                if (cells_overlap(combined[i], combined[j], cfg))
                {
                    row.no_overlapping_cells = false;
                    break;
                }
    }
    row.correct_syntax_and_logic =
        row.correct_syntax && row.all_cells_connected && row.no_overlapping_cells;

    std::set<std::string> referenced;
    for (const auto& c : generated.cells)
        for (const auto& t : c.region)
            referenced.insert(t.surface);
    row.all_surfaces_used = std::all_of(header.begin(), header.end(),
                                        [&](const std::string& id) { return referenced.count(id) > 0; });

    const CompareVerdict v = compare(with_external_definitions(generated, input),
                                     with_external_definitions(truth, input), decimals);
    row.exact_match = v.exact;
    row.structural_match = v.structural;
    row.same_number_of_cells = v.same_cell_count;
    return row;
}

MetricsReport aggregate(std::span<const MetricsRow> rows)
{
    if (rows.empty())
        throw EmptyInput("no metric rows to aggregate");

    MetricsReport r;
    r.rows = rows.size();
    for (const auto& row : rows)
    {
        r.correct_syntax += row.correct_syntax;
        r.all_cells_connected += row.all_cells_connected;
        r.no_overlapping_cells += row.no_overlapping_cells;
        r.correct_syntax_and_logic += row.correct_syntax_and_logic;
        r.all_surfaces_used += row.all_surfaces_used;
        r.same_number_of_cells += row.same_number_of_cells;
        r.structural_match += row.structural_match;
        r.exact_match += row.exact_match;

        const bool truth_in = row.n_truth_cells >= 1 && row.n_truth_cells <= kMatrixSize;
        if (truth_in && row.correct_syntax && row.n_generated_cells >= 1)
        {
            const std::size_t col = std::min(row.n_generated_cells, kMatrixSize + 1) - 1;
            ++r.cell_count_hits[row.n_truth_cells - 1][col];
        }
        if (truth_in && row.n_input_cells >= 1 && row.n_input_cells <= kMatrixSize)
            ++r.equality_total[row.n_input_cells - 1][row.n_truth_cells - 1];
    }
    const double n = static_cast<double>(rows.size());
    for (double* m : {&r.correct_syntax, &r.all_cells_connected, &r.no_overlapping_cells,
                      &r.correct_syntax_and_logic, &r.all_surfaces_used, &r.same_number_of_cells,
                      &r.structural_match, &r.exact_match})
        *m /= n;

    for (std::size_t t = 0; t < kMatrixSize; ++t)
    {
        std::size_t total = 0;
        for (auto c : r.cell_count_hits[t])
            total += c;
        for (std::size_t g = 0; g <= kMatrixSize; ++g)
            r.cell_count_share[t][g] =
                total ? static_cast<double>(r.cell_count_hits[t][g]) / static_cast<double>(total) : 0.0;
    }

    std::array<std::array<std::size_t, kMatrixSize>, kMatrixSize> matched{};
    for (const auto& row : rows)
        if (row.structural_match && row.n_input_cells >= 1 && row.n_input_cells <= kMatrixSize &&
            row.n_truth_cells >= 1 && row.n_truth_cells <= kMatrixSize)
            ++matched[row.n_input_cells - 1][row.n_truth_cells - 1];
    for (std::size_t i = 0; i < kMatrixSize; ++i)
        for (std::size_t t = 0; t < kMatrixSize; ++t)
            if (r.equality_total[i][t])
                r.equality_share[i][t] =
                    static_cast<double>(matched[i][t]) / static_cast<double>(r.equality_total[i][t]);
    return r;
}

Json row_to_json(const MetricsRow& row)
{
    return {{"example_id", row.example_id},
            {"correct_syntax", row.correct_syntax},
            {"all_cells_connected", row.all_cells_connected},
            {"no_overlapping_cells", row.no_overlapping_cells},
            {"correct_syntax_and_logic", row.correct_syntax_and_logic},
            {"all_surfaces_used", row.all_surfaces_used},
            {"same_number_of_cells", row.same_number_of_cells},
            {"structural_match", row.structural_match},
            {"exact_match", row.exact_match},
            {"n_input_cells", row.n_input_cells},
            {"n_truth_cells", row.n_truth_cells},
            {"n_generated_cells", row.n_generated_cells},
            {"note", row.note}};
}

Json report_to_json(const MetricsReport& r)
{
    Json means = {{"correct_syntax", r.correct_syntax},
                  {"all_cells_connected", r.all_cells_connected},
                  {"no_overlapping_cells", r.no_overlapping_cells},
                  {"correct_syntax_and_logic", r.correct_syntax_and_logic},
                  {"all_surfaces_used", r.all_surfaces_used},
                  {"same_number_of_cells", r.same_number_of_cells},
                  {"structural_match", r.structural_match},
                  {"exact_match", r.exact_match}};
    Json eq = Json::array();
    for (const auto& line : r.equality_share)
    {
        Json jl = Json::array();
        for (const auto& v : line)
            jl.push_back(v ? Json(*v) : Json(nullptr));
        eq.push_back(jl);
    }
    return {{"rows", r.rows},
            {"means", means},
            {"cell_count_matrix", {{"hits", r.cell_count_hits}, {"share", r.cell_count_share}}},
            {"equality_matrix", {{"total", r.equality_total}, {"share", eq}}}};
}

std::string cell_count_csv(const MetricsReport& r)
{
    std::string out = "truth\\gen";
    for (std::size_t g = 1; g <= kMatrixSize; ++g)
        out += "," + std::to_string(g);
    out += ",10+\n";
    for (std::size_t t = 0; t < kMatrixSize; ++t)
    {
        out += std::to_string(t + 1);
        for (double v : r.cell_count_share[t])
            out += "," + share_text(v);
        out += "\n";
    }
    return out;
}

std::string equality_csv(const MetricsReport& r)
{
    std::string out = "input\\truth";
    for (std::size_t t = 1; t <= kMatrixSize; ++t)
        out += "," + std::to_string(t);
    out += "\n";
    for (std::size_t i = 0; i < kMatrixSize; ++i)
    {
        out += std::to_string(i + 1);
        for (const auto& v : r.equality_share[i])
            out += "," + (v ? share_text(*v) : std::string());
        out += "\n";
    }
    return out;
}

} // namespace cellforge
