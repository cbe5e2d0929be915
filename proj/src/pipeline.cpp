#include "cellforge/pipeline.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "cellforge/csg.hpp"
#include "cellforge/decompose.hpp"
#include "cellforge/dedup.hpp"
#include "cellforge/error.hpp"
#include "cellforge/parallel.hpp"

namespace fs = std::filesystem;

namespace cellforge
{
namespace
{
bool looks_like_csg(const Json& j) { return j.is_object() && (j.contains("op") || j.contains("prim")); }

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::vector<SourceItem> load_sources(const fs::path& path)
{
    std::vector<SourceItem> items;
    std::vector<fs::path> files;
    if (fs::is_directory(path))
    {
        for (const auto& entry : fs::directory_iterator(path))
            if (entry.is_regular_file() && entry.path().extension() == ".json")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
    }
    else if (path.extension() == ".json")
        files.push_back(path);

    if (!files.empty() || fs::is_directory(path))
    {
        for (const auto& f : files)
        {
            Json j;
            try
            {
                j = Json::parse(read_text_file(f));
            }
            catch (const Json::parse_error& e)
            {
                throw FormatError(f.string() + ": " + e.what());
            }
            const bool csg = looks_like_csg(j);
            std::string id = f.stem().string();
            if (!csg && j.is_object() && j.contains("id") && j.at("id").is_string())
                id = j.at("id").get<std::string>();
            items.push_back({std::move(id), std::move(j), csg});
        }
    }
    else
    {
        std::size_t line = 0;
        for (auto& j : read_jsonl(path))
        {
            ++line;
            const bool csg = looks_like_csg(j);
            std::string id;
            if (j.is_object() && j.contains("id") && j.at("id").is_string())
                id = j.at("id").get<std::string>();
            else if (csg)
                id = path.stem().string() + "_" + std::to_string(line);
            else
                throw FormatError(path.string() + ":" + std::to_string(line) + ": part without id");
            items.push_back({std::move(id), std::move(j), csg});
        }
    }
    return items;
}

std::vector<Part> load_parts(const fs::path& path)
{
    std::vector<Part> parts;
    for (const auto& item : load_sources(path))
    {
        if (item.is_csg)
            throw FormatError("'" + item.id + "' is a CSG expression, expected a part");
        parts.push_back(part_from_json(item.json));
    }
    return parts;
}

std::string parts_to_jsonl(std::span<const Part> parts)
{
    std::string out;
    for (const auto& p : parts)
        out += part_to_json(p).dump() + "\n";
    return out;
}

std::vector<HalfSpaceCell> example_cells(const ScriptAst& input, const ScriptAst& output)
{
    std::vector<HalfSpaceCell> cells;
    auto add = [&](const Cell& c, const ScriptAst& own) {
        HalfSpaceCell h;
        h.id = c.id;
        for (const auto& t : c.region)
        {
            const Surface* s = own.find_surface(t.surface);
            if (!s)
                s = input.find_surface(t.surface);
            if (!s)
                throw ReferenceError("unresolved surface '" + t.surface + "'");
            h.constraints.push_back({*s, t.sign});
        }
        cells.push_back(std::move(h));
    };
    for (const auto& c : input.cells)
        add(c, input);
    for (const auto& c : output.cells)
        add(c, output);
    return cells;
}

void annotate_rows(std::vector<DatasetRow>& rows, const PipelineConfig& cfg)
{
    if (cfg.annotate.url.empty())
        throw std::invalid_argument("annotate.url is not configured");
    const AnnotationClient client(cfg.annotate);
    parallel_for(rows.size(), cfg.jobs, [&](std::size_t i) {
        DatasetRow& row = rows[i];
        const ScriptAst input = parse(row.input_script);
        const ScriptAst output =
            parse(row.output_script, input.reuse_header.value_or(std::vector<std::string>{}));
        const auto all = example_cells(input, output);
        Box3 frame = bounding_box(all.front());
        for (const auto& c : all)
            frame = frame.unite(bounding_box(c));
        const std::span<const HalfSpaceCell> out_cells(all.data() + input.cells.size(),
                                                       output.cells.size());
        const auto views = render_views(out_cells, cfg.render_size, cfg.kernel, frame);
        row.annotation = client.annotate(views);
    });
}

BuildSummary run_build(const fs::path& input, const fs::path& out_dir, const PipelineConfig& cfg)
{
    cfg.validate();
    const auto sources = load_sources(input);
    BuildSummary summary;
    summary.sources = sources.size();

    // Decompose CSG sources and parse part sources; unsupported kinds are
    // rejected rather than fatal.
    std::vector<std::optional<Part>> loaded(sources.size());
    std::vector<std::string> reject_lines(sources.size());
    parallel_for(sources.size(), cfg.jobs, [&](std::size_t i) {
        const SourceItem& item = sources[i];
        try
        {
            if (item.is_csg)
            {
                loaded[i] = decompose(csg_from_json(item.json), cfg.decompose, item.id);
                return;
            }
            const FilterVerdict v = filter_part_json(item.json, 0, std::numeric_limits<std::size_t>::max());
            if (!v.accepted())
                reject_lines[i] = csv_field(item.id) + "," + std::string(reject_name(*v.reject));
            else
                loaded[i] = part_from_json(item.json);
        }
        catch (const Error& e)
        {
            throw Error("source '" + item.id + "': " + e.what());
        }
    });

    std::vector<Part> all_parts;
    for (auto& p : loaded)
        if (p)
            all_parts.push_back(std::move(*p));

    std::string rejected = "part_id,reason\n";
    for (const auto& line : reject_lines)
        if (!line.empty())
        {
            rejected += line + "\n";
            ++summary.rejected;
        }
    std::vector<FilterVerdict> verdicts(all_parts.size());
    parallel_for(all_parts.size(), cfg.jobs, [&](std::size_t i) {
        verdicts[i] = filter_part(all_parts[i], cfg.min_cells, cfg.max_cells);
        if (verdicts[i].accepted() && !build_graph(all_parts[i], cfg.kernel).connected())
            verdicts[i] = {RejectReason::Disconnected, "cells do not form one solid"};
    });
    std::vector<Part> accepted;
    for (std::size_t i = 0; i < all_parts.size(); ++i)
    {
        if (verdicts[i].accepted())
            accepted.push_back(all_parts[i]);
        else
        {
            rejected += csv_field(all_parts[i].id) + "," +
                        std::string(reject_name(*verdicts[i].reject)) + "\n";
            ++summary.rejected;
        }
    }
    std::stable_sort(accepted.begin(), accepted.end(),
                     [](const Part& a, const Part& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < accepted.size(); ++i)
        if (accepted[i].id == accepted[i - 1].id)
            throw InvalidPart("duplicate part id '" + accepted[i].id + "'");

    std::string duplicates = "part_id,duplicate_of\n";
    std::vector<Part> parts;
    if (cfg.dedup)
    {
        DedupResult d = dedup_parts(accepted);
        for (const auto& [id, of] : d.dropped)
            duplicates += csv_field(id) + "," + csv_field(of) + "\n";
        summary.duplicates = d.dropped.size();
        parts = std::move(d.kept);
    }
    else
        parts = std::move(accepted);
    summary.parts = parts.size();

    std::vector<DatasetRow> rows = build_dataset(parts, cfg);
    if (cfg.annotate_rows)
        annotate_rows(rows, cfg);
    summary.rows = rows.size();

    fs::create_directories(out_dir);
    write_text_file(out_dir / "parts.jsonl", parts_to_jsonl(parts));
    write_text_file(out_dir / "rejected.csv", rejected);
    write_text_file(out_dir / "duplicates.csv", duplicates);
    write_text_file(out_dir / "dataset.jsonl", rows_to_jsonl(rows));
    if (!rows.empty())
    {
        const DatasetSplit split = split_dataset(rows, cfg.split_ratio, cfg.seed);
        summary.train_rows = split.train.size();
        summary.test_rows = split.test.size();
        write_text_file(out_dir / "train.jsonl", rows_to_jsonl(split.train));
        write_text_file(out_dir / "test.jsonl", rows_to_jsonl(split.test));
    }
    else
    {
        write_text_file(out_dir / "train.jsonl", "");
        write_text_file(out_dir / "test.jsonl", "");
    }

    const CellHistogram hist = cell_histogram(all_parts);
    write_text_file(out_dir / "stats.csv", hist.csv());
    write_text_file(out_dir / "stats.txt", hist.chart());

    if (cfg.render)
    {
        for (const auto& p : parts)
        {
            const auto views = render_views(resolve_cells(p), cfg.render_size, cfg.kernel,
                                            std::nullopt, cfg.jobs);
            for (const auto& v : views)
                write_text_file(out_dir / "renders" /
                                    (p.id + "_view" + std::to_string(v.view_id) + ".pgm"),
                                encode_pgm(v));
        }
    }
    return summary;
}

} // namespace cellforge
