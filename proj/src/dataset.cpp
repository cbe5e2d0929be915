#include "cellforge/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>

#include "cellforge/error.hpp"
#include "cellforge/parallel.hpp"
#include "cellforge/random.hpp"
#include "cellforge/script.hpp"

namespace cellforge
{
namespace
{
std::string_view trim(std::string_view s) noexcept
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template<class T>
T parse_number(std::string_view key, std::string_view value)
{
    T out{};
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size())
        throw FormatError("config key '" + std::string(key) + "': bad number '" +
                          std::string(value) + "'");
    return out;
}

bool parse_bool(std::string_view key, std::string_view value)
{
    if (value == "true" || value == "1" || value == "yes")
        return true;
    if (value == "false" || value == "0" || value == "no")
        return false;
    throw FormatError("config key '" + std::string(key) + "': expected true/false");
}

std::vector<DatasetRow> rows_for_part(const Part& part, const PipelineConfig& cfg)
{
    const std::size_t n = part.cells.size();
    if (n < 2)
        throw TooSmall("needs at least two cells");
    const AdjacencyGraph graph = build_graph(part, cfg.kernel);
    const std::uint64_t seed = hash_combine(cfg.seed, hash_string(part.id));

    std::vector<BuildSequence> orders;
    if (cfg.augment == Augment::Order || cfg.augment == Augment::CutAndOrder)
        orders = enumerate_orders(graph, cfg.cap, seed, part.id);
    else
        orders.push_back(first_order(graph, part.id));

    const bool every_cut = cfg.augment == Augment::Cut || cfg.augment == Augment::CutAndOrder;
    std::vector<DatasetRow> rows;
    for (const auto& seq : orders)
    {
        std::vector<std::size_t> cuts;
        if (every_cut)
            for (std::size_t k = 1; k < n; ++k)
                cuts.push_back(k);
        else
            cuts.push_back(middle_cut(n));

        for (std::size_t k : cuts)
        {
            const SplitExample ex = split_at(seq, part, k);
            auto [in, out] = emit(ex, part);
            rows.push_back({part.id, seq.order, k, std::move(in), std::move(out),
                            ex.reused_surfaces, std::nullopt});
        }
    }
    return rows;
}

} // namespace

std::string_view augment_name(Augment a) noexcept
{
    switch (a)
    {
        case Augment::None: return "none";
        case Augment::Cut: return "cut";
        case Augment::Order: return "order";
        case Augment::CutAndOrder: return "cut_and_order";
    }
    return "none";
}

std::optional<Augment> augment_from_name(std::string_view name) noexcept
{
    for (auto a : {Augment::None, Augment::Cut, Augment::Order, Augment::CutAndOrder})
        if (augment_name(a) == name)
            return a;
    return std::nullopt;
}

void PipelineConfig::validate() const
{
    kernel.validate();
    if (!(split_ratio > 0 && split_ratio < 1))
        throw std::invalid_argument("split_ratio must lie in (0, 1)");
    if (min_cells > max_cells)
        throw std::invalid_argument("min_cells must not exceed max_cells");
    if (cap < 1)
        throw std::invalid_argument("sequence cap must be >= 1");
    if (decompose.classify_samples < 1 || decompose.empty_samples < 1)
        throw std::invalid_argument("decompose sample counts must be >= 1");
    if (quantize_decimals < 0 || quantize_decimals > 12)
        throw std::invalid_argument("script.quantize_decimals must lie in [0, 12]");
    if (render_size < 1)
        throw std::invalid_argument("render size must be >= 1");
    if (annotate.retries < 0)
        throw std::invalid_argument("annotate retries must be >= 0");
}

void PipelineConfig::set_seed(std::uint64_t s) noexcept
{
    seed = s;
    kernel.seed = s;
    decompose.seed = s;
    decompose.kernel.seed = s;
}

void apply_config_text(std::string_view text, PipelineConfig& cfg)
{
    std::size_t start = 0, lineno = 0;
    while (start <= text.size())
    {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw FormatError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view v = trim(line.substr(eq + 1));

        if (key == "geom.boundary_eps")
            cfg.kernel.boundary_eps = cfg.decompose.kernel.boundary_eps = parse_number<double>(key, v);
        else if (key == "geom.face_eps")
            cfg.kernel.face_eps = cfg.decompose.kernel.face_eps = parse_number<double>(key, v);
        else if (key == "geom.mc_samples_face")
            cfg.kernel.mc_samples_face = cfg.decompose.kernel.mc_samples_face = parse_number<int>(key, v);
        else if (key == "geom.mc_samples_overlap")
            cfg.kernel.mc_samples_overlap = cfg.decompose.kernel.mc_samples_overlap =
                parse_number<int>(key, v);
        else if (key == "geom.seed")
            cfg.kernel.seed = cfg.decompose.kernel.seed = parse_number<std::uint64_t>(key, v);
        else if (key == "decompose.classify_samples")
            cfg.decompose.classify_samples = parse_number<int>(key, v);
        else if (key == "decompose.empty_samples")
            cfg.decompose.empty_samples = parse_number<int>(key, v);
        else if (key == "decompose.merge")
            cfg.decompose.merge = parse_bool(key, v);
        else if (key == "decompose.seed")
            cfg.decompose.seed = parse_number<std::uint64_t>(key, v);
        else if (key == "sequence.cap")
            cfg.cap = v == "inf" ? kUnlimited : parse_number<std::size_t>(key, v);
        else if (key == "script.quantize_decimals")
            cfg.quantize_decimals = parse_number<int>(key, v);
        else if (key == "dedup.enabled")
            cfg.dedup = parse_bool(key, v);
        else if (key == "render.size")
            cfg.render_size = parse_number<int>(key, v);
        else if (key == "render.enabled")
            cfg.render = parse_bool(key, v);
        else if (key == "annotate.enabled")
            cfg.annotate_rows = parse_bool(key, v);
        else if (key == "annotate.url")
            cfg.annotate.url = std::string(v);
        else if (key == "annotate.model")
            cfg.annotate.model = std::string(v);
        else if (key == "annotate.prompt")
            cfg.annotate.prompt = std::string(v);
        else if (key == "annotate.timeout_ms")
            cfg.annotate.timeout_ms = parse_number<int>(key, v);
        else if (key == "annotate.retries")
            cfg.annotate.retries = parse_number<int>(key, v);
        else if (key == "annotate.max_concurrent")
            cfg.annotate.max_concurrent = parse_number<int>(key, v);
        else if (key == "annotate.backoff_ms")
            cfg.annotate.backoff_ms = parse_number<int>(key, v);
        else if (key == "dataset.augment")
        {
            const auto a = augment_from_name(v);
            if (!a)
                throw FormatError("dataset.augment must be none, cut, order or cut_and_order");
            cfg.augment = *a;
        }
        else if (key == "dataset.split_ratio")
            cfg.split_ratio = parse_number<double>(key, v);
        else if (key == "dataset.min_cells")
            cfg.min_cells = parse_number<std::size_t>(key, v);
        else if (key == "dataset.max_cells")
            cfg.max_cells = parse_number<std::size_t>(key, v);
        else if (key == "dataset.seed")
            cfg.seed = parse_number<std::uint64_t>(key, v);
        else
            throw FormatError("unknown config key '" + key + "'");
    }
}

void apply_config_file(const std::filesystem::path& path, PipelineConfig& cfg)
{
    apply_config_text(read_text_file(path), cfg);
}

std::string_view reject_name(RejectReason r) noexcept
{
    switch (r)
    {
        case RejectReason::TooManyCells: return "TooManyCells";
        case RejectReason::TooFewCells: return "TooFewCells";
        case RejectReason::UnsupportedSurface: return "UnsupportedSurface";
        case RejectReason::Disconnected: return "Disconnected";
    }
    return "";
}

FilterVerdict filter_part(const Part& part, std::size_t min_cells, std::size_t max_cells)
{
    const std::size_t n = part.cells.size();
    if (n > max_cells)
        return {RejectReason::TooManyCells, std::to_string(n) + " cells"};
    if (n < min_cells)
        return {RejectReason::TooFewCells, std::to_string(n) + " cells"};
    return {};
}

FilterVerdict filter_part_json(const Json& j, std::size_t min_cells, std::size_t max_cells)
{
    try
    {
        return filter_part(part_from_json(j), min_cells, max_cells);
    }
    catch (const UnsupportedSurface& e)
    {
        return {RejectReason::UnsupportedSurface, e.what()};
    }
}

Json dataset_row_to_json(const DatasetRow& row)
{
    return {{"part_id", row.part_id},
            {"order", row.order},
            {"cut", row.cut},
            {"input_script", row.input_script},
            {"output_script", row.output_script},
            {"reused", row.reused},
            {"annotation", row.annotation ? Json(*row.annotation) : Json(nullptr)}};
}

DatasetRow dataset_row_from_json(const Json& j)
{
    try
    {
        DatasetRow row;
        row.part_id = j.at("part_id").get<std::string>();
        row.order = j.at("order").get<std::vector<std::string>>();
        row.cut = j.at("cut").get<std::size_t>();
        row.input_script = j.at("input_script").get<std::string>();
        row.output_script = j.at("output_script").get<std::string>();
        row.reused = j.at("reused").get<std::vector<std::string>>();
        if (j.contains("annotation") && !j.at("annotation").is_null())
            row.annotation = j.at("annotation").get<std::string>();
        return row;
    }
    catch (const Json::exception& e)
    {
        throw FormatError(std::string("malformed dataset row: ") + e.what());
    }
}

std::string rows_to_jsonl(std::span<const DatasetRow> rows)
{
    std::string out;
    for (const auto& r : rows)
        out += dataset_row_to_json(r).dump() + "\n";
    return out;
}

std::vector<DatasetRow> build_dataset(std::span<const Part> parts, const PipelineConfig& cfg)
{
    std::vector<std::vector<DatasetRow>> per_part(parts.size());
    parallel_for(parts.size(), cfg.jobs, [&](std::size_t i) {
        try
        {
            per_part[i] = rows_for_part(parts[i], cfg);
        }
        catch (const Error& e)
        {
            throw Error("part '" + parts[i].id + "': " + e.what());
        }
    });

    // Within a part rows are already in (order, cut) order.
    std::vector<std::size_t> idx(parts.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return parts[a].id < parts[b].id; });
    std::vector<DatasetRow> rows;
    for (std::size_t i : idx)
        for (auto& r : per_part[i])
            rows.push_back(std::move(r));
    return rows;
}

DatasetSplit split_dataset(std::span<const DatasetRow> rows, double ratio, std::uint64_t seed)
{
    if (rows.empty())
        throw EmptyInput("no rows to split");
    if (!(ratio > 0 && ratio < 1))
        throw std::invalid_argument("split ratio must lie in (0, 1)");

    std::set<std::string> unique;
    for (const auto& r : rows)
        unique.insert(r.part_id);
    std::vector<std::string> ids(unique.begin(), unique.end());

    SplitMix64 rng(seed);
    for (std::size_t i = ids.size(); i > 1; --i)
        std::swap(ids[i - 1], ids[rng.below(i)]);
    const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(ids.size())));
    const std::set<std::string> train_ids(ids.begin(),
                                          ids.begin() + static_cast<std::ptrdiff_t>(n_train));

    DatasetSplit split;
    for (const auto& r : rows)
        (train_ids.count(r.part_id) ? split.train : split.test).push_back(r);
    return split;
}

std::size_t CellHistogram::total() const noexcept
{
    std::size_t t = 0;
    for (auto c : counts)
        t += c;
    return t;
}

std::string CellHistogram::csv() const
{
    std::string out = "cells,parts\n";
    for (std::size_t i = 0; i < counts.size(); ++i)
        out += (i + 1 < counts.size() ? std::to_string(i + 1) : std::string("10+")) + "," +
               std::to_string(counts[i]) + "\n";
    return out;
}

std::string CellHistogram::chart(std::size_t width) const
{
    const std::size_t peak = *std::max_element(counts.begin(), counts.end());
    std::string out;
    for (std::size_t i = 0; i < counts.size(); ++i)
    {
        std::string label = i + 1 < counts.size() ? std::to_string(i + 1) : "10+";
        label.insert(0, 3 - label.size(), ' ');
        const std::size_t bar = peak ? (counts[i] * width + peak / 2) / peak : 0;
        out += label + " | " + std::string(bar, '#') + (bar ? " " : "") +
               std::to_string(counts[i]) + "\n";
    }
    return out;
}

CellHistogram cell_histogram(std::span<const Part> parts)
{
    CellHistogram h;
    for (const auto& p : parts)
    {
        const std::size_t n = p.cells.size();
        if (n == 0)
            continue;
        ++h.counts[std::min<std::size_t>(n, 10) - 1];
    }
    return h;
}

} // namespace cellforge
