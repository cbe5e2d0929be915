#include <cstdlib>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "cellforge/csg.hpp"
#include "cellforge/decompose.hpp"
#include "cellforge/dedup.hpp"
#include "cellforge/error.hpp"
#include "cellforge/metrics.hpp"
#include "cellforge/parallel.hpp"
#include "cellforge/pipeline.hpp"
#include "cellforge/random.hpp"
#include "cellforge/script.hpp"
#include "cellforge/sequence.hpp"

namespace fs = std::filesystem;
using namespace cellforge;

namespace
{
enum Exit
{
    kOk = 0,
    kUsage = 1,
    kData = 2,
    kTransport = 3
};

struct Globals
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
    bool quiet = false;
};

PipelineConfig load_config(const Globals& g)
{
    PipelineConfig cfg;
    if (!g.config.empty())
    {
        try
        {
            apply_config_file(g.config, cfg);
        }
        catch (const cellforge::Error& e)
        {
            throw std::invalid_argument(g.config + ": " + e.what());
        }
    }
    if (g.seed)
        cfg.set_seed(*g.seed);
    cfg.jobs = g.jobs;
    cfg.validate();
    return cfg;
}

void say(const Globals& g, const std::string& msg)
{
    if (!g.quiet)
        std::cerr << msg << "\n";
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size())
    {
        auto end = s.find(',', start);
        if (end == std::string::npos)
            end = s.size();
        if (end > start)
            out.push_back(s.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

std::size_t parse_cap(const std::string& s)
{
    if (s == "inf")
        return kUnlimited;
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size() || v == 0)
        throw std::invalid_argument("--cap must be a positive integer or 'inf'");
    return static_cast<std::size_t>(v);
}

// Script text of one validate line: "text" or a dataset-row field.
std::string script_field(const Json& j, const char* row_key)
{
    if (j.is_string())
        return j.get<std::string>();
    if (j.contains("text"))
        return j.at("text").get<std::string>();
    if (j.contains(row_key))
        return j.at(row_key).get<std::string>();
    if (j.contains("completion"))
        return j.at("completion").get<std::string>();
    throw FormatError(std::string("line has neither \"text\" nor \"") + row_key + "\"");
}

std::string line_id(const Json& j, std::size_t index)
{
    for (const char* key : {"id", "example_id", "part_id"})
        if (j.is_object() && j.contains(key) && j.at(key).is_string())
            return j.at(key).get<std::string>() + (std::string(key) == "part_id"
                                                        ? "#" + std::to_string(index)
                                                        : std::string());
    return std::to_string(index);
}

int run_decompose(const Globals& g, const std::string& in, const std::string& out, bool no_merge,
                  const std::string& id)
{
    PipelineConfig cfg = load_config(g);
    if (no_merge)
        cfg.decompose.merge = false;
    const Part part =
        decompose(load_csg(in), cfg.decompose, id.empty() ? fs::path(in).stem().string() : id);
    save_part(part, out);
    say(g, part.id + ": " + std::to_string(part.surfaces.size()) + " surfaces, " +
               std::to_string(part.cells.size()) + " cells");
    return kOk;
}

int run_dedup(const Globals& g, const std::string& in, const std::string& out,
              const std::string& report)
{
    load_config(g);
    const DedupResult r = dedup_parts(load_parts(in));
    write_text_file(out, parts_to_jsonl(r.kept));
    if (!report.empty())
    {
        std::string csv = "part_id,duplicate_of\n";
        for (const auto& [id, of] : r.dropped)
            csv += id + "," + of + "\n";
        write_text_file(report, csv);
    }
    say(g, "kept " + std::to_string(r.kept.size()) + ", dropped " + std::to_string(r.dropped.size()));
    return kOk;
}

int run_sequences(const Globals& g, const std::string& in, const std::string& cap,
                  const std::string& out)
{
    const PipelineConfig cfg = load_config(g);
    const Part part = load_part(in);
    const AdjacencyGraph graph = build_graph(part, cfg.kernel);
    const auto seqs = enumerate_orders(graph, cap.empty() ? cfg.cap : parse_cap(cap),
                                       hash_combine(cfg.seed, hash_string(part.id)), part.id);
    Json orders = Json::array();
    for (const auto& s : seqs)
        orders.push_back(s.order);
    Json edges = Json::array();
    for (const auto& [a, b] : graph.edges)
        edges.push_back({graph.nodes[a], graph.nodes[b]});
    const Json j = {{"part_id", part.id}, {"edges", edges}, {"orders", orders}};
    write_text_file(out, j.dump(2) + "\n");
    say(g, std::to_string(seqs.size()) + " orders");
    return kOk;
}

int run_emit(const Globals& g, const std::string& in, const std::string& order_list,
             std::optional<std::size_t> cut, bool all_cuts, const std::string& out)
{
    const PipelineConfig cfg = load_config(g);
    const Part part = load_part(in);
    BuildSequence seq;
    if (order_list.empty())
        seq = first_order(build_graph(part, cfg.kernel), part.id);
    else
    {
        seq = {part.id, split_list(order_list)};
        if (!is_connected_order(build_graph(part, cfg.kernel), seq.order))
            throw InconsistentExample("order is not a connected ordering of the part's cells");
    }
    const std::size_t n = seq.order.size();
    std::vector<SplitExample> examples;
    if (all_cuts)
        examples = split_all(seq, part);
    else
        examples.push_back(split_at(seq, part, cut.value_or(middle_cut(n))));

    std::vector<DatasetRow> rows;
    for (const auto& ex : examples)
    {
        auto [input, output] = emit(ex, part);
        rows.push_back({part.id, ex.order, ex.cut, std::move(input), std::move(output),
                        ex.reused_surfaces, std::nullopt});
    }
    write_text_file(out, rows_to_jsonl(rows));
    say(g, std::to_string(rows.size()) + " rows");
    return kOk;
}

int run_render(const Globals& g, const std::string& in, std::optional<int> size,
               const std::string& out_dir, bool topdown)
{
    const PipelineConfig cfg = load_config(g);
    const Part part = load_part(in);
    const auto cells = resolve_cells(part);
    const int px = size.value_or(cfg.render_size);
    for (const auto& v : render_views(cells, px, cfg.kernel, std::nullopt, cfg.jobs))
        write_text_file(fs::path(out_dir) / (part.id + "_view" + std::to_string(v.view_id) + ".pgm"),
                        encode_pgm(v));
    if (topdown)
        write_text_file(fs::path(out_dir) / (part.id + "_top.pgm"),
                        encode_pgm(render_top_down(cells, px, cfg.kernel)));
    return kOk;
}

int run_annotate(const Globals& g, const std::string& rows_path, const std::string& out)
{
    const PipelineConfig cfg = load_config(g);
    std::vector<DatasetRow> rows;
    for (const auto& j : read_jsonl(rows_path))
        rows.push_back(dataset_row_from_json(j));
    annotate_rows(rows, cfg);
    write_text_file(out, rows_to_jsonl(rows));
    say(g, "annotated " + std::to_string(rows.size()) + " rows");
    return kOk;
}

int run_build(const Globals& g, const std::string& in, const std::string& out_dir)
{
    const PipelineConfig cfg = load_config(g);
    const BuildSummary s = cellforge::run_build(in, out_dir, cfg);
    say(g, std::to_string(s.sources) + " sources, " + std::to_string(s.rejected) + " rejected, " +
               std::to_string(s.duplicates) + " duplicates, " + std::to_string(s.parts) +
               " parts, " + std::to_string(s.rows) + " rows (" + std::to_string(s.train_rows) +
               " train / " + std::to_string(s.test_rows) + " test)");
    return kOk;
}

int run_split(const Globals& g, const std::string& in, std::optional<double> ratio,
              const std::string& train, const std::string& test)
{
    const PipelineConfig cfg = load_config(g);
    std::vector<DatasetRow> rows;
    for (const auto& j : read_jsonl(in))
        rows.push_back(dataset_row_from_json(j));
    const DatasetSplit split = split_dataset(rows, ratio.value_or(cfg.split_ratio), cfg.seed);
    write_text_file(train, rows_to_jsonl(split.train));
    write_text_file(test, rows_to_jsonl(split.test));
    say(g, std::to_string(split.train.size()) + " train rows, " + std::to_string(split.test.size()) +
               " test rows");
    return kOk;
}

int run_validate(const Globals& g, const std::string& inputs, const std::string& generated,
                 const std::string& truth, const std::string& out, const std::string& matrices)
{
    const PipelineConfig cfg = load_config(g);
    const auto in_lines = read_jsonl(inputs);
    const auto gen_lines = read_jsonl(generated);
    const auto truth_lines = read_jsonl(truth);
    if (in_lines.size() != gen_lines.size() || in_lines.size() != truth_lines.size())
        throw BadInput("inputs, generated and truth files differ in line count");

    std::vector<MetricsRow> rows(in_lines.size());
    parallel_for(rows.size(), cfg.jobs, [&](std::size_t i) {
        const std::string id = line_id(in_lines[i], i);
        try
        {
            rows[i] = evaluate_example(script_field(in_lines[i], "input_script"),
                                       script_field(gen_lines[i], "output_script"),
                                       script_field(truth_lines[i], "output_script"), cfg.kernel,
                                       id, cfg.quantize_decimals);
        }
        catch (const Error& e)
        {
            throw Error("example '" + id + "': " + e.what());
        }
    });
    const MetricsReport report = aggregate(rows);
    Json j = report_to_json(report);
    Json per_row = Json::array();
    for (const auto& r : rows)
        per_row.push_back(row_to_json(r));
    j["examples"] = per_row;
    write_text_file(out, j.dump(2) + "\n");
    if (!matrices.empty())
    {
        write_text_file(fs::path(matrices) / "cell_count.csv", cell_count_csv(report));
        write_text_file(fs::path(matrices) / "structural_equality.csv", equality_csv(report));
    }
    if (!g.quiet)
        std::cout << j["means"].dump(2) << "\n";
    return kOk;
}

int run_stats(const Globals& g, const std::string& in, const std::string& out)
{
    load_config(g);
    const CellHistogram h = cell_histogram(load_parts(in));
    if (!out.empty())
        write_text_file(out, h.csv());
    if (!g.quiet)
        std::cout << h.chart();
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"cellforge: half-space cell datasets for geometry completion"};
    app.require_subcommand(1);
    Globals g;
    std::uint64_t seed = 0;
    app.add_option("--config", g.config, "key=value configuration file")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "seed for every randomized stage");
    app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--quiet", g.quiet, "no progress output");

    std::string in, out, out_dir, report, cap, order_list, rows_path, train, test, truth,
        generated, matrices, id;
    bool no_merge = false, all_cuts = false, topdown = false;
    std::optional<std::size_t> cut;
    std::optional<int> size;
    std::optional<double> ratio;
    std::function<int()> action;

    auto* dc = app.add_subcommand("decompose", "CSG expression JSON to part JSON");
    dc->add_option("--in", in)->required()->check(CLI::ExistingFile);
    dc->add_option("--out", out)->required();
    dc->add_option("--id", id, "part id (default: input file stem)");
    dc->add_flag("--no-merge", no_merge);
    dc->callback([&] { action = [&] { return run_decompose(g, in, out, no_merge, id); }; });

    auto* dd = app.add_subcommand("dedup", "drop parts equal up to scale, rotation and translation");
    dd->add_option("--in", in, "directory of part JSON files or parts .jsonl")->required();
    dd->add_option("--out", out)->required();
    dd->add_option("--report", report);
    dd->callback([&] { action = [&] { return run_dedup(g, in, out, report); }; });

    auto* sq = app.add_subcommand("sequences", "connected build orders of a part");
    sq->add_option("--in", in)->required()->check(CLI::ExistingFile);
    sq->add_option("--cap", cap, "maximum orders, or 'inf'");
    sq->add_option("--out", out)->required();
    sq->callback([&] { action = [&] { return run_sequences(g, in, cap, out); }; });

    auto* em = app.add_subcommand("emit", "completion examples of one part");
    em->add_option("--in", in)->required()->check(CLI::ExistingFile);
    em->add_option("--order", order_list, "comma separated cell ids");
    auto* cut_opt = em->add_option("--cut", cut, "input cell count");
    em->add_flag("--all-cuts", all_cuts)->excludes(cut_opt);
    em->add_option("--out", out)->required();
    em->callback([&] { action = [&] { return run_emit(g, in, order_list, cut, all_cuts, out); }; });

    auto* rd = app.add_subcommand("render", "four corner views of a part as PGM");
    rd->add_option("--in", in)->required()->check(CLI::ExistingFile);
    rd->add_option("--size", size)->check(CLI::PositiveNumber);
    rd->add_option("--out-dir", out_dir)->required();
    rd->add_flag("--topdown", topdown, "also write a straight-down view");
    rd->callback([&] { action = [&] { return run_render(g, in, size, out_dir, topdown); }; });

    auto* an = app.add_subcommand("annotate", "annotate dataset rows through the configured endpoint");
    an->add_option("--rows", rows_path)->required()->check(CLI::ExistingFile);
    an->add_option("--out", out)->required();
    an->callback([&] { action = [&] { return run_annotate(g, rows_path, out); }; });

    auto* bd = app.add_subcommand("build", "full pipeline from CSG or part sources");
    bd->add_option("--in", in, "directory of *.json sources or a .jsonl file")->required();
    bd->add_option("--out-dir", out_dir)->required();
    bd->callback([&] { action = [&] { return run_build(g, in, out_dir); }; });

    auto* sp = app.add_subcommand("split", "part-level train/test split of dataset rows");
    sp->add_option("--in", in)->required()->check(CLI::ExistingFile);
    sp->add_option("--ratio", ratio);
    sp->add_option("--train", train)->required();
    sp->add_option("--test", test)->required();
    sp->callback([&] { action = [&] { return run_split(g, in, ratio, train, test); }; });

    auto* va = app.add_subcommand("validate", "score generated completions");
    va->add_option("--inputs", in)->required()->check(CLI::ExistingFile);
    va->add_option("--generated", generated)->required()->check(CLI::ExistingFile);
    va->add_option("--truth", truth)->required()->check(CLI::ExistingFile);
    va->add_option("--out", out)->required();
    va->add_option("--matrices", matrices, "directory for the matrix CSVs");
    va->callback([&] {
        action = [&] { return run_validate(g, in, generated, truth, out, matrices); };
    });

    auto* st = app.add_subcommand("stats", "histogram of parts by cell count");
    st->add_option("--in", in)->required();
    st->add_option("--out", out, "CSV output");
    st->callback([&] { action = [&] { return run_stats(g, in, out); }; });

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    if (seed_opt->count())
        g.seed = seed;

    try
    {
        return action();
    }
    catch (const TransportError& e)
    {
        std::cerr << "transport error: " << e.what() << "\n";
        return kTransport;
    }
    catch (const ProtocolError& e)
    {
        std::cerr << "transport error: " << e.what() << "\n";
        return kTransport;
    }
    catch (const Error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
}
