#include <doctest.h>

#include <filesystem>
#include <set>

#include "cellforge/error.hpp"
#include "cellforge/pipeline.hpp"
#include "cellforge/script.hpp"
#include "fixtures.hpp"

using namespace cellforge;
namespace fs = std::filesystem;

namespace
{
PipelineConfig with_augment(Augment a, std::size_t cap = 24)
{
    PipelineConfig cfg;
    cfg.augment = a;
    cfg.cap = cap;
    return cfg;
}

std::vector<Part> many_parts(int k)
{
    std::vector<Part> parts;
    for (int i = 0; i < k; ++i)
        parts.push_back(fixtures::row_part(2 + i % 3, "p" + std::to_string(100 + i)));
    return parts;
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("cellforge_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("filter_part")
{
    std::vector<std::array<double, 6>> eleven;
    for (int i = 0; i < 11; ++i)
        eleven.push_back({double(i), double(i + 1), 0, 1, 0, 1});
    CHECK(filter_part(fixtures::box_part(eleven)).reject == RejectReason::TooManyCells);
    CHECK(filter_part(fixtures::row_part(1)).reject == RejectReason::TooFewCells);
    CHECK(filter_part(fixtures::row_part(5)).accepted());
    CHECK(filter_part(fixtures::row_part(10)).accepted());

    Json j = part_to_json(fixtures::row_part(3));
    j["surfaces"][0]["kind"] = "Cone";
    CHECK(filter_part_json(j).reject == RejectReason::UnsupportedSurface);
}

TEST_CASE("row counts per augmentation")
{
    const std::vector<Part> four{fixtures::row_part(4, "path4")};
    CHECK(build_dataset(four, with_augment(Augment::None)).size() == 1);
    CHECK(build_dataset(four, with_augment(Augment::Cut)).size() == 3);
    CHECK(build_dataset(four, with_augment(Augment::Order, kUnlimited)).size() == 8);
    CHECK(build_dataset(four, with_augment(Augment::CutAndOrder, kUnlimited)).size() == 24);
    CHECK(build_dataset(four, with_augment(Augment::Order, 5)).size() == 5);

    const auto parts = many_parts(7);
    CHECK(build_dataset(parts, with_augment(Augment::None)).size() == 7);
    std::size_t cuts = 0;
    for (const auto& p : parts)
        cuts += p.cells.size() - 1;
    CHECK(build_dataset(parts, with_augment(Augment::Cut)).size() == cuts);
}

TEST_CASE("rows are sorted and parse")
{
    auto parts = many_parts(5);
    std::reverse(parts.begin(), parts.end());
    PipelineConfig cfg = with_augment(Augment::CutAndOrder);
    const auto rows = build_dataset(parts, cfg);
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
        const auto& a = rows[i - 1];
        const auto& b = rows[i];
        CHECK(std::tie(a.part_id, a.order, a.cut) < std::tie(b.part_id, b.order, b.cut));
    }
    for (const auto& r : rows)
    {
        const ScriptAst in = parse(r.input_script);
        REQUIRE(in.reuse_header);
        const ScriptAst out = parse(r.output_script, *in.reuse_header);
        CHECK_NOTHROW(canonicalize(out));
        CHECK(in.reuse_header->size() == r.reused.size());
        CHECK_FALSE(r.annotation);
    }
    cfg.jobs = 4;
    CHECK(rows_to_jsonl(build_dataset(parts, cfg)) == rows_to_jsonl(rows));
}

TEST_CASE("dataset row JSON")
{
    const auto rows = build_dataset(many_parts(1), with_augment(Augment::None));
    const Json j = dataset_row_to_json(rows[0]);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items())
        keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"part_id", "order", "cut", "input_script", "output_script",
                                           "reused", "annotation"});
    CHECK(j["annotation"].is_null());
    CHECK(dataset_row_to_json(dataset_row_from_json(j)) == j);
}

TEST_CASE("split by part")
{
    const auto rows = build_dataset(many_parts(100), with_augment(Augment::Cut));
    const DatasetSplit s = split_dataset(rows, 0.9, 42);
    std::set<std::string> train, test;
    for (const auto& r : s.train)
        train.insert(r.part_id);
    for (const auto& r : s.test)
        test.insert(r.part_id);
    CHECK(train.size() == 90);
    CHECK(test.size() == 10);
    for (const auto& id : test)
        CHECK_FALSE(train.count(id));
    CHECK(s.train.size() + s.test.size() == rows.size());

    const DatasetSplit again = split_dataset(rows, 0.9, 42);
    CHECK(rows_to_jsonl(again.train) == rows_to_jsonl(s.train));
    CHECK(rows_to_jsonl(split_dataset(rows, 0.9, 43).test) != rows_to_jsonl(s.test));

    const auto two = build_dataset(many_parts(2), with_augment(Augment::None));
    const DatasetSplit half = split_dataset(two, 0.5, 1);
    CHECK(half.train.size() == 1);
    CHECK(half.test.size() == 1);

    CHECK_THROWS_AS(split_dataset({}, 0.9, 1), EmptyInput);
}

TEST_CASE("cell histogram")
{
    const std::vector<Part> parts{fixtures::row_part(2, "a"), fixtures::row_part(2, "b"),
                                  fixtures::row_part(5, "c"), fixtures::row_part(12, "d")};
    const CellHistogram h = cell_histogram(parts);
    CHECK(h.counts[1] == 2);
    CHECK(h.counts[4] == 1);
    CHECK(h.counts[9] == 1);
    CHECK(h.total() == parts.size());
    CHECK(h.csv().rfind("cells,parts\n1,0\n2,2\n", 0) == 0);
    CHECK(h.csv().find("10+,1\n") != std::string::npos);
    CHECK(h.chart().find("  2 | ") != std::string::npos);

    const CellHistogram empty = cell_histogram({});
    CHECK(empty.total() == 0);
}

TEST_CASE("config text")
{
    PipelineConfig cfg;
    apply_config_text("# comment\n"
                      "geom.face_eps = 1e-5\n"
                      "sequence.cap = inf\n"
                      "dataset.augment = cut_and_order\n"
                      "dataset.split_ratio = 0.8\n"
                      "decompose.merge = false\n"
                      "annotate.url = http://localhost:9/x\n"
                      "annotate.retries = 5\n",
                      cfg);
    CHECK(cfg.kernel.face_eps == 1e-5);
    CHECK(cfg.cap == kUnlimited);
    CHECK(cfg.augment == Augment::CutAndOrder);
    CHECK(cfg.split_ratio == 0.8);
    CHECK_FALSE(cfg.decompose.merge);
    CHECK(cfg.annotate.url == "http://localhost:9/x");
    CHECK(cfg.annotate.retries == 5);
    CHECK(cfg.annotate.prompt == std::string(kDefaultPrompt));

    CHECK_THROWS_AS(apply_config_text("nope.key = 1\n", cfg), FormatError);
    CHECK_THROWS_AS(apply_config_text("dataset.min_cells = two\n", cfg), FormatError);
    CHECK_THROWS_AS(apply_config_text("dataset.augment = shuffle\n", cfg), FormatError);
    CHECK_THROWS_AS(apply_config_text("justtext\n", cfg), FormatError);

    PipelineConfig bad;
    bad.split_ratio = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = {};
    bad.min_cells = 5;
    bad.max_cells = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("full build writes every artifact")
{
    const fs::path in = scratch("build_in");
    const fs::path out = scratch("build_out");
    for (const auto& f : fixtures::csg_suite())
        write_text_file(in / (f.name + ".json"), csg_to_json(f.expr).dump());
    // A part source with an unsupported surface and a translated duplicate.
    Json cone = part_to_json(fixtures::row_part(3, "zz_cone"));
    cone["surfaces"][0]["kind"] = "Cone";
    write_text_file(in / "zz_cone.json", cone.dump());
    const Part moved = fixtures::box_part({{10, 12, 0, 1, 0, 1}, {10, 11, 0, 1, 1, 2}}, "zz_l_copy");
    write_text_file(in / "zz_l_copy.json", part_to_json(moved).dump());

    PipelineConfig cfg;
    cfg.render = true;
    cfg.render_size = 16;
    const BuildSummary s = run_build(in, out, cfg);
    CHECK(s.sources == fixtures::csg_suite().size() + 2);
    CHECK(s.duplicates >= 1);
    CHECK(s.rows == s.parts);
    CHECK(s.train_rows + s.test_rows == s.rows);
    for (const char* name : {"parts.jsonl", "rejected.csv", "duplicates.csv", "dataset.jsonl",
                             "train.jsonl", "test.jsonl", "stats.csv", "stats.txt"})
        CHECK(fs::exists(out / name));
    CHECK(read_text_file(out / "rejected.csv").find("zz_cone,UnsupportedSurface") != std::string::npos);
    CHECK(read_text_file(out / "duplicates.csv").find("zz_l_copy,l_shape") != std::string::npos);
    CHECK(fs::exists(out / "renders" / "l_shape_view1.pgm"));
}

TEST_CASE("example_cells resolves reused surfaces from the input")
{
    const auto rows = build_dataset(std::vector<Part>{fixtures::row_part(3)}, with_augment(Augment::None));
    const ScriptAst in = parse(rows[0].input_script);
    const ScriptAst out = parse(rows[0].output_script, *in.reuse_header);
    const auto cells = example_cells(in, out);
    CHECK(cells.size() == 3);
    CHECK(all_connected(cells, {}));
}
