#include <doctest.h>

#include "cellforge/error.hpp"
#include "cellforge/script.hpp"
#include "cellforge/sequence.hpp"
#include "fixtures.hpp"

using namespace cellforge;

namespace
{
const char* kBox = "s1 = XPlane(x0=0.000000)\n"
                   "s2 = XPlane(x0=1.000000)\n"
                   "s3 = YPlane(y0=0.000000)\n"
                   "s4 = YPlane(y0=1.000000)\n"
                   "s5 = ZPlane(z0=0.000000)\n"
                   "s6 = ZPlane(z0=1.000000)\n"
                   "c1 = Cell(region = +s1 & -s2 & +s3 & -s4 & +s5 & -s6)\n";

int count_lines_starting(const std::string& text, const std::string& prefix)
{
    int n = 0;
    std::size_t pos = 0;
    while (pos < text.size())
    {
        auto end = text.find('\n', pos);
        if (end == std::string::npos)
            end = text.size();
        if (text.compare(pos, prefix.size(), prefix) == 0)
            ++n;
        pos = end + 1;
    }
    return n;
}

} // namespace

TEST_CASE("minimal legal script parses")
{
    const ScriptAst ast = parse("s1 = XPlane(x0=0.0)\nc1 = Cell(region = +s1)");
    CHECK_FALSE(ast.reuse_header);
    REQUIRE(ast.surfaces.size() == 1);
    CHECK(ast.surfaces[0].kind == SurfaceKind::PlaneX);
    REQUIRE(ast.cells.size() == 1);
    CHECK(ast.cells[0].region == std::vector<Term>{{"s1", Sign::Plus}});
}

TEST_CASE("every surface kind parses")
{
    const ScriptAst ast = parse("s1 = XCylinder(y0=1, z0=2, r=0.5)\n"
                                "s2 = YCylinder(x0=-1, z0=2.25, r=3)\n"
                                "s3 = ZCylinder(x0=0, y0=0, r=1e-1)\n"
                                "s4 = YPlane(y0=-0.5)\n"
                                "s5 = ZPlane(z0=7)\n"
                                "c1 = Cell(region = -s1 & +s2 & -s3 & +s4 & -s5)\n");
    CHECK(ast.surfaces[0].params == std::array<double, 3>{1, 2, 0.5});
    CHECK(ast.surfaces[1].kind == SurfaceKind::CylY);
    CHECK(ast.surfaces[2].radius() == doctest::Approx(0.1));
}

TEST_CASE("undefined reference is a semantic error")
{
    CHECK_THROWS_AS(parse("c1 = Cell(region = +s9)"), SemanticError);
    const std::vector<std::string> external{"s9"};
    CHECK_NOTHROW(parse("c1 = Cell(region = +s9)", external));
}

TEST_CASE("syntax errors carry a position")
{
    try
    {
        parse("s1 = XPlane(x0=)");
        FAIL("expected SyntaxError");
    }
    catch (const SyntaxError& e)
    {
        CHECK(e.line() == 1);
        CHECK(e.column() == 16);
    }
    CHECK_THROWS_AS(parse("s1 = Sphere(r=1)"), SyntaxError);
    CHECK_THROWS_AS(parse("s1 = XPlane(x0=1"), SyntaxError);
    CHECK_THROWS_AS(parse("s1 XPlane(x0=1)"), SyntaxError);
    CHECK_THROWS_AS(parse("s1 = XPlane(x0=1)\nc1 = Cell(region = s1)"), SyntaxError);
    CHECK_THROWS_AS(parse("s1 = XPlane(x0=1)\nc1 = Cell(region = +s1 &)"), SyntaxError);
    CHECK_THROWS_AS(parse("s1 = XPlane(x0=1) junk"), SyntaxError);
}

TEST_CASE("semantic errors")
{
    CHECK_THROWS_AS(parse("s1 = XPlane(y0=1)"), SemanticError);
    CHECK_THROWS_AS(parse("s1 = ZCylinder(x0=0, y0=0, r=0)"), SemanticError);
    CHECK_THROWS_AS(parse("s1 = ZCylinder(x0=0, y0=0, r=-2)"), SemanticError);
    CHECK_THROWS_AS(parse("s1 = XPlane(x0=1)\ns1 = XPlane(x0=2)"), SemanticError);
    CHECK_THROWS_AS(parse("s1 = XPlane(x0=1)\nc1 = Cell(region = +s1 & +s1)"), SemanticError);
    CHECK_THROWS_AS(parse("# surfaces to reuse: s1, s1\nc1 = Cell(region = +s1)"), SemanticError);
    CHECK_THROWS_AS(parse("# surfaces to reuse: s4\ns1 = XPlane(x0=1)\nc1 = Cell(region = +s1)"),
                    SemanticError);
}

TEST_CASE("reuse header")
{
    const ScriptAst ast = parse(std::string("# surfaces to reuse: s2, s5\n") + kBox);
    REQUIRE(ast.reuse_header);
    CHECK(*ast.reuse_header == std::vector<std::string>{"s2", "s5"});
    const ScriptAst empty = parse(std::string("# surfaces to reuse:\n") + kBox);
    REQUIRE(empty.reuse_header);
    CHECK(empty.reuse_header->empty());
    CHECK(serialize(empty).rfind("# surfaces to reuse:\n", 0) == 0);
}

TEST_CASE("serialize parse round trip")
{
    const ScriptAst ast = parse(kBox);
    CHECK(serialize(ast) == kBox);
    CHECK(serialize(parse(serialize(ast))) == kBox);
}

TEST_CASE("format_fixed")
{
    CHECK(format_fixed(0.1, 6) == "0.100000");
    CHECK(format_fixed(-0.0000001, 6) == "0.000000");
    CHECK(format_fixed(-2.5, 6) == "-2.500000");
    CHECK(format_fixed(1234.5678905, 3) == "1234.568");
    CHECK(format_fixed(3, 0) == "3");
}

TEST_CASE("emit of a two-box part at k = 1")
{
    const Part p = fixtures::pair_part();
    const SplitExample ex = split_at({p.id, {"c1", "c2"}}, p, 1);
    const auto [input, output] = emit(ex, p);
    CHECK(input.rfind("# surfaces to reuse: s2\n", 0) == 0);
    CHECK(count_lines_starting(input, "s") == 6);
    CHECK(input.find("c1 = Cell(") != std::string::npos);

    CHECK(count_lines_starting(output, "s") == 5);
    CHECK(output.find("c2 = Cell(region = +s2 & ") != std::string::npos);

    const ScriptAst in_ast = parse(input);
    const ScriptAst out_ast = parse(output, *in_ast.reuse_header);
    CHECK(out_ast.external_references() == std::vector<std::string>{"s2"});
}

TEST_CASE("emit without reused surfaces has an empty header")
{
    // c2 repeats the shared plane under its own id.
    Part p = fixtures::pair_part();
    p.surfaces.push_back(Surface::plane("s12", Axis::X, 1));
    p.cells[1].region[0].surface = "s12";
    const SplitExample ex = split_at({p.id, {"c1", "c2"}}, p, 1);
    CHECK(ex.reused_surfaces.empty());
    const auto [input, output] = emit(ex, p);
    CHECK(input.rfind("# surfaces to reuse:\n", 0) == 0);
}

TEST_CASE("emit, parse, emit is byte-identical")
{
    const Part p = fixtures::row_part(4);
    for (const auto& ex : split_all(first_order(build_graph(p, {}), p.id), p))
    {
        const auto [input, output] = emit(ex, p);
        const ScriptAst in_ast = parse(input);
        const ScriptAst out_ast = parse(output, *in_ast.reuse_header);
        CHECK(serialize(in_ast) == input);
        CHECK(serialize(out_ast) == output);
    }
}

TEST_CASE("canonicalize")
{
    const std::string defs = "s1 = XPlane(x0=0)\ns2 = XPlane(x0=1)\n";
    CHECK(serialize(canonicalize(parse(defs + "c1 = Cell(region = +s1 & -s2)"))) ==
          serialize(canonicalize(parse(defs + "c1 = Cell(region = -s2 & +s1)"))));

    CHECK(serialize(canonicalize(parse("s1 = XPlane(x0=0.1000000001)\nc1 = Cell(region = +s1)"))) ==
          serialize(canonicalize(parse("s1 = XPlane(x0=0.1)\nc1 = Cell(region = +s1)"))));

    const std::string renumbered = "s6 = ZPlane(z0=1)\ns5 = ZPlane(z0=0)\ns4 = YPlane(y0=1)\n"
                                   "s3 = YPlane(y0=0)\ns2 = XPlane(x0=1)\ns1 = XPlane(x0=0)\n"
                                   "c7 = Cell(region = -s6 & +s3 & -s4 & +s5 & -s2 & +s1)\n";
    CHECK(serialize(canonicalize(parse(renumbered))) == serialize(canonicalize(parse(kBox))));

    // Geometrically equal surfaces merge.
    const std::string twins = "s1 = XPlane(x0=0)\ns2 = XPlane(x0=0)\ns3 = XPlane(x0=1)\n"
                              "c1 = Cell(region = +s1 & -s3)\nc2 = Cell(region = +s2 & -s3)\n";
    CHECK(canonicalize(parse(twins)).surfaces.size() == 2);
}

TEST_CASE("compare")
{
    const ScriptAst box = parse(kBox);
    const CompareVerdict self = compare(box, box);
    CHECK(self.exact);
    CHECK(self.structural);
    CHECK(self.same_cell_count);

    const ScriptAst big = parse("s1 = XPlane(x0=0)\ns2 = XPlane(x0=2)\ns3 = YPlane(y0=0)\n"
                                "s4 = YPlane(y0=2)\ns5 = ZPlane(z0=0)\ns6 = ZPlane(z0=2)\n"
                                "c1 = Cell(region = +s1 & -s2 & +s3 & -s4 & +s5 & -s6)\n");
    const CompareVerdict scaled = compare(big, box);
    CHECK_FALSE(scaled.exact);
    CHECK(scaled.structural);
    CHECK(scaled.same_cell_count);

    const ScriptAst slab = parse("s1 = ZCylinder(x0=0, y0=0, r=1)\ns2 = ZPlane(z0=0)\n"
                                 "s3 = ZPlane(z0=1)\nc1 = Cell(region = -s1 & +s2 & -s3)\n");
    const CompareVerdict other = compare(slab, box);
    CHECK_FALSE(other.exact);
    CHECK_FALSE(other.structural);
    CHECK(other.same_cell_count);
}

TEST_CASE("structural comparison counts distinct surfaces")
{
    // Same cell signatures; the second pair shares its middle plane.
    const ScriptAst apart = parse("s1 = XPlane(x0=0)\ns2 = XPlane(x0=1)\ns3 = XPlane(x0=2)\n"
                                  "s4 = XPlane(x0=3)\nc1 = Cell(region = +s1 & -s2)\n"
                                  "c2 = Cell(region = +s3 & -s4)\n");
    const ScriptAst joined = parse("s1 = XPlane(x0=0)\ns2 = XPlane(x0=1)\ns3 = XPlane(x0=2)\n"
                                   "c1 = Cell(region = +s1 & -s2)\nc2 = Cell(region = +s2 & -s3)\n");
    CHECK(cell_signatures(apart) == cell_signatures(joined));
    CHECK_FALSE(compare(apart, joined).structural);
}

TEST_CASE("external definitions are pulled in from the input")
{
    const ScriptAst input = parse(std::string("# surfaces to reuse: s2\n") + kBox);
    const std::vector<std::string> ext{"s2"};
    const ScriptAst output = parse("s7 = XPlane(x0=2)\nc2 = Cell(region = +s2 & -s7)\n", ext);
    const ScriptAst full = with_external_definitions(output, input);
    REQUIRE(full.find_surface("s2"));
    CHECK(full.find_surface("s2")->offset() == 1.0);
    CHECK(full.external_references().empty());
}

TEST_CASE("part_to_ast keeps ids")
{
    const Part p = fixtures::row_part(2);
    const ScriptAst ast = part_to_ast(p);
    CHECK(ast.surfaces.size() == p.surfaces.size());
    CHECK(ast.cells[1].id == "c2");
    CHECK_NOTHROW(parse(serialize(ast)));
}
