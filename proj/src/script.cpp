#include "cellforge/script.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "cellforge/error.hpp"

namespace cellforge
{
namespace
{
//---------------------------------------------------------------------------//
// Parsing
//---------------------------------------------------------------------------//
bool is_ident_start(char c) noexcept
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

bool is_ident_char(char c) noexcept { return is_ident_start(c) || is_digit(c); }

//! "s12" / "c3": prefix letter followed by at least one digit.
bool is_numbered_id(std::string_view id, char prefix) noexcept
{
    return id.size() >= 2 && id[0] == prefix &&
           std::all_of(id.begin() + 1, id.end(), is_digit);
}

class LineCursor
{
  public:
    LineCursor(std::string_view line, std::size_t lineno) : line_(line), lineno_(lineno) {}

    std::size_t column() const noexcept { return pos_ + 1; }
    std::size_t lineno() const noexcept { return lineno_; }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw SyntaxError(what, lineno_, column());
    }
    [[noreturn]] void fail_at(const std::string& what, std::size_t col) const
    {
        throw SyntaxError(what, lineno_, col);
    }

    void skip_ws() noexcept
    {
        while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t' || line_[pos_] == '\r'))
            ++pos_;
    }

    bool at_end()
    {
        skip_ws();
        return pos_ >= line_.size();
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < line_.size() && line_[pos_] == c)
        {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c))
            fail(std::string("expected '") + c + "'");
    }

    char peek()
    {
        skip_ws();
        return pos_ < line_.size() ? line_[pos_] : '\0';
    }

    std::string_view ident()
    {
        skip_ws();
        if (pos_ >= line_.size() || !is_ident_start(line_[pos_]))
            fail("expected identifier");
        const std::size_t start = pos_;
        while (pos_ < line_.size() && is_ident_char(line_[pos_]))
            ++pos_;
        return line_.substr(start, pos_ - start);
    }

    void keyword(std::string_view kw)
    {
        const std::size_t col = (skip_ws(), column());
        if (ident() != kw)
            fail_at("expected '" + std::string(kw) + "'", col);
    }

    double number()
    {
        skip_ws();
        const std::size_t start = pos_;
        bool negative = false;
        if (pos_ < line_.size() && (line_[pos_] == '+' || line_[pos_] == '-'))
            negative = line_[pos_++] == '-';
        const std::size_t body = pos_;
        std::size_t digits = 0;
        while (pos_ < line_.size() && is_digit(line_[pos_]))
            ++pos_, ++digits;
        if (pos_ < line_.size() && line_[pos_] == '.')
        {
            ++pos_;
            while (pos_ < line_.size() && is_digit(line_[pos_]))
                ++pos_, ++digits;
        }
        if (digits == 0)
        {
            pos_ = start;
            fail("expected number");
        }
        if (pos_ < line_.size() && (line_[pos_] == 'e' || line_[pos_] == 'E'))
        {
            std::size_t p = pos_ + 1;
            if (p < line_.size() && (line_[p] == '+' || line_[p] == '-'))
                ++p;
            if (p >= line_.size() || !is_digit(line_[p]))
            {
                pos_ = p;
                fail("malformed exponent");
            }
            while (p < line_.size() && is_digit(line_[p]))
                ++p;
            pos_ = p;
        }
        double value = 0;
        const auto res = std::from_chars(line_.data() + body, line_.data() + pos_, value);
        if (res.ec != std::errc() || !std::isfinite(value))
        {
            pos_ = start;
            fail("number out of range");
        }
        return negative ? -value : value;
    }

  private:
    std::string_view line_;
    std::size_t lineno_;
    std::size_t pos_ = 0;
};

class ScriptParser
{
  public:
    explicit ScriptParser(std::span<const std::string> external)
        : external_(external.begin(), external.end())
    {
    }

    ScriptAst run(std::string_view text)
    {
        std::size_t lineno = 0;
        bool first_statement = true;
        std::size_t start = 0;
        while (start <= text.size())
        {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos)
                end = text.size();
            const std::string_view line = text.substr(start, end - start);
            ++lineno;
            LineCursor cur(line, lineno);
            if (!cur.at_end())
            {
                statement(cur, first_statement);
                first_statement = false;
            }
            start = end + 1;
        }
        check_header();
        return std::move(ast_);
    }

  private:
    [[noreturn]] void semantic(const std::string& what, const LineCursor& cur, std::size_t col) const
    {
        throw SemanticError(what, cur.lineno(), col);
    }

    bool known_surface(const std::string& id) const
    {
        return defined_surfaces_.count(id) || external_.count(id);
    }

    void statement(LineCursor& cur, bool first)
    {
        if (cur.peek() == '#')
        {
            if (!first)
                cur.fail("the reuse header must be the first line");
            header(cur);
            return;
        }
        const std::size_t col = cur.column();
        const std::string id(cur.ident());
        if (is_numbered_id(id, 's'))
            surface(cur, id, col);
        else if (is_numbered_id(id, 'c'))
            cell(cur, id, col);
        else
            cur.fail_at("expected a surface (s<k>) or cell (c<k>) definition", col);
        if (!cur.at_end())
            cur.fail("unexpected trailing input");
    }

    void header(LineCursor& cur)
    {
        cur.expect('#');
        cur.keyword("surfaces");
        cur.keyword("to");
        cur.keyword("reuse");
        cur.expect(':');
        std::vector<std::string> ids;
        if (!cur.at_end())
        {
            do
            {
                const std::size_t col = (cur.skip_ws(), cur.column());
                std::string id(cur.ident());
                if (!is_numbered_id(id, 's'))
                    cur.fail_at("reuse header lists surface ids (s<k>)", col);
                if (std::find(ids.begin(), ids.end(), id) != ids.end())
                    semantic("surface '" + id + "' listed twice in reuse header", cur, col);
                header_cols_.push_back(col);
                ids.push_back(std::move(id));
            } while (cur.accept(','));
            if (!cur.at_end())
                cur.fail("unexpected trailing input");
        }
        header_line_ = cur.lineno();
        ast_.reuse_header = std::move(ids);
    }

    void check_header() const
    {
        if (!ast_.reuse_header)
            return;
        const auto& ids = *ast_.reuse_header;
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (!known_surface(ids[i]))
                throw SemanticError("reuse header names undefined surface '" + ids[i] + "'",
                                    header_line_, header_cols_[i]);
    }

    void surface(LineCursor& cur, const std::string& id, std::size_t id_col)
    {
        cur.expect('=');
        const std::size_t kind_col = (cur.skip_ws(), cur.column());
        const auto kname = cur.ident();
        const auto kind = kind_from_name(kname);
        if (!kind)
            cur.fail_at("unknown surface kind '" + std::string(kname) + "'", kind_col);
        cur.expect('(');

        const auto names = param_names(*kind);
        Surface s;
        s.id = id;
        s.kind = *kind;
        std::vector<bool> seen(names.size(), false);
        if (!cur.accept(')'))
        {
            do
            {
                const std::size_t name_col = (cur.skip_ws(), cur.column());
                const auto name = cur.ident();
                cur.expect('=');
                const std::size_t value_col = (cur.skip_ws(), cur.column());
                const double value = cur.number();
                auto it = std::find(names.begin(), names.end(), name);
                if (it == names.end())
                    semantic(std::string(kind_name(*kind)) + " has no parameter '" +
                                 std::string(name) + "'",
                             cur, name_col);
                const auto k = static_cast<std::size_t>(it - names.begin());
                if (seen[k])
                    semantic("parameter '" + std::string(name) + "' given twice", cur, name_col);
                if (name == "r" && !(value > 0))
                    semantic("cylinder radius must be positive", cur, value_col);
                seen[k] = true;
                s.params[k] = value;
            } while (cur.accept(','));
            cur.expect(')');
        }
        for (std::size_t k = 0; k < names.size(); ++k)
            if (!seen[k])
                semantic("missing parameter '" + std::string(names[k]) + "'", cur, kind_col);

        if (known_surface(id) || defined_cells_.count(id))
            semantic("surface '" + id + "' is already defined", cur, id_col);
        defined_surfaces_.insert(id);
        ast_.surfaces.push_back(std::move(s));
    }

    void cell(LineCursor& cur, const std::string& id, std::size_t id_col)
    {
        cur.expect('=');
        cur.keyword("Cell");
        cur.expect('(');
        cur.keyword("region");
        cur.expect('=');

        Cell c;
        c.id = id;
        do
        {
            const std::size_t term_col = (cur.skip_ws(), cur.column());
            Sign sign;
            if (cur.accept('+'))
                sign = Sign::Plus;
            else if (cur.accept('-'))
                sign = Sign::Minus;
            else
                cur.fail("expected '+' or '-' before a surface id");
            const std::size_t ref_col = (cur.skip_ws(), cur.column());
            std::string ref(cur.ident());
            if (!is_numbered_id(ref, 's'))
                cur.fail_at("region terms reference surfaces (s<k>)", ref_col);
            if (!known_surface(ref))
                semantic("surface '" + ref + "' is not defined", cur, ref_col);
            Term t{std::move(ref), sign};
            if (std::find(c.region.begin(), c.region.end(), t) != c.region.end())
                semantic("term repeated in region", cur, term_col);
            c.region.push_back(std::move(t));
        } while (cur.accept('&'));
        cur.expect(')');

        if (defined_cells_.count(id))
            semantic("cell '" + id + "' is already defined", cur, id_col);
        defined_cells_.insert(id);
        ast_.cells.push_back(std::move(c));
    }

    std::set<std::string> external_;
    std::set<std::string> defined_surfaces_;
    std::set<std::string> defined_cells_;
    std::vector<std::size_t> header_cols_;
    std::size_t header_line_ = 0;
    ScriptAst ast_;
};

//---------------------------------------------------------------------------//
// Canonical keys
//---------------------------------------------------------------------------//
constexpr int kExternalKind = 255;

struct SurfaceKey
{
    int kind = 0;
    std::array<std::int64_t, 3> q{};
    std::string external; // name, for undefined references

    auto tie() const { return std::tie(kind, q, external); }
    bool operator<(const SurfaceKey& o) const { return tie() < o.tie(); }
    bool operator==(const SurfaceKey& o) const { return tie() == o.tie(); }
};

double pow10(int decimals)
{
    double p = 1.0;
    for (int i = 0; i < decimals; ++i)
        p *= 10.0;
    return p;
}

std::string join(const std::vector<std::string>& ids, const char* sep)
{
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i)
    {
        if (i)
            out += sep;
        out += ids[i];
    }
    return out;
}

} // namespace

//---------------------------------------------------------------------------//
const Surface* ScriptAst::find_surface(std::string_view id) const noexcept
{
    for (const auto& s : surfaces)
        if (s.id == id)
            return &s;
    return nullptr;
}

std::vector<std::string> ScriptAst::external_references() const
{
    std::set<std::string> ext;
    for (const auto& c : cells)
        for (const auto& t : c.region)
            if (!find_surface(t.surface))
                ext.insert(t.surface);
    return {ext.begin(), ext.end()};
}

ScriptAst parse(std::string_view text, std::span<const std::string> external)
{
    return ScriptParser(external).run(text);
}

std::int64_t quantize(double value, int decimals)
{
    return std::llround(value * pow10(decimals));
}

std::string format_fixed(double value, int decimals)
{
    const std::int64_t q = quantize(value, decimals);
    const std::uint64_t mag = q < 0 ? static_cast<std::uint64_t>(-(q + 1)) + 1
                                    : static_cast<std::uint64_t>(q);
    std::uint64_t scale = 1;
    for (int i = 0; i < decimals; ++i)
        scale *= 10;
    std::string out = (q < 0 ? "-" : "") + std::to_string(mag / scale);
    if (decimals > 0)
    {
        std::string frac = std::to_string(mag % scale);
        frac.insert(0, static_cast<std::size_t>(decimals) - frac.size(), '0');
        out += "." + frac;
    }
    return out;
}

std::string serialize(const ScriptAst& ast, int decimals)
{
    std::string out;
    if (ast.reuse_header)
    {
        out += "# surfaces to reuse:";
        if (!ast.reuse_header->empty())
            out += " " + join(*ast.reuse_header, ", ");
        out += "\n";
    }
    for (const auto& s : ast.surfaces)
    {
        out += s.id + " = " + std::string(kind_name(s.kind)) + "(";
        const auto names = param_names(s.kind);
        for (std::size_t i = 0; i < names.size(); ++i)
        {
            if (i)
                out += ", ";
            out += std::string(names[i]) + "=" + format_fixed(s.params[i], decimals);
        }
        out += ")\n";
    }
    for (const auto& c : ast.cells)
    {
        out += c.id + " = Cell(region = ";
        for (std::size_t i = 0; i < c.region.size(); ++i)
        {
            if (i)
                out += " & ";
            out += sign_char(c.region[i].sign);
            out += c.region[i].surface;
        }
        out += ")\n";
    }
    return out;
}

std::pair<ScriptAst, ScriptAst> emit_ast(const SplitExample& example, const Part& part)
{
    std::map<std::string, std::string> rename;
    std::vector<Surface> in_surfaces, out_surfaces;

    auto number_cells = [&](const std::vector<std::string>& cell_ids, std::size_t first_cell,
                            std::vector<Surface>& defs) {
        std::vector<Cell> cells;
        for (std::size_t i = 0; i < cell_ids.size(); ++i)
        {
            const Cell* src = part.find_cell(cell_ids[i]);
            if (!src)
                throw InconsistentExample("unknown cell '" + cell_ids[i] + "'");
            Cell c;
            c.id = "c" + std::to_string(first_cell + i);
            for (const auto& t : src->region)
            {
                auto it = rename.find(t.surface);
                if (it == rename.end())
                {
                    const Surface* s = part.find_surface(t.surface);
                    if (!s)
                        throw InconsistentExample("unknown surface '" + t.surface + "'");
                    Surface def = *s;
                    def.id = "s" + std::to_string(rename.size() + 1);
                    it = rename.emplace(t.surface, def.id).first;
                    defs.push_back(std::move(def));
                }
                c.region.push_back({it->second, t.sign});
            }
            cells.push_back(std::move(c));
        }
        return cells;
    };

    ScriptAst input, output;
    input.cells = number_cells(example.input_cells, 1, in_surfaces);
    input.surfaces = std::move(in_surfaces);

    std::vector<std::pair<std::size_t, std::string>> header;
    for (const auto& sid : example.reused_surfaces)
    {
        auto it = rename.find(sid);
        if (it == rename.end())
            throw InconsistentExample("reused surface '" + sid + "' is not used by the input");
        header.emplace_back(std::stoul(it->second.substr(1)), it->second);
    }
    std::sort(header.begin(), header.end());
    input.reuse_header.emplace();
    for (auto& h : header)
        input.reuse_header->push_back(std::move(h.second));

    output.cells = number_cells(example.output_cells, example.input_cells.size() + 1, out_surfaces);
    output.surfaces = std::move(out_surfaces);

    // Output may only reach back into the input through the header.
    const std::set<std::string> declared(input.reuse_header->begin(), input.reuse_header->end());
    for (const auto& c : output.cells)
        for (const auto& t : c.region)
            if (!output.find_surface(t.surface) && !declared.count(t.surface))
                throw InconsistentExample("output references input surface " + t.surface +
                                          " missing from the reuse list");
    return {std::move(input), std::move(output)};
}

std::pair<std::string, std::string> emit(const SplitExample& example, const Part& part)
{
    auto [in, out] = emit_ast(example, part);
    return {serialize(in), serialize(out)};
}

ScriptAst canonicalize(const ScriptAst& ast, int decimals)
{
    std::map<std::string, SurfaceKey> key_of;
    for (const auto& s : ast.surfaces)
    {
        SurfaceKey k;
        k.kind = static_cast<int>(s.kind);
        for (std::size_t i = 0; i < s.num_params(); ++i)
            k.q[i] = quantize(s.params[i], decimals);
        key_of.emplace(s.id, k);
    }
    auto lookup = [&](const std::string& id) {
        auto it = key_of.find(id);
        if (it != key_of.end())
            return it->second;
        SurfaceKey k;
        k.kind = kExternalKind;
        k.external = id;
        return k;
    };

    std::set<SurfaceKey> keys;
    std::set<std::string> external_names;
    for (const auto& [id, k] : key_of)
        keys.insert(k);
    for (const auto& c : ast.cells)
        for (const auto& t : c.region)
        {
            const SurfaceKey k = lookup(t.surface);
            keys.insert(k);
            if (k.kind == kExternalKind)
                external_names.insert(k.external);
        }
    if (ast.reuse_header)
        for (const auto& id : *ast.reuse_header)
        {
            const SurfaceKey k = lookup(id);
            keys.insert(k);
            if (k.kind == kExternalKind)
                external_names.insert(k.external);
        }

    ScriptAst out;
    std::map<SurfaceKey, std::string> name_of;
    std::size_t next = 1;
    const double scale = pow10(decimals);
    for (const auto& k : keys)
    {
        if (k.kind == kExternalKind)
        {
            name_of[k] = k.external;
            continue;
        }
        std::string name;
        do
            name = "s" + std::to_string(next++);
        while (external_names.count(name));
        name_of[k] = name;

        Surface s;
        s.id = name;
        s.kind = static_cast<SurfaceKind>(k.kind);
        for (std::size_t i = 0; i < s.num_params(); ++i)
            s.params[i] = static_cast<double>(k.q[i]) / scale;
        out.surfaces.push_back(std::move(s));
    }

    if (ast.reuse_header)
    {
        std::set<SurfaceKey> hk;
        for (const auto& id : *ast.reuse_header)
            hk.insert(lookup(id));
        out.reuse_header.emplace();
        for (const auto& k : hk)
            out.reuse_header->push_back(name_of[k]);
    }

    using TermKey = std::tuple<int, Sign, std::array<std::int64_t, 3>, std::string>;
    std::vector<std::vector<TermKey>> cells;
    for (const auto& c : ast.cells)
    {
        std::set<TermKey> terms;
        for (const auto& t : c.region)
        {
            const SurfaceKey k = lookup(t.surface);
            terms.emplace(k.kind, t.sign, k.q, k.external);
        }
        cells.emplace_back(terms.begin(), terms.end());
    }
    auto cell_order = [](const std::vector<TermKey>& a, const std::vector<TermKey>& b) {
        auto sig = [](const std::vector<TermKey>& v) {
            std::vector<std::pair<int, Sign>> s;
            for (const auto& t : v)
                s.emplace_back(std::get<0>(t), std::get<1>(t));
            return s;
        };
        const auto sa = sig(a), sb = sig(b);
        if (sa != sb)
            return sa < sb;
        return a < b;
    };
    std::sort(cells.begin(), cells.end(), cell_order);

    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        Cell c;
        c.id = "c" + std::to_string(i + 1);
        for (const auto& [kind, sign, q, ext] : cells[i])
            c.region.push_back({name_of[SurfaceKey{kind, q, ext}], sign});
        out.cells.push_back(std::move(c));
    }
    return out;
}

std::vector<CellSignature> cell_signatures(const ScriptAst& ast)
{
    std::vector<CellSignature> sigs;
    for (const auto& c : ast.cells)
    {
        CellSignature sig;
        for (const auto& t : c.region)
        {
            const Surface* s = ast.find_surface(t.surface);
            sig.emplace_back(s ? static_cast<int>(s->kind) : kExternalKind, t.sign);
        }
        std::sort(sig.begin(), sig.end());
        sigs.push_back(std::move(sig));
    }
    return sigs;
}

CompareVerdict compare(const ScriptAst& generated, const ScriptAst& truth, int decimals)
{
    const ScriptAst g = canonicalize(generated, decimals);
    const ScriptAst t = canonicalize(truth, decimals);

    CompareVerdict v;
    v.same_cell_count = generated.cells.size() == truth.cells.size();

    auto gs = cell_signatures(g), ts = cell_signatures(t);
    std::sort(gs.begin(), gs.end());
    std::sort(ts.begin(), ts.end());
    const auto surface_count = [](const ScriptAst& a) {
        return a.surfaces.size() + a.external_references().size();
    };
    v.structural = gs == ts && surface_count(g) == surface_count(t);
    v.exact = serialize(g, decimals) == serialize(t, decimals);
    return v;
}

ScriptAst with_external_definitions(const ScriptAst& output, const ScriptAst& input)
{
    // External ids are by definition not defined in `output`, so no renaming
    // is needed.
    ScriptAst out = output;
    std::vector<Surface> pulled;
    for (const auto& id : output.external_references())
        if (const Surface* def = input.find_surface(id))
            pulled.push_back(*def);
    out.surfaces.insert(out.surfaces.begin(), pulled.begin(), pulled.end());
    return out;
}

ScriptAst part_to_ast(const Part& part)
{
    ScriptAst ast;
    ast.surfaces = part.surfaces;
    ast.cells = part.cells;
    return ast;
}

} // namespace cellforge
