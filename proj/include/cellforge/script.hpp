#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cellforge/geom.hpp"
#include "cellforge/sequence.hpp"

namespace cellforge
{
/*!
 * Parsed script.
 *
 * Line grammar (LF-terminated, blank lines ignored):
 * \code
 *   # surfaces to reuse: s2, s5           (optional, first line only)
 *   s1 = XPlane(x0=0.000000)
 *   s7 = ZCylinder(x0=0.500000, y0=0.500000, r=0.200000)
 *   c1 = Cell(region = +s1 & -s2 & -s7)
 * \endcode
 */
struct ScriptAst
{
    //! Present iff the script starts with a reuse header (possibly empty).
    std::optional<std::vector<std::string>> reuse_header;
    std::vector<Surface> surfaces;
    std::vector<Cell> cells;

    const Surface* find_surface(std::string_view id) const noexcept;
    //! Referenced surface ids that are not defined in this script.
    std::vector<std::string> external_references() const;
};

struct CompareVerdict
{
    bool exact = false;
    bool structural = false;
    bool same_cell_count = false;
};

inline constexpr int kDefaultDecimals = 6;

/*!
 * Parse a script. `external` names surfaces defined elsewhere (the reuse
 * header of the matching input) that regions may reference.
 *
 * Throws SyntaxError for grammar violations and SemanticError for undefined
 * or duplicate ids, wrong parameter names, non-positive radii and repeated
 * same-sign terms.
 */
ScriptAst parse(std::string_view text, std::span<const std::string> external = {});

//! Text form; parameters use `decimals` fixed digits.
std::string serialize(const ScriptAst& ast, int decimals = kDefaultDecimals);

//! Fixed-point decimal rendering without locale or negative zero.
std::string format_fixed(double value, int decimals);
std::int64_t quantize(double value, int decimals);

//! (input_text, output_text) for one split. Throws InconsistentExample.
std::pair<std::string, std::string> emit(const SplitExample& example, const Part& part);
//! Same, as syntax trees.
std::pair<ScriptAst, ScriptAst> emit_ast(const SplitExample& example, const Part& part);

/*!
 * Canonical form: geometrically equal surfaces merged, surfaces renumbered by
 * (kind, quantized params), region terms sorted by (kind, sign, params) and
 * cells sorted by (signature, params). Surfaces referenced but not defined keep
 * their names.
 */
ScriptAst canonicalize(const ScriptAst& ast, int decimals = kDefaultDecimals);

//! Sorted (kind, sign) pairs of a cell; external surfaces use kind 255.
using CellSignature = std::vector<std::pair<int, Sign>>;
std::vector<CellSignature> cell_signatures(const ScriptAst& ast);

CompareVerdict compare(const ScriptAst& generated, const ScriptAst& truth,
                       int decimals = kDefaultDecimals);

/*!
 * Copy of `output` with the definitions of every external reference pulled
 * in from `input`.
 */
ScriptAst with_external_definitions(const ScriptAst& output, const ScriptAst& input);

//! Whole part as a header-less script (ids unchanged).
ScriptAst part_to_ast(const Part& part);

} // namespace cellforge
