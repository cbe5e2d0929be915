#include "cellforge/part_json.hpp"

#include <fstream>
#include <sstream>

#include "cellforge/error.hpp"

namespace cellforge
{
namespace
{
const Json& require(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        throw FormatError(std::string("missing key '") + key + "'");
    return j.at(key);
}

Sign sign_from(const Json& j)
{
    const auto s = j.get<std::string>();
    if (s == "+")
        return Sign::Plus;
    if (s == "-")
        return Sign::Minus;
    throw FormatError("region sign must be \"+\" or \"-\", got \"" + s + "\"");
}

} // namespace

Json part_to_json(const Part& part)
{
    Json surfaces = Json::array();
    for (const auto& s : part.surfaces)
    {
        Json params = Json::object();
        const auto names = param_names(s.kind);
        for (std::size_t i = 0; i < names.size(); ++i)
            params[std::string(names[i])] = s.params[i];
        surfaces.push_back(
            {{"id", s.id}, {"kind", std::string(kind_name(s.kind))}, {"params", params}});
    }
    Json cells = Json::array();
    for (const auto& c : part.cells)
    {
        Json region = Json::array();
        for (const auto& t : c.region)
            region.push_back({std::string(1, sign_char(t.sign)), t.surface});
        cells.push_back({{"id", c.id}, {"region", region}});
    }
    return {{"id", part.id}, {"surfaces", surfaces}, {"cells", cells}};
}

Part part_from_json(const Json& j)
{
    try
    {
        Part part;
        part.id = require(j, "id").get<std::string>();
        for (const auto& js : require(j, "surfaces"))
        {
            Surface s;
            s.id = require(js, "id").get<std::string>();
            const auto kname = require(js, "kind").get<std::string>();
            const auto kind = kind_from_name(kname);
            if (!kind)
                throw UnsupportedSurface("surface '" + s.id + "' has unsupported kind '" +
                                         kname + "'");
            s.kind = *kind;
            const Json& params = require(js, "params");
            const auto names = param_names(s.kind);
            if (params.size() != names.size())
                throw FormatError("surface '" + s.id + "' has wrong parameter count");
            for (std::size_t i = 0; i < names.size(); ++i)
                s.params[i] = require(params, std::string(names[i]).c_str()).get<double>();
            part.surfaces.push_back(std::move(s));
        }
        for (const auto& jc : require(j, "cells"))
        {
            Cell c;
            c.id = require(jc, "id").get<std::string>();
            for (const auto& term : require(jc, "region"))
            {
                if (!term.is_array() || term.size() != 2)
                    throw FormatError("region term must be [sign, surface]");
                c.region.push_back({term[1].get<std::string>(), sign_from(term[0])});
            }
            part.cells.push_back(std::move(c));
        }
        return part;
    }
    catch (const Json::exception& e)
    {
        throw FormatError(std::string("malformed part JSON: ") + e.what());
    }
}

Part load_part(const std::filesystem::path& path)
{
    try
    {
        return part_from_json(Json::parse(read_text_file(path)));
    }
    catch (const Json::parse_error& e)
    {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_part(const Part& part, const std::filesystem::path& path)
{
    write_text_file(path, part_to_json(part).dump(2) + "\n");
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw FormatError("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::vector<Json> read_jsonl(const std::filesystem::path& path)
{
    std::vector<Json> rows;
    std::istringstream in(read_text_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try
        {
            rows.push_back(Json::parse(line));
        }
        catch (const Json::parse_error& e)
        {
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

} // namespace cellforge
