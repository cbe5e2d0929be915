#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cellforge/geom.hpp"

namespace cellforge
{
using Json = nlohmann::ordered_json;

// Part interchange format:
//   {"id": str,
//    "surfaces": [{"id": "s1", "kind": "XPlane", "params": {"x0": 0.0}}, ...],
//    "cells": [{"id": "c1", "region": [["+", "s1"], ["-", "s2"], ...]}, ...]}
Json part_to_json(const Part& part);

//! Throws UnsupportedSurface for an unknown kind, FormatError for any other
//! schema violation.
Part part_from_json(const Json& j);

Part load_part(const std::filesystem::path& path);
void save_part(const Part& part, const std::filesystem::path& path);

//! Read a whole text file; throws FormatError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
//! Write bytes exactly (binary mode, no newline translation).
void write_text_file(const std::filesystem::path& path, const std::string& text);

//! One JSON document per nonblank line.
std::vector<Json> read_jsonl(const std::filesystem::path& path);

} // namespace cellforge
