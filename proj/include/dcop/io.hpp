#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "dcop/model.hpp"

namespace dcop {

// Line-oriented instance format, version 1:
//
//   dcop 1
//   name <string>
//   agent <id>
//   var <id> <owner-agent> <low> <high>
//   con <id> table <0|neginf> <var> <var> ...
//     <utility> <v1> <v2> ...
//   con <id> rule <c>*<var> [+|-] <c>*<var> ... <op> <bound> [util <s>]
//
// '#' starts a comment, blank lines are ignored, table rows are the indented
// lines that follow their header. Parsing produces a finalized instance;
// SyntaxError carries a 1-based line and column.
DcopInstance parse_instance(std::istream& in);
DcopInstance parse_instance_string(std::string_view text);
DcopInstance load_instance(const std::filesystem::path& path);

// Canonical form: entities sorted by name, table rows sorted by tuple.
// parse(serialize(x)) is structurally equal to x for every valid instance.
std::string serialize_instance(const DcopInstance& inst);
void save_instance(const DcopInstance& inst, const std::filesystem::path& path);

}  // namespace dcop
