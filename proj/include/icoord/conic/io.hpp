#pragma once

#include <string>

#include "icoord/conic/program.hpp"

namespace icoord::conic {

/// JSON program format, the escape hatch for external solvers:
/// {"n", "cost", "rows", "b", "A": [[row, col, value], ...],
///  "cones": [{"tag": "free|nonneg|soc|rsoc", "dim": d}, ...],
///  "var_names": [...], "block_tags": [...]}   (the last two optional)
/// Doubles round-trip bit-exactly through the serializer.
std::string export_json(const ConicProgram& prog);

ConicProgram import_json(const std::string& text);

void write_program(const ConicProgram& prog, const std::string& path);
ConicProgram read_program(const std::string& path);

}  // namespace icoord::conic
