#include "icoord/conic/io.hpp"

#include <fstream>

#include "json.hpp"

namespace icoord::conic {

namespace {

using nlohmann::json;

const char* tag_name(ConeTag t) {
  switch (t) {
    case ConeTag::Free: return "free";
    case ConeTag::NonNeg: return "nonneg";
    case ConeTag::Soc: return "soc";
    case ConeTag::Rsoc: return "rsoc";
  }
  return "unknown";
}

ConeTag tag_from(const std::string& s) {
  if (s == "free") return ConeTag::Free;
  if (s == "nonneg") return ConeTag::NonNeg;
  if (s == "soc") return ConeTag::Soc;
  if (s == "rsoc") return ConeTag::Rsoc;
  throw std::invalid_argument("conic import: unknown cone tag '" + s + "'");
}

}  // namespace

std::string export_json(const ConicProgram& prog) {
  prog.validate();
  json j;
  j["n"] = prog.n;
  j["cost"] = prog.cost;
  j["rows"] = prog.rows;
  j["b"] = prog.rhs;
  json a = json::array();
  for (const Triplet& t : prog.entries) a.push_back({t.row, t.col, t.value});
  j["A"] = std::move(a);
  json cones = json::array();
  for (const ConeBlock& blk : prog.cones)
    cones.push_back({{"tag", tag_name(blk.tag)}, {"dim", blk.dim}});
  j["cones"] = std::move(cones);
  if (!prog.var_names.empty()) j["var_names"] = prog.var_names;
  if (!prog.block_tags.empty()) j["block_tags"] = prog.block_tags;
  return j.dump();
}

ConicProgram import_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("conic import: malformed JSON: ") + e.what());
  }
  ConicProgram prog;
  prog.n = j.at("n").get<int>();
  prog.cost = j.at("cost").get<std::vector<double>>();
  prog.rows = j.at("rows").get<int>();
  prog.rhs = j.at("b").get<std::vector<double>>();
  for (const json& t : j.at("A"))
    prog.entries.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<double>()});
  for (const json& c : j.at("cones"))
    prog.cones.push_back({tag_from(c.at("tag").get<std::string>()), c.at("dim").get<int>()});
  if (j.contains("var_names")) prog.var_names = j["var_names"].get<std::vector<std::string>>();
  if (j.contains("block_tags"))
    prog.block_tags = j["block_tags"].get<std::vector<std::string>>();
  prog.validate();
  return prog;
}

void write_program(const ConicProgram& prog, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << export_json(prog);
}

ConicProgram read_program(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return import_json(text);
}

}  // namespace icoord::conic
