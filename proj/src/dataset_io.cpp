#include "rstknn/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "rstknn/errors.hpp"

namespace rstknn {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json number(double v) {
  if (std::nearbyint(v) == v && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  return v;
}

double require_number(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number())
    throw ParseError(std::string("missing or non-numeric \"") + key + "\"", line);
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ParseError(std::string("non-finite \"") + key + "\"", line);
  return v;
}

TermVector parse_terms(const json& j, std::size_t line) {
  TermVector v;
  auto it = j.find("terms");
  if (it == j.end()) return v;
  if (!it->is_object()) throw ParseError("\"terms\" must be an object", line);
  for (const auto& [term, weight] : it->items()) {
    if (!weight.is_number()) throw ParseError("weight of \"" + term + "\" is not a number", line);
    const double w = weight.get<double>();
    if (!std::isfinite(w) || w < 0.0)
      throw ParseError("weight of \"" + term + "\" must be finite and nonnegative", line);
    v.set(term, w);
  }
  return v;
}

ordered_json terms_json(const TermVector& v) {
  ordered_json t = ordered_json::object();
  for (const auto& [term, w] : v.terms()) t[term] = number(w);
  return t;
}

json parse_json(std::string_view text, std::size_t line) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::vector<STObject> parse_dataset(std::istream& in) {
  std::vector<STObject> out;
  std::unordered_set<std::string> ids;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = parse_json(text, line);
    if (!j.is_object()) throw ParseError("expected a JSON object", line);
    auto id = j.find("id");
    if (id == j.end() || !id->is_string()) throw ParseError("missing string \"id\"", line);
    STObject o;
    o.id = id->get<std::string>();
    if (!ids.insert(o.id).second) throw ParseError("duplicate id \"" + o.id + "\"", line);
    o.loc = {require_number(j, "x", line), require_number(j, "y", line)};
    o.vct = parse_terms(j, line);
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<STObject> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  try {
    return parse_dataset(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::string serialize_object(const STObject& o) {
  ordered_json j;
  j["id"] = o.id;
  j["x"] = number(o.loc.x);
  j["y"] = number(o.loc.y);
  j["terms"] = terms_json(o.vct);
  return j.dump();
}

void write_dataset(std::ostream& out, const std::vector<STObject>& objects) {
  for (const auto& o : objects) out << serialize_object(o) << '\n';
}

void save_dataset(const std::filesystem::path& path, const std::vector<STObject>& objects) {
  std::ostringstream s;
  write_dataset(s, objects);
  write_file(path, s.str());
}

QueryObject parse_query(std::string_view json_text) {
  const json j = parse_json(json_text, 0);
  if (!j.is_object()) throw ParseError("query must be a JSON object");
  return {{require_number(j, "x", 0), require_number(j, "y", 0)}, parse_terms(j, 0)};
}

QueryObject load_query(const std::filesystem::path& path) {
  try {
    return parse_query(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string serialize_query(const QueryObject& q) {
  ordered_json j;
  j["x"] = number(q.loc.x);
  j["y"] = number(q.loc.y);
  j["terms"] = terms_json(q.vct);
  return j.dump();
}

TermVector parse_qterms(std::string_view spec) {
  TermVector v;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t end = spec.find(',', pos);
    if (end == std::string_view::npos) end = spec.size();
    const std::string_view item = spec.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw ParseError("query term \"" + std::string(item) + "\" is not term=weight");
    const std::string weight(item.substr(eq + 1));
    std::size_t used = 0;
    double w = 0.0;
    try {
      w = std::stod(weight, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != weight.size() || weight.empty() || !std::isfinite(w) || w < 0.0)
      throw ParseError("bad weight in query term \"" + std::string(item) + "\"");
    v.set(std::string(item.substr(0, eq)), w);
  }
  return v;
}

Instance load_fixture(const std::filesystem::path& dir, FixtureMeta* meta) {
  Instance inst;
  inst.objects = load_dataset(dir / "dataset.jsonl");
  inst.query = load_query(dir / "query.json");
  const json p = parse_json(read_file(dir / "params.json"), 0);
  try {
    inst.params.k = p.at("k").get<int>();
    inst.params.alpha = p.at("alpha").get<double>();
    inst.fanout = p.value("fanout", IurTree::kDefaultFanout);
    inst.layout = p.value("layout", std::string());
    if (meta) {
      meta->mode = p.value("mode", std::string());
      meta->seed = p.value("seed", std::uint64_t{0});
      meta->trial = p.value("trial", std::uint64_t{0});
    }
  } catch (const json::exception& e) {
    throw ParseError((dir / "params.json").string() + ": " + e.what());
  }
  return inst;
}

void save_fixture(const std::filesystem::path& dir, const Instance& inst, const FixtureMeta& meta) {
  std::filesystem::create_directories(dir);
  save_dataset(dir / "dataset.jsonl", inst.objects);
  write_file(dir / "query.json", serialize_query(inst.query) + "\n");
  ordered_json p;
  p["k"] = inst.params.k;
  p["alpha"] = inst.params.alpha;
  p["fanout"] = inst.fanout;
  if (!inst.layout.empty()) p["layout"] = inst.layout;
  if (!meta.mode.empty()) p["mode"] = meta.mode;
  p["seed"] = meta.seed;
  p["trial"] = meta.trial;
  write_file(dir / "params.json", p.dump(2) + "\n");
}

}  // namespace rstknn
