#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rstknn/core.hpp"
#include "rstknn/oracle.hpp"

namespace rstknn {

// Dataset files are JSON lines, one object per line:
//   {"id":"o0","x":12,"y":34,"terms":{"t1":3,"t5":7}}
// Blank lines are skipped. Integral numbers are written without a fraction,
// so a generated file survives parse -> serialize byte for byte.

std::vector<STObject> parse_dataset(std::istream& in);
/// Throws ParseError (with line number) or std::runtime_error naming the path.
std::vector<STObject> load_dataset(const std::filesystem::path& path);

std::string serialize_object(const STObject& o);
void write_dataset(std::ostream& out, const std::vector<STObject>& objects);
void save_dataset(const std::filesystem::path& path, const std::vector<STObject>& objects);

/// Query JSON: {"x": number, "y": number, "terms": {...}}.
QueryObject parse_query(std::string_view json_text);
QueryObject load_query(const std::filesystem::path& path);
std::string serialize_query(const QueryObject& q);

/// "t1=2,t2=5" -> TermVector. Empty string gives an empty vector.
TermVector parse_qterms(std::string_view spec);

// A fixture directory holds dataset.jsonl, query.json and params.json:
//   {"k":2,"alpha":0.4,"fanout":2,"layout":"...","mode":"faulty2011","seed":1,"trial":7}
// "layout", "mode", "seed" and "trial" are optional.
struct FixtureMeta {
  std::string mode;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

Instance load_fixture(const std::filesystem::path& dir, FixtureMeta* meta = nullptr);
void save_fixture(const std::filesystem::path& dir, const Instance& inst, const FixtureMeta& meta);

}  // namespace rstknn
