#include "rstknn/trace.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include <json.hpp>

namespace rstknn {

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string cell(const std::vector<std::string>& items) {
  return items.empty() ? "-" : join(items, ", ");
}

}  // namespace

std::string format_trace_table(std::span<const TraceEvent> trace) {
  using Row = std::array<std::string, 6>;
  std::vector<Row> rows{{"Steps", "Actions", "U", "COL", "ROL", "PEL"}};
  for (const auto& ev : trace) {
    rows.push_back({std::to_string(ev.step), ev.action, cell(ev.u), cell(ev.col), cell(ev.rol),
                    cell(ev.pel)});
  }
  std::array<std::size_t, 6> width{};
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }

  std::ostringstream out;
  auto rule = [&] {
    out << '+';
    for (auto w : width) out << std::string(w + 2, '-') << '+';
    out << '\n';
  };
  rule();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << '|';
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      out << ' ' << rows[i][c] << std::string(width[c] - rows[i][c].size(), ' ') << " |";
    }
    out << '\n';
    if (i == 0) rule();
  }
  rule();
  return out.str();
}

std::string format_trace_jsonl(std::span<const TraceEvent> trace) {
  std::string out;
  for (const auto& ev : trace) {
    nlohmann::ordered_json j;
    j["step"] = ev.step;
    j["action"] = ev.action;
    j["decision"] = ev.decision;
    j["U"] = ev.u;
    j["COL"] = ev.col;
    j["ROL"] = ev.rol;
    j["PEL"] = ev.pel;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string format_result(const std::vector<std::string>& ids) { return join(ids, " ") + "\n"; }

}  // namespace rstknn
