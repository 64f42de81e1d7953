#pragma once

#include <span>
#include <string>
#include <vector>

#include "rstknn/engine.hpp"

namespace rstknn {

/// Aligned plain-text table with columns Steps | Actions | U | COL | ROL | PEL.
/// Empty lists print as "-".
std::string format_trace_table(std::span<const TraceEvent> trace);

/// One JSON object per line:
/// {"step":1,"action":"...","decision":"undecided","U":[..],"COL":[..],"ROL":[..],"PEL":[..]}
std::string format_trace_jsonl(std::span<const TraceEvent> trace);

/// Result ids joined by single spaces, followed by a newline.
std::string format_result(const std::vector<std::string>& ids);

}  // namespace rstknn
