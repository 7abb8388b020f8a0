#pragma once

// Text and JSON formats used by the command-line tool. Label indices are
// 1-based on this boundary.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rpolar/blockdiag.hpp"
#include "rpolar/oracle.hpp"
#include "rpolar/relaxed_polar.hpp"

namespace rpolar {

using Json = nlohmann::json;

inline constexpr std::string_view schema_tag = "rpolar/1";

/// "4,2,1,0.5" → {4, 2, 1, 0.5}. Throws Parse on malformed or non-finite
/// entries.
std::vector<double> parse_diag_list(std::string_view text);

/// Rows separated by newlines, entries by whitespace and/or commas. Blank
/// lines and lines starting with '#' are skipped. The result must be square.
Mat parse_matrix(std::string_view text);
Mat read_matrix_file(const std::string& path);

/// Accepts either the compact form "{1}+,{2,5}-,{3}-,{4}-" (an optional
/// "@-" after a pair's sign selects the negative angle) or the JSON form.
PartitionLabel parse_label(std::string_view text);

std::string format_label(const PartitionLabel& label);

Json to_json(const PartitionLabel& label);
PartitionLabel label_from_json(const Json& j);

/// Row-major nested arrays.
Json to_json(const Mat& m);

Json to_json(const MinimizerSet& set);
Json to_json(const CriticalPoint& cp);
Json to_json(const BlockDecomposition& bd);
Json to_json(const SchemeTrace& trace);

}  // namespace rpolar
