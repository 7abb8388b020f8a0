#include "rpolar/serialize.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rpolar {

namespace {

[[noreturn]] void parse_error(const std::string& msg) { throw Error(ErrorCode::Parse, msg); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view tok) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (tok.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    parse_error("not a finite decimal: '" + std::string(tok) + "'");
  }
  return v;
}

int parse_index(std::string_view tok) {
  tok = trim(tok);
  int v = 0;
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (tok.empty() || ec != std::errc{} || ptr != end || v < 1) {
    parse_error("bad label index '" + std::string(tok) + "'");
  }
  return v - 1;
}

int parse_sign(char c) {
  if (c == '+') return 1;
  if (c == '-') return -1;
  parse_error(std::string("expected '+' or '-', got '") + c + "'");
}

PartitionLabel parse_compact_label(std::string_view s) {
  PartitionLabel label;
  std::size_t i = 0;
  auto skip_space = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  skip_space();
  while (i < s.size()) {
    if (s[i] != '{') parse_error("expected '{' at position " + std::to_string(i + 1));
    const auto close = s.find('}', i);
    if (close == std::string_view::npos) parse_error("unterminated '{'");
    const auto body = s.substr(i + 1, close - i - 1);
    SubsetLabel sub;
    if (const auto comma = body.find(','); comma == std::string_view::npos) {
      sub.first = parse_index(body);
    } else {
      sub.first = parse_index(body.substr(0, comma));
      sub.second = parse_index(body.substr(comma + 1));
    }
    i = close + 1;
    if (i >= s.size()) parse_error("missing determinant sign after '}'");
    sub.det_sign = parse_sign(s[i++]);
    if (i < s.size() && s[i] == '@') {
      if (++i >= s.size()) parse_error("missing angle sign after '@'");
      sub.angle_sign = parse_sign(s[i++]);
    }
    label.subsets.push_back(sub);
    skip_space();
    if (i < s.size()) {
      if (s[i] != ',') parse_error("expected ',' at position " + std::to_string(i + 1));
      ++i;
      skip_space();
      if (i >= s.size()) parse_error("trailing ',' in label");
    }
  }
  if (label.subsets.empty()) parse_error("empty label");
  return label;
}

}  // namespace

std::vector<double> parse_diag_list(std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) parse_error("empty diagonal list");
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto tok = text.substr(start, comma == std::string_view::npos ? text.size() - start
                                                                         : comma - start);
    out.push_back(parse_number(tok));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Mat parse_matrix(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<double> row;
    std::string cur;
    for (char c : t) {
      if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) row.push_back(parse_number(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) row.push_back(parse_number(cur));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) parse_error("matrix file has no rows");
  const auto n = rows.size();
  Mat m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) {
      parse_error("row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                  " entries; expected a square " + std::to_string(n) + "x" +
                  std::to_string(n) + " matrix");
    }
    for (std::size_t c = 0; c < n; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

Mat read_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) parse_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_matrix(buf.str());
}

PartitionLabel parse_label(std::string_view text) {
  const auto s = trim(text);
  const auto first = s.find_first_not_of(" \t\n\r", 1);
  if (!s.empty() && s.front() == '{' && first != std::string_view::npos && s[first] == '"') {
    try {
      return label_from_json(Json::parse(s));
    } catch (const Json::exception& e) {
      parse_error(std::string("label JSON: ") + e.what());
    }
  }
  return parse_compact_label(s);
}

std::string format_label(const PartitionLabel& label) {
  std::string out;
  for (const auto& s : label.normalized().subsets) {
    if (!out.empty()) out += ',';
    out += '{' + std::to_string(s.first + 1);
    if (s.is_pair()) out += ',' + std::to_string(s.second + 1);
    out += '}';
    out += s.det_sign > 0 ? '+' : '-';
    if (s.is_pair() && s.angle_sign < 0) out += "@-";
  }
  return out;
}

Json to_json(const PartitionLabel& label) {
  Json subsets = Json::array();
  for (const auto& s : label.normalized().subsets) {
    Json idx = Json::array({s.first + 1});
    if (s.is_pair()) idx.push_back(s.second + 1);
    subsets.push_back({{"idx", idx}, {"det", s.det_sign}, {"angle", s.angle_sign}});
  }
  return Json{{"subsets", subsets}};
}

PartitionLabel label_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("subsets") || !j["subsets"].is_array()) {
    parse_error("label JSON needs a \"subsets\" array");
  }
  PartitionLabel label;
  for (const auto& s : j["subsets"]) {
    if (!s.contains("idx") || !s["idx"].is_array() || s["idx"].empty() || s["idx"].size() > 2) {
      parse_error("each subset needs \"idx\" with one or two indices");
    }
    SubsetLabel sub;
    auto index = [](const Json& v) {
      if (!v.is_number_integer() || v.get<int>() < 1) parse_error("label indices are 1-based integers");
      return v.get<int>() - 1;
    };
    sub.first = index(s["idx"][0]);
    if (s["idx"].size() == 2) sub.second = index(s["idx"][1]);
    sub.det_sign = s.value("det", 1);
    sub.angle_sign = s.value("angle", 1);
    label.subsets.push_back(sub);
  }
  return label;
}

Json to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const MinimizerSet& set) {
  Json rotations = Json::array();
  for (const auto& r : set.rotations) rotations.push_back(to_json(r.matrix()));
  Json flags = Json::array();
  for (Flag f : set.flags) flags.push_back(std::string(to_string(f)));
  Json j;
  j["schema"] = schema_tag;
  j["k"] = set.k;
  j["reduced_energy"] = std::isfinite(set.reduced_energy) ? Json(set.reduced_energy) : Json();
  j["cos_alphas"] = set.cos_alphas;
  j["rotations"] = std::move(rotations);
  j["label"] = to_json(set.label);
  j["flags"] = std::move(flags);
  return j;
}

Json to_json(const CriticalPoint& cp) {
  return Json{{"label", to_json(cp.label)},
              {"value", cp.value},
              {"rotation", to_json(cp.rotation.matrix())}};
}

Json to_json(const BlockDecomposition& bd) {
  Json blocks = Json::array();
  for (const auto& b : bd.blocks) {
    blocks.push_back({{"size", b.size},
                      {"mu", b.mu},
                      {"entries", to_json(b.entries)},
                      {"norm_sq", b.entries.squaredNorm()}});
  }
  Json j;
  j["schema"] = schema_tag;
  j["n"] = bd.source_dim;
  j["basis"] = to_json(bd.basis.matrix());
  j["blocks"] = std::move(blocks);
  j["block_norm_sq"] = bd.block_norm_sq();
  return j;
}

Json to_json(const SchemeTrace& trace) {
  Json steps = Json::array();
  for (const auto& s : trace.steps) {
    steps.push_back({{"step", std::string(to_string(s.kind))},
                     {"before", to_json(s.before)},
                     {"after", to_json(s.after)},
                     {"value_before", s.value_before},
                     {"value_after", s.value_after},
                     {"noop", s.is_noop()}});
  }
  Json j;
  j["schema"] = schema_tag;
  j["start_is_critical"] = trace.start_is_critical;
  j["steps"] = std::move(steps);
  j["final_value"] = trace.final_value();
  return j;
}

}  // namespace rpolar
