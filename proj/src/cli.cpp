#include "rpolar/cli.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "rpolar/serialize.hpp"

namespace rpolar {

namespace {

// Shortest round-trip decimal.
std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ",") + num(x);
  return s;
}

void print_matrix(std::ostream& out, const Mat& m, const std::string& indent) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out << indent;
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << std::setw(24) << num(m(r, c));
    out << '\n';
  }
}

// Label indices arrive 1-based and are shifted by the parser already.
PartitionLabel label_arg(const std::string& text) { return parse_label(text); }

struct Common {
  std::string format = "json";
  std::uint64_t seed = 0;
  double tol = 1e-7;
  int max_n = default_max_n;
};

void add_format(CLI::App* cmd, Common& c, std::vector<std::string> allowed) {
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember(std::move(allowed)))
      ->capture_default_str();
}

// ---- rpolar ---------------------------------------------------------------

int cmd_rpolar(const std::string& mode, const std::string& input, const Common& c,
               std::ostream& out) {
  MinimizerSet set;
  Json extra = Json::object();
  if (mode == "diag") {
    const auto d = parse_diag_list(input);
    const Reflection refl = reflect_negative(d);
    set = rpolar_signed(d);
    if (refl.det_sign != 1 || std::any_of(refl.signs.begin(), refl.signs.end(),
                                          [](int s) { return s < 0; })) {
      extra["signs"] = refl.signs;
      extra["abs_d"] = refl.abs_d.values();
    }
  } else {
    set = rpolar_full(read_matrix_file(input));
  }
  if (c.format == "json") {
    Json j = to_json(set);
    j.update(extra);
    out << j.dump() << '\n';
    return exit_ok;
  }
  out << "k = " << set.k << '\n';
  out << "reduced_energy = " << num(set.reduced_energy) << '\n';
  out << "cos_alphas = [" << join(set.cos_alphas) << "]\n";
  out << "label = " << format_label(set.label) << '\n';
  out << "flags =";
  for (Flag f : set.flags) out << ' ' << to_string(f);
  out << '\n';
  for (std::size_t i = 0; i < set.rotations.size(); ++i) {
    out << "rotation " << i + 1 << ":\n";
    print_matrix(out, set.rotations[i].matrix(), "  ");
  }
  return exit_ok;
}

// ---- critical -------------------------------------------------------------

int cmd_critical(const std::string& input, const std::string& label_text, const Common& c,
                 std::ostream& out, std::ostream& err) {
  const DiagParams d(parse_diag_list(input));
  std::vector<CriticalPoint> points;
  if (!label_text.empty()) {
    const PartitionLabel label = label_arg(label_text);
    validate_structure(label, d);
    try {
      validate_label(label, d, /*require_rotation=*/true);
    } catch (const Error& e) {
      // Well-formed but not a critical point on SO(n): report the formal sum.
      err << "note: " << e.what() << "; reporting the formal value only\n";
      const double v = formal_value(label, d);
      if (c.format == "json") {
        out << Json{{"label", to_json(label)}, {"value", v}, {"critical", false}}.dump() << '\n';
      } else {
        out << format_label(label) << "  " << num(v) << "  (not critical on SO(n))\n";
      }
      return exit_ok;
    }
    points = realize(label, d);
  } else {
    points = enumerate_critical(d, c.max_n);
    std::stable_sort(points.begin(), points.end(),
                     [](const CriticalPoint& a, const CriticalPoint& b) { return a.value < b.value; });
  }
  for (const auto& cp : points) {
    if (c.format == "json") {
      out << to_json(cp).dump() << '\n';
    } else {
      out << std::left << std::setw(36) << format_label(cp.label) << num(cp.value) << '\n';
    }
  }
  return exit_ok;
}

// ---- blockdiag ------------------------------------------------------------

int cmd_blockdiag(const std::string& path, const Common& c, std::ostream& out) {
  const BlockDecomposition bd = block_diagonalize(read_matrix_file(path));
  if (c.format == "json") {
    out << to_json(bd).dump() << '\n';
    return exit_ok;
  }
  out << "T =\n";
  print_matrix(out, bd.basis.matrix(), "  ");
  std::string split;
  for (std::size_t i = 0; i < bd.blocks.size(); ++i) {
    const auto& b = bd.blocks[i];
    out << "block " << i + 1 << " (size " << b.size << ", mu = " << num(b.mu) << "):\n";
    print_matrix(out, b.entries, "  ");
    split += (split.empty() ? "" : " + ") + num(b.entries.squaredNorm());
  }
  out << "norm^2 = " << num(bd.block_norm_sq()) << " = " << split << '\n';
  return exit_ok;
}

// ---- verify ---------------------------------------------------------------

std::vector<double> random_strict_diag(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.05, 4.0);
  for (;;) {
    std::vector<double> d(static_cast<std::size_t>(n));
    for (auto& v : d) v = u(rng);
    std::sort(d.begin(), d.end(), std::greater<>());
    bool spread = true;
    for (std::size_t i = 1; i < d.size(); ++i) spread = spread && d[i - 1] - d[i] > 0.05;
    if (spread) return d;
  }
}

int cmd_verify(const std::string& input, int batch, int n, int starts, const Common& c,
               std::ostream& out) {
  std::vector<std::vector<double>> cases;
  if (batch > 0) {
    if (n < 1) throw Error(ErrorCode::InvalidParams, "verify: --batch needs --n >= 1");
    if (n > brute_force_max_n) {
      throw Error(ErrorCode::TooLarge, "verify: n = " + std::to_string(n) + " exceeds " +
                                           std::to_string(brute_force_max_n));
    }
    Rng rng(c.seed);
    for (int b = 0; b < batch; ++b) cases.push_back(random_strict_diag(n, rng));
  } else {
    if (input.empty()) throw Error(ErrorCode::Parse, "verify: give a diagonal or --batch");
    cases.push_back(parse_diag_list(input));
  }
  int passed = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const DiagParams d(cases[i]);
    const DescentReport rep = brute_force_min(d, starts, c.seed + i);
    const double closed = reduced_energy(d);
    const double diff = rep.best_value - closed;
    const bool ok = std::abs(diff) <= c.tol;
    passed += ok ? 1 : 0;
    if (c.format == "json") {
      out << Json{{"d", cases[i]},
                  {"brute_force", rep.best_value},
                  {"closed_form", closed},
                  {"difference", diff},
                  {"starts", rep.n_starts},
                  {"converged", rep.n_converged},
                  {"pass", ok}}
                 .dump()
          << '\n';
    } else {
      out << "D=(" << join(cases[i]) << ") brute_force=" << num(rep.best_value)
          << " closed_form=" << num(closed) << " difference=" << num(diff) << ' '
          << (ok ? "PASS" : "FAIL") << '\n';
    }
  }
  if (cases.size() > 1 && c.format != "json") {
    out << passed << '/' << cases.size() << " PASS\n";
  }
  return passed == static_cast<int>(cases.size()) ? exit_ok : exit_failure;
}

// ---- flow -----------------------------------------------------------------

int cmd_flow(const std::string& input, bool biot, const std::string& start, FlowOptions opts,
             int every, const Common& c, std::ostream& out) {
  const DiagParams d(parse_diag_list(input));
  Rotation r0 = Rotation::identity(d.dim());
  if (start == "random") {
    Rng rng(c.seed);
    r0 = random_rotation(d.dim(), rng);
  }
  const FlowTrajectory traj = biot ? biot_flow(r0, d, opts) : integrate_flow(r0, d, opts);
  const std::size_t last = traj.times.size() - 1;
  if (c.format == "csv") {
    out << "t,energy";
    for (int i = 1; i <= d.dim(); ++i)
      for (int j = 1; j <= d.dim(); ++j) out << ",r" << i << '_' << j;
    out << '\n';
    for (std::size_t k = 0; k <= last; ++k) {
      if (k % static_cast<std::size_t>(every) != 0 && k != last) continue;
      out << num(traj.times[k]) << ',' << num(traj.energies[k]);
      const Mat& m = traj.states[k].matrix();
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << num(m(i, j));
      out << '\n';
    }
  } else {
    out << Json{{"schema", schema_tag},
                {"flow", biot ? "biot" : "sym"},
                {"steps", last},
                {"t_final", traj.times[last]},
                {"energy_initial", traj.energies.front()},
                {"energy_final", traj.energies[last]},
                {"grad_norm_final", traj.final_grad_norm},
                {"rotation_final", to_json(traj.states[last].matrix())}}
               .dump()
        << '\n';
  }
  return exit_ok;
}

// ---- scheme ---------------------------------------------------------------

int cmd_scheme(const std::string& input, const std::string& label_text, bool all,
               const Common& c, std::ostream& out) {
  const DiagParams d(parse_diag_list(input));
  const SchemeTrace trace = scheme_minimize(label_arg(label_text), d);
  if (c.format == "json") {
    out << to_json(trace).dump() << '\n';
    return exit_ok;
  }
  auto row = [&out](std::string_view step, const PartitionLabel& l, double v) {
    out << std::left << std::setw(13) << step << std::setw(36) << format_label(l) << num(v)
        << '\n';
  };
  row("start", trace.steps.front().before, trace.steps.front().value_before);
  for (const auto& s : trace.steps) {
    if (all || !s.is_noop()) row(to_string(s.kind), s.after, s.value_after);
  }
  return exit_ok;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse:
    case ErrorCode::InvalidParams:
    case ErrorCode::DimensionMismatch:
      return exit_parse;
    case ErrorCode::DegenerateD:
    case ErrorCode::NonInvertibleOrReflective:
    case ErrorCode::Degenerate:
      return exit_degenerate;
    case ErrorCode::TooLarge:
      return exit_too_large;
    case ErrorCode::NotSymmetricSquare:
      return exit_not_symmetric_square;
    case ErrorCode::InfeasibleLabel:
      return exit_infeasible_label;
    default:
      return exit_failure;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy-minimizing rotations for ||sym(RD - 1)||^2 on SO(n)", "rpolar"};
  app.require_subcommand(1);
  Common c;

  std::string mode, input, label, start = "random";
  int batch = 0, n = 0, starts = 200, every = 1;
  bool biot = false, all = false;
  FlowOptions flow_opts;

  auto* rp = app.add_subcommand("rpolar", "Global minimizers for a diagonal or a matrix file");
  rp->add_option("mode", mode, "diag or full")->required()->check(CLI::IsMember({"diag", "full"}));
  rp->add_option("input", input, "Comma list (diag) or matrix file (full)")->required();
  add_format(rp, c, {"json", "text"});

  auto* cr = app.add_subcommand("critical", "Enumerate critical points, sorted by value");
  cr->add_option("diag", input, "Comma-separated diagonal")->required();
  cr->add_option("--label", label, "Only this label, e.g. '{1}+,{2,5}-,{3}-,{4}-'");
  cr->add_option("--max-n", c.max_n, "Refuse larger dimensions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_format(cr, c, {"json", "text"});

  auto* bd = app.add_subcommand("blockdiag", "Block-diagonalize a matrix with symmetric square");
  bd->add_option("file", input, "Matrix file")->required();
  add_format(bd, c, {"json", "text"});

  auto* ve = app.add_subcommand("verify", "Compare multistart descent with the closed form");
  ve->add_option("diag", input, "Comma-separated diagonal");
  ve->add_option("--batch", batch, "Number of random diagonals")->check(CLI::NonNegativeNumber);
  ve->add_option("--n", n, "Dimension for --batch");
  ve->add_option("--starts", starts, "Descent starts per case")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ve->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  ve->add_option("--tol", c.tol, "Agreement tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c.format = "text";
  add_format(ve, c, {"json", "text"});

  auto* fl = app.add_subcommand("flow", "Integrate the gradient flow and dump a CSV trajectory");
  fl->add_option("diag", input, "Comma-separated diagonal")->required();
  fl->add_flag("--biot", biot, "Flow of ||RD - 1||^2 / 2 instead");
  fl->add_option("--step", flow_opts.step, "Step size")->capture_default_str();
  fl->add_option("--t-end", flow_opts.t_end, "Final time")->capture_default_str();
  fl->add_option("--gtol", flow_opts.gtol, "Stop once the gradient norm is below this");
  fl->add_option("--start", start, "Initial rotation")
      ->check(CLI::IsMember({"identity", "random"}))
      ->capture_default_str();
  fl->add_option("--every", every, "Write every k-th state")->check(CLI::PositiveNumber);
  fl->add_option("--seed", c.seed, "Seed for a random start")->capture_default_str();
  auto* fl_format = fl->add_option("--format", c.format, "Output format")
                        ->check(CLI::IsMember({"csv", "json"}));

  auto* sc = app.add_subcommand("scheme", "Trace the label transformations down to the minimum");
  sc->add_option("diag", input, "Comma-separated diagonal")->required();
  sc->add_option("--label", label, "Start label")->required();
  sc->add_flag("--all", all, "Also print steps that change nothing");
  add_format(sc, c, {"json", "text"});

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_parse;
  }
  // Per-command defaults when --format was not given.
  if (rp->parsed() && rp->count("--format") == 0) c.format = "json";
  if (cr->parsed() && cr->count("--format") == 0) c.format = "json";
  if (bd->parsed() && bd->count("--format") == 0) c.format = "json";
  if (sc->parsed() && sc->count("--format") == 0) c.format = "text";
  if (fl->parsed() && fl_format->count() == 0) c.format = "csv";

  try {
    if (rp->parsed()) return cmd_rpolar(mode, input, c, out);
    if (cr->parsed()) return cmd_critical(input, label, c, out, err);
    if (bd->parsed()) return cmd_blockdiag(input, c, out);
    if (ve->parsed()) return cmd_verify(input, batch, n, starts, c, out);
    if (fl->parsed()) return cmd_flow(input, biot, start, flow_opts, every, c, out);
    if (sc->parsed()) return cmd_scheme(input, label, all, c, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
  return exit_failure;
}

}  // namespace rpolar
