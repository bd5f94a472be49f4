#include "commands.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <variant>

#include "collrates/oracle.hpp"
#include "collrates/parallel.hpp"
#include "collrates/timeshare.hpp"

namespace collrates::cli {
namespace {

using Json = nlohmann::ordered_json;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string num(double v) { return fmt("%.12g", v); }

int parse_int(std::string_view text, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InvalidArgument(std::string("invalid ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

struct Solved {
  Attack attack;
  double rate_bits = 0.0;
  SolverDiagnostics diagnostics;
  std::optional<double> class_b_rate_bits;
  std::optional<double> asymmetry;
  std::vector<RestartRecord> restarts;
};

Solved solve(Decoder decoder, ClassTag tag, const TimeSharingDist& dist, int c, const SolverConfig& solver) {
  const std::size_t nodes = Quadrature(dist, solver.quadrature).size();
  if (tag == ClassTag::A) {
    CollusionChannel ch = CollusionChannel::class_a(c);
    const double r = rate(decoder, ch, dist, solver.quadrature);
    return Solved{std::move(ch), r, SolverDiagnostics{0, 0.0, nodes}, {}, {}, {}};
  }
  if (c < 2) throw InvalidArgument("classes B, C and D need c >= 2");
  if (tag == ClassTag::D) {
    ClassDStrategy strategy = decoder == Decoder::Joint ? worst_joint_classd(c) : worst_simple_classd(c, solver);
    const double r = rate_classd(strategy, decoder, dist, solver.quadrature);
    return Solved{std::move(strategy), r, SolverDiagnostics{0, 0.0, nodes}, {}, {}, {}};
  }
  if (decoder == Decoder::Joint) {
    if (tag == ClassTag::B && !dist.is_symmetric()) {
      throw CapabilityError("joint class-B search needs a symmetric pdf (the solver covers class C)");
    }
    JointWorstResult r = worst_joint_bc(c, dist, solver);
    return Solved{std::move(r.channel), r.rate_bits, r.diagnostics, {}, {}, {}};
  }
  SimpleWorstResult r =
      worst_simple_bc(c, dist, solver, tag == ClassTag::B ? SearchSpace::ClassB : SearchSpace::ClassC);
  return Solved{std::move(r.channel), r.rate_bits, r.diagnostics, r.class_b_rate_bits, r.asymmetry,
                std::move(r.restarts)};
}

std::string theta_field(const Attack& attack) {
  if (const auto* ch = std::get_if<CollusionChannel>(&attack)) return ch->to_string(6);
  return std::string(to_string(std::get<ClassDStrategy>(attack).kind()));
}

std::vector<int> c_values(const RunConfig& cfg, CRange fallback) {
  const CRange r = cfg.c.value_or(fallback);
  std::vector<int> out;
  for (int c = r.lo; c <= r.hi; ++c) out.push_back(c);
  return out;
}

std::string csv_cell(const Json& v, char sep) {
  std::string s;
  if (v.is_string()) {
    s = v.get<std::string>();
  } else if (v.is_number_integer()) {
    s = std::to_string(v.get<long long>());
  } else if (v.is_number()) {
    s = num(v.get<double>());
  } else if (v.is_null()) {
    s = "";
  } else {
    s = v.dump();
  }
  if (sep == ',' && s.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + '"';
  }
  return s;
}

// Renders an array of flat objects sharing the keys of the first one.
void write_rows(std::ostream& os, const RunConfig& cfg, const Json& rows, Format format) {
  if (format == Format::Json) {
    Json doc;
    doc["provenance"] = provenance_line(cfg).substr(2);
    doc["rows"] = rows;
    os << doc.dump(2) << '\n';
    return;
  }
  const char sep = format == Format::Csv ? ',' : '\t';
  os << provenance_line(cfg) << '\n';
  if (rows.empty()) return;
  bool first = true;
  for (const auto& item : rows.front().items()) {
    if (!first) os << sep;
    os << item.key();
    first = false;
  }
  os << '\n';
  for (const Json& row : rows) {
    first = true;
    for (const auto& item : row.items()) {
      if (!first) os << sep;
      os << csv_cell(item.value(), sep);
      first = false;
    }
    os << '\n';
  }
}

Json restarts_json(const std::vector<RestartRecord>& restarts) {
  Json out = Json::array();
  for (const RestartRecord& r : restarts) {
    out.push_back(Json{{"theta", r.theta}, {"rate_bits", r.rate_bits}, {"iterations", r.iterations},
                       {"converged", r.converged}});
  }
  return out;
}

int cmd_rate(const RunConfig& cfg, std::ostream& os) {
  const TimeSharingDist dist = TimeSharingDist::parse(cfg.pdf);
  const std::vector<int> cs = c_values(cfg, CRange{2, 2});
  const auto solved = parallel_map(cs.size(), [&](std::size_t i) {
    return solve(cfg.decoder, cfg.class_tag, dist, cs[i], cfg.solver);
  });
  Json rows = Json::array();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    rows.push_back(Json{{"c", cs[i]},
                        {"decoder", std::string(to_string(cfg.decoder))},
                        {"class", std::string(to_string(cfg.class_tag))},
                        {"pdf", dist.selector()},
                        {"rate_bits", solved[i].rate_bits},
                        {"theta", theta_field(solved[i].attack)}});
  }
  write_rows(os, cfg, rows, cfg.format.value_or(Format::Csv));
  return kExitOk;
}

int cmd_worst_attack(const RunConfig& cfg, std::ostream& os) {
  const TimeSharingDist dist = TimeSharingDist::parse(cfg.pdf);
  const std::vector<int> cs = c_values(cfg, CRange{2, 2});
  const auto solved = parallel_map(cs.size(), [&](std::size_t i) {
    return solve(cfg.decoder, cfg.class_tag, dist, cs[i], cfg.solver);
  });
  const Format format = cfg.format.value_or(Format::Json);
  Json rows = Json::array();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Solved& s = solved[i];
    Json row{{"c", cs[i]},
             {"decoder", std::string(to_string(cfg.decoder))},
             {"class", std::string(to_string(cfg.class_tag))},
             {"pdf", dist.selector()},
             {"rate_bits", s.rate_bits},
             {"theta", theta_field(s.attack)},
             {"iterations", s.diagnostics.iterations},
             {"final_gap", s.diagnostics.final_gap},
             {"node_count", s.diagnostics.node_count}};
    if (format == Format::Json) {
      if (const auto* ch = std::get_if<CollusionChannel>(&s.attack)) {
        row["theta"] = std::vector<double>(ch->theta().begin(), ch->theta().end());
      } else {
        Json samples = Json::array();
        for (double p : uniform_grid(std::max(cfg.grid, 2))) {
          const CollusionChannel ch = attack_at(s.attack, p);
          samples.push_back(Json{{"p", p}, {"theta", std::vector<double>(ch.theta().begin(), ch.theta().end())}});
        }
        row["theta_samples"] = std::move(samples);
      }
      if (s.class_b_rate_bits) row["class_b_rate_bits"] = *s.class_b_rate_bits;
      if (s.asymmetry) row["asymmetry"] = *s.asymmetry;
      if (!s.restarts.empty()) row["restarts"] = restarts_json(s.restarts);
    }
    rows.push_back(std::move(row));
  }
  write_rows(os, cfg, rows, format);
  return kExitOk;
}

int cmd_curve(const RunConfig& cfg, std::ostream& os) {
  if (cfg.c && cfg.c->lo != cfg.c->hi) throw InvalidArgument("curve takes a single c");
  const int c = cfg.c.value_or(CRange{2, 2}).lo;
  const TimeSharingDist dist = TimeSharingDist::parse(cfg.pdf);
  const Solved s = solve(cfg.decoder, cfg.class_tag, dist, c, cfg.solver);
  const bool with_theta = std::holds_alternative<ClassDStrategy>(s.attack);
  const std::vector<double> grid = uniform_grid(cfg.grid);
  const auto values = parallel_map(grid.size(), [&](std::size_t i) {
    const CollusionChannel ch = attack_at(s.attack, grid[i]);
    return std::pair{r_point(cfg.decoder, ch, grid[i]), ch.to_string(6)};
  });
  Json rows = Json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Json row{{"p", grid[i]}, {"rate_bits", values[i].first}};
    if (with_theta) row["theta"] = values[i].second;
    rows.push_back(std::move(row));
  }
  write_rows(os, cfg, rows, cfg.format.value_or(Format::Csv));
  return kExitOk;
}

int cmd_eta(const RunConfig& cfg, std::ostream& os) {
  Json rows = Json::array();
  for (int c : c_values(cfg, CRange{3, 10})) {
    const double eta = eta_c(c);
    rows.push_back(Json{{"c", c}, {"eta_c", eta}, {"eta_minus_inv_c", eta - 1.0 / c}});
  }
  write_rows(os, cfg, rows, cfg.format.value_or(Format::Csv));
  return kExitOk;
}

int cmd_capacity_d(const RunConfig& cfg, std::ostream& os) {
  const TimeSharingDist dirac = TimeSharingDist::dirac_pair(0.5);
  Json rows = Json::array();
  for (int c : c_values(cfg, CRange{2, 10})) {
    rows.push_back(Json{{"c", c},
                        {"capacity_bits", capacity_classd_joint(c)},
                        {"quadrature_bits", rate_classd(worst_joint_classd(c), Decoder::Joint, dirac)}});
  }
  write_rows(os, cfg, rows, cfg.format.value_or(Format::Csv));
  return kExitOk;
}

int cmd_mc_check(const RunConfig& cfg, std::ostream& os) {
  if (cfg.c && cfg.c->lo != cfg.c->hi) throw InvalidArgument("mc-check takes a single c");
  const int c = cfg.c.value_or(CRange{2, 2}).lo;
  const TimeSharingDist dist = TimeSharingDist::parse(cfg.pdf);
  const Solved s = solve(cfg.decoder, cfg.class_tag, dist, c, cfg.solver);
  const McEstimate est = estimate_mi(cfg.decoder, s.attack, dist, cfg.samples, cfg.solver.seed,
                                     cfg.plug_in ? Estimator::PlugIn : Estimator::RaoBlackwell);
  Json doc{{"decoder", std::string(to_string(cfg.decoder))},
           {"class", std::string(to_string(cfg.class_tag))},
           {"c", c},
           {"pdf", dist.selector()},
           {"mi_bits", est.mi_bits},
           {"std_err_bits", est.std_err_bits},
           {"samples", est.samples},
           {"seed", est.seed},
           {"reference_rate_bits", s.rate_bits},
           {"z_score", (est.mi_bits - s.rate_bits) / est.std_err_bits},
           {"estimator", cfg.plug_in ? "plug-in" : "rao-blackwell"},
           {"provenance", provenance_line(cfg).substr(2)}};
  os << doc.dump(2) << '\n';
  return kExitOk;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write '" + path.string() + "'");
  f << text;
}

int cmd_tables(const RunConfig& cfg, std::ostream& os) {
  if (cfg.table < 0 || cfg.table > 3) throw InvalidArgument("--table must be 0, 1, 2 or 3");
  const std::string header = provenance_line(cfg) + '\n';
  std::vector<std::pair<std::string, std::string>> tables;
  if (cfg.table == 0 || cfg.table == 1) tables.emplace_back("table1.tsv", table_joint(cfg.solver));
  if (cfg.table == 0 || cfg.table == 2) tables.emplace_back("table2.tsv", table_simple(cfg.solver));
  if (cfg.table == 0 || cfg.table == 3) tables.emplace_back("table3.tsv", table_eta());
  if (!cfg.out.empty()) {
    std::filesystem::create_directories(cfg.out);
    for (const auto& [name, body] : tables) write_file(std::filesystem::path(cfg.out) / name, header + body);
    return kExitOk;
  }
  os << header;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) os << '\n';
    os << tables[i].second;
  }
  return kExitOk;
}

int dispatch(const RunConfig& cfg, std::ostream& os) {
  if (cfg.command == "rate") return cmd_rate(cfg, os);
  if (cfg.command == "worst-attack") return cmd_worst_attack(cfg, os);
  if (cfg.command == "curve") return cmd_curve(cfg, os);
  if (cfg.command == "eta") return cmd_eta(cfg, os);
  if (cfg.command == "capacity-d") return cmd_capacity_d(cfg, os);
  if (cfg.command == "mc-check") return cmd_mc_check(cfg, os);
  if (cfg.command == "tables") return cmd_tables(cfg, os);
  throw InvalidArgument("unknown command '" + cfg.command + "'");
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "tsv") return Format::Tsv;
  if (name == "json") return Format::Json;
  throw InvalidArgument("unknown format '" + std::string(name) + "'");
}

CRange parse_c_range(std::string_view text) {
  CRange r;
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    r.lo = r.hi = parse_int(text, "collusion size");
  } else {
    r.lo = parse_int(text.substr(0, dots), "collusion size");
    r.hi = parse_int(text.substr(dots + 2), "collusion size");
  }
  if (r.lo < 1 || r.hi < r.lo || r.hi > kMaxCollusionSize) {
    throw InvalidArgument("invalid collusion size range '" + std::string(text) + "'");
  }
  return r;
}

std::string provenance_line(const RunConfig& cfg) {
  std::ostringstream os;
  os << "# collrates command=" << cfg.command << " decoder=" << to_string(cfg.decoder)
     << " class=" << to_string(cfg.class_tag) << " pdf=" << cfg.pdf;
  if (cfg.c) os << " c=" << cfg.c->lo << ".." << cfg.c->hi;
  os << " tardos_nodes=" << cfg.solver.quadrature.tardos_nodes
     << " flat_nodes=" << cfg.solver.quadrature.flat_nodes
     << " quad_tol_bits=" << num(cfg.solver.quadrature.tolerance_bits)
     << " max_iters=" << cfg.solver.max_iters << " gap_tol_bits=" << num(cfg.solver.gap_tol_bits)
     << " theta_tol=" << num(cfg.solver.theta_tol) << " line_grid=" << cfg.solver.grid_points
     << " restarts=" << cfg.solver.restarts << " seed=" << cfg.solver.seed << " grid=" << cfg.grid
     << " samples=" << cfg.samples;
  return os.str();
}

std::string table_joint(const SolverConfig& solver) {
  const TimeSharingDist tardos = TimeSharingDist::tardos();
  const auto results = parallel_map(8, [&](std::size_t i) {
    return worst_joint_bc(static_cast<int>(i) + 2, tardos, solver);
  });
  std::string out = "c\ttheta*\trate_bits\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    out += std::to_string(i + 2) + '\t' + results[i].channel.to_string(3) + '\t' +
           fmt("%.3f", results[i].rate_bits) + '\n';
  }
  return out;
}

std::string table_simple(const SolverConfig& solver) {
  const TimeSharingDist tardos = TimeSharingDist::tardos();
  const auto results = parallel_map(8, [&](std::size_t i) {
    return worst_simple_bc(static_cast<int>(i) + 2, tardos, solver);
  });
  std::string out = "c\ttheta*\trate_bits\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    out += std::to_string(i + 2) + '\t' + results[i].channel.to_string(3) + '\t' +
           fmt("%.3f", results[i].rate_bits) + '\n';
  }
  return out;
}

std::string table_eta() {
  std::string out = "c\teta_c-1/c\n";
  for (int c = 3; c <= 10; ++c) out += std::to_string(c) + '\t' + fmt("%.1e", eta_c(c) - 1.0 / c) + '\n';
  return out;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.solver.validate();
    if (cfg.grid < 2) throw InvalidArgument("--grid must be >= 2");
    if (!cfg.out.empty() && cfg.command != "tables") {
      std::ostringstream buffer;
      const int code = dispatch(cfg, buffer);
      write_file(cfg.out, buffer.str());
      return code;
    }
    return dispatch(cfg, out);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (last gap " << e.last_gap() << ")\n";
    return kExitNoConvergence;
  } catch (const DegenerateUpdate& e) {
    err << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const IntegrandError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const CapabilityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitCapability;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Achievable rates of probabilistic traitor-tracing codes"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string decoder = "joint";
  std::string klass = "A";
  std::string c_text;
  std::string format;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"rate", "Achievable rate per c for one (decoder, class, pdf)"},
      {"worst-attack", "Worst collusion channel with solver diagnostics"},
      {"curve", "Pointwise rate r(c, p) over a uniform p grid"},
      {"eta", "Left end of the simple-decoder null-rate interval"},
      {"capacity-d", "Joint-decoder capacity under p-aware collusion"},
      {"mc-check", "Monte-Carlo estimate against the quadrature rate"},
      {"tables", "Worst-attack tables (joint, simple) and eta_c table"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--decoder", decoder, "joint | simple")->check(CLI::IsMember({"joint", "simple"}));
    sub->add_option("--class", klass, "A | B | C | D")->check(CLI::IsMember({"A", "B", "C", "D"}));
    sub->add_option("--pdf", cfg.pdf, "tardos | flat | dirac:<p0> | discrete:<p>:<w>,...");
    sub->add_option("--c", c_text, "collusion size or range a..b");
    sub->add_option("--grid", cfg.grid, "p grid points for curves and class-D samples");
    sub->add_option("--line-grid", cfg.solver.grid_points, "coarse grid of the class-D line search");
    sub->add_option("--tol", cfg.solver.gap_tol_bits, "solver stopping gap in bits");
    sub->add_option("--max-iters", cfg.solver.max_iters, "solver iteration cap");
    sub->add_option("--restarts", cfg.solver.restarts, "multistart restarts (simple decoder)");
    sub->add_option("--seed", cfg.solver.seed, "seed for restarts and sampling");
    sub->add_option("--samples", cfg.samples, "Monte-Carlo sample count");
    sub->add_option("--tardos-nodes", cfg.solver.quadrature.tardos_nodes, "Tardos quadrature nodes");
    sub->add_option("--flat-nodes", cfg.solver.quadrature.flat_nodes, "flat quadrature nodes");
    sub->add_flag("--plug-in", cfg.plug_in, "histogram estimator (discrete pdfs only)");
    sub->add_option("--table", cfg.table, "tables: 1, 2 or 3 (default all)");
    sub->add_option("--format", format, "csv | tsv | json")->check(CLI::IsMember({"csv", "tsv", "json"}));
    sub->add_option("--out", cfg.out, "output file (directory for tables)");
    sub->callback([&cfg, name = name] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }
  try {
    cfg.decoder = parse_decoder(decoder);
    cfg.class_tag = parse_class_tag(klass);
    if (!c_text.empty()) cfg.c = parse_c_range(c_text);
    if (!format.empty()) cfg.format = parse_format(format);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return run(cfg, out, err);
}

}  // namespace collrates::cli
