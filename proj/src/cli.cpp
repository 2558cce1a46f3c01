#include "podkit/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "podkit/csv.hpp"
#include "podkit/error_lab.hpp"
#include "podkit/errors.hpp"
#include "podkit/fhn.hpp"
#include "podkit/instances.hpp"
#include "podkit/kernels.hpp"
#include "podkit/linear_map.hpp"
#include "podkit/pod_engine.hpp"
#include "podkit/snapshot_io.hpp"

namespace podkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* command_name(Command c) {
  switch (c) {
    case Command::generate_fhn: return "generate-fhn";
    case Command::generate_synthetic: return "generate-synthetic";
    case Command::pod: return "pod";
    case Command::verify: return "verify";
    case Command::sweep: return "sweep";
    case Command::table: return "table";
  }
  return "unknown";
}

void emit_error(std::ostream& err, const std::string& name, const std::string& message, int code) {
  err << json{{"error", name}, {"message", message}, {"exit_code", code}}.dump() << "\n";
}

std::vector<Index> parse_r_values(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw Error(ErrorCode::InvalidArgument, "cannot parse r value '" + item + "'");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

double resolve_tolerance(const RunConfig& cfg) {
  if (cfg.tol) return *cfg.tol;
  if (const char* env = std::getenv("PODKIT_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, std::string("PODKIT_TOL is not a positive number: '") + env + "'");
    }
    return v;
  }
  return Tolerances{}.identity;
}

json parse_json_arg(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[' || text[first] == '"')) {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::MalformedManifest, std::string("--map: ") + e.what());
    }
  }
  try {
    return json::parse(csv::read_file(text));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedManifest, text + ": " + e.what());
  }
}

Matrix form_from_spec(const json& spec, Index dim, const fs::path& base) {
  if (spec.is_string()) {
    fs::path p = spec.get<std::string>();
    if (p.is_relative()) p = base / p;
    Matrix a = csv::read_matrix(p);
    if (a.rows() != dim || a.cols() != dim) throw Error(ErrorCode::DimensionMismatch, "form matrix has the wrong size");
    return a;
  }
  if (spec.is_object() && spec.contains("ritz_form")) {
    const auto& f = spec.at("ritz_form");
    RitzFormParams p;
    p.kappa = f.value("kappa", p.kappa);
    p.beta = f.value("beta", p.beta);
    const Index nodes = f.value("nodes", dim);
    auto inst = make_embedding_instance(nodes, EmbeddingExample::example3, p);
    if (inst.form->rows() != dim) throw Error(ErrorCode::DimensionMismatch, "form nodes do not match the Y space");
    return *inst.form;
  }
  throw Error(ErrorCode::MalformedManifest, "unrecognized form spec " + spec.dump());
}

struct Pipeline {
  LoadedSnapshots loaded;
  GramSpace space;
  std::optional<LinearMap> map;
  std::optional<Matrix> form;
  std::optional<PodBasis> basis;
};

Pipeline load_pipeline(const RunConfig& cfg) {
  if (cfg.input.empty()) throw Error(ErrorCode::InvalidArgument, std::string(command_name(cfg.command)) + " needs --input");
  LoadedSnapshots loaded = load(cfg.input);
  GramSpace space = loaded.space ? *loaded.space : GramSpace::identity(loaded.set.space_dim());
  Pipeline p{std::move(loaded), space, std::nullopt, std::nullopt, std::nullopt};
  json map_spec;
  if (!cfg.map.empty()) map_spec = parse_json_arg(cfg.map);
  else if (p.loaded.manifest.contains("map")) map_spec = p.loaded.manifest.at("map");
  if (!map_spec.is_null()) p.map.emplace(map_from_spec(map_spec, p.space, p.loaded.base_dir));
  if (p.loaded.manifest.contains("form") && p.map) {
    p.form = form_from_spec(p.loaded.manifest.at("form"), p.map->codomain().dim(), p.loaded.base_dir);
  }
  p.basis.emplace(compute_pod(p.loaded.set, p.space));
  return p;
}

std::vector<Index> default_r_list(const PodBasis& basis) {
  std::vector<Index> out;
  for (Index r = 1; r <= basis.rank(); ++r) out.push_back(r);
  return out;
}

fs::path sibling(const fs::path& p, const std::string& ext) {
  fs::path q = p;
  q.replace_extension(ext);
  return q;
}

json provenance(const RunConfig& cfg, const Pipeline& p, const std::vector<Index>& r_list) {
  json j;
  j["command"] = command_name(cfg.command);
  j["input"] = cfg.input;
  j["r_list"] = r_list;
  j["projector"] = cfg.projector;
  j["seed"] = cfg.seed;
  j["space"] = p.space.label();
  j["rank"] = p.basis->rank();
  j["drop_tol"] = p.basis->drop_tol();
  if (p.map) {
    const MapReport m = describe(*p.map);
    j["map"] = {{"kind", map_kind_name(p.map->kind())}, {"dim_X", m.dim_X}, {"dim_Y", m.dim_Y},
                {"op_norm", m.op_norm}, {"injective", m.injective}, {"surjective", m.surjective},
                {"invertible", m.invertible}};
  }
  return j;
}

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

void render_table(const std::vector<std::vector<std::string>>& rows, std::ostream& out) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      if (c) out << "  ";
      out << rows[i][c] << std::string(width[c] - rows[i][c].size(), ' ');
    }
    out << "\n";
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out << std::string(total > 2 ? total - 2 : 0, '-') << "\n";
    }
  }
}

int cmd_generate_fhn(const RunConfig& cfg, std::ostream& out) {
  if (cfg.output.empty()) throw Error(ErrorCode::InvalidArgument, "generate-fhn needs --output");
  FhnConfig fc = cfg.input.empty() ? FhnConfig{} : fhn_config_from_json(parse_json_arg(cfg.input));
  if (cfg.nodes) fc.nodes = *cfg.nodes;
  fc.validate();
  const Trajectory traj = solve_fhn(fc);
  const SnapshotSet set = from_trajectory(traj.grid, traj.states);
  SaveOptions opt;
  opt.gram = {{"fem_mass", fc.nodes}, {"blocks", 2}};
  opt.extra = {{"map", {{"derivative_1d", {{"nodes", fc.nodes}, {"scheme", "forward"}, {"blocks", 2}}}}},
               {"fhn", to_json(fc)}};
  save(set, cfg.output, opt);
  out << json{{"written", cfg.output}, {"dim", set.space_dim()}, {"count", set.count()}}.dump() << "\n";
  return ExitCode::ok;
}

int cmd_generate_synthetic(const RunConfig& cfg, std::ostream& out) {
  if (cfg.output.empty()) throw Error(ErrorCode::InvalidArgument, "generate-synthetic needs --output");
  const fs::path manifest = cfg.output;
  SaveOptions opt;
  std::optional<SnapshotSet> set;
  const std::string& kind = cfg.kind;
  if (kind == "gr2") {
    auto inst = gr2_instance();
    set = inst.set;
    opt.gram = "identity";
    opt.extra = {{"map", {{"diag", {1.0, 2.0}}}}};
  } else if (kind == "random") {
    auto inst = random_instance(cfg.dim, cfg.count, cfg.seed, MapClass::invertible);
    set = inst.set;
    const auto gx = sibling(manifest, ".gramX.csv");
    const auto gy = sibling(manifest, ".gramY.csv");
    const auto lm = sibling(manifest, ".map.csv");
    csv::write_matrix(gx, inst.space_X.gram());
    csv::write_matrix(gy, inst.space_Y.gram());
    csv::write_matrix(lm, inst.map.matrix());
    opt.gram = gx.filename().string();
    opt.extra = {{"map", {{"matrix", lm.filename().string()}, {"codomain", gy.filename().string()}}}};
  } else {
    const EmbeddingExample which = parse_example(kind);
    const Index nodes = cfg.nodes.value_or(17);
    set = synthetic_trajectory(nodes, cfg.seed);
    if (which == EmbeddingExample::example2) {
      opt.gram = {{"fem_h1", nodes}};
      opt.extra = {{"map", {{"embedding", {{"from", "stiffness+mass"}, {"to", "mass"}}}}}};
    } else {
      opt.gram = {{"fem_mass", nodes}};
      opt.extra = {{"map", {{"embedding", {{"from", "mass"}, {"to", "stiffness+mass"}}}}}};
    }
    if (which == EmbeddingExample::example3) {
      RitzFormParams p;
      opt.extra["form"] = {{"ritz_form", {{"nodes", nodes}, {"kappa", p.kappa}, {"beta", p.beta}}}};
    }
  }
  save(*set, manifest, opt);
  out << json{{"written", cfg.output}, {"kind", kind}, {"dim", set->space_dim()}, {"count", set->count()}}.dump()
      << "\n";
  return ExitCode::ok;
}

int cmd_pod(const RunConfig& cfg, std::ostream& out) {
  if (cfg.output.empty()) throw Error(ErrorCode::InvalidArgument, "pod needs --output");
  Pipeline p = load_pipeline(cfg);
  for (Index r : cfg.r_list) p.basis->require_rank(r);
  save_basis(*p.basis, cfg.output);
  // spectrum for plotting
  std::string spec = "k,sigma,lambda\n";
  for (Index k = 0; k < p.basis->stored(); ++k) {
    const double s = p.basis->sigma()[k];
    spec += std::to_string(k + 1) + "," + csv::format_double(s) + "," + csv::format_double(s * s) + "\n";
  }
  csv::write_file_atomic(sibling(cfg.output, ".spectrum.csv"), spec);
  const double energy = hs_norm_sq(p.loaded.set, p.space);
  out << json{{"written", cfg.output}, {"rank", p.basis->rank()}, {"stored", p.basis->stored()},
              {"energy", energy}, {"sigma_sq_sum", p.basis->tail_energy(0)}}
             .dump()
      << "\n";
  return ExitCode::ok;
}

LabSetup lab_setup(const RunConfig& cfg, const Pipeline& p) {
  LabSetup s;
  s.set = &p.loaded.set;
  s.basis = &*p.basis;
  s.map = p.map ? &*p.map : nullptr;
  s.family = parse_family(cfg.projector);
  s.form = p.form ? &*p.form : nullptr;
  s.tol.identity = resolve_tolerance(cfg);
  return s;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  if (cfg.output.empty()) throw Error(ErrorCode::InvalidArgument, "verify needs --output");
  Pipeline p = load_pipeline(cfg);
  const LabSetup s = lab_setup(cfg, p);
  const auto r_list = cfg.r_list.empty() ? default_r_list(*p.basis) : cfg.r_list;
  const auto reports = verify_all(s, r_list, cfg.seed);
  json j = reports_to_json(reports, s.tol);
  j["provenance"] = provenance(cfg, p, r_list);
  csv::write_file_atomic(cfg.output, j.dump(2) + "\n");
  csv::write_file_atomic(sibling(cfg.output, ".csv"), reports_to_csv(reports));
  const bool ok = all_passed(reports);
  Index failed = 0;
  for (const auto& r : reports) failed += r.passed ? 0 : 1;
  out << json{{"written", cfg.output}, {"checks", reports.size()}, {"failed", failed}}.dump() << "\n";
  return ok ? ExitCode::ok : ExitCode::checks_failed;
}

std::vector<ErrorReport> run_sweep(const RunConfig& cfg, Pipeline& p) {
  if (cfg.r_list.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs a nonempty --r / --r-list");
  const LabSetup s = lab_setup(cfg, p);
  return sweep(s, cfg.r_list);
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  if (cfg.output.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs --output");
  Pipeline p = load_pipeline(cfg);
  const auto reports = run_sweep(cfg, p);
  csv::write_file_atomic(cfg.output, reports_to_csv(reports));
  out << json{{"written", cfg.output}, {"rows", reports.size()}}.dump() << "\n";
  return all_passed(reports) ? ExitCode::ok : ExitCode::checks_failed;
}

int cmd_table(const RunConfig& cfg, std::ostream& out) {
  std::vector<std::vector<std::string>> rows{{"identity_id", "r", "actual", "formula", "difference", "passed"}};
  bool ok = true;
  if (fs::path(cfg.input).extension() == ".csv") {
    // a sweep or verify CSV
    std::stringstream ss(csv::read_file(cfg.input));
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
      if (line.empty()) continue;
      std::vector<std::string> f;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) f.push_back(cell);
      if (f.size() != 7) throw Error(ErrorCode::MalformedManifest, "unexpected report row: " + line);
      auto num = [&](const std::string& t) { return format_sci(std::strtod(t.c_str(), nullptr)); };
      rows.push_back({f[0], f[1], num(f[2]), num(f[3]), num(f[4]), f[6]});
      ok = ok && f[6] == "true";
    }
  } else {
    Pipeline p = load_pipeline(cfg);
    for (const auto& r : run_sweep(cfg, p)) {
      rows.push_back({r.id, std::to_string(r.r), format_sci(r.lhs), format_sci(r.rhs), format_sci(r.abs_diff),
                      r.passed ? "true" : "false"});
      ok = ok && r.passed;
    }
  }
  render_table(rows, out);
  return ok ? ExitCode::ok : ExitCode::checks_failed;
}

}  // namespace

ParseResult parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"POD error-formula toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::vector<std::string> r_text;
  std::vector<std::string> r_list_text;
  double tol = 0.0;

  struct Sub {
    Command command;
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {Command::generate_fhn, "generate-fhn", "Solve the FitzHugh-Nagumo system and write a snapshot manifest"},
      {Command::generate_synthetic, "generate-synthetic", "Write a synthetic snapshot manifest"},
      {Command::pod, "pod", "Compute the POD and write a basis bundle"},
      {Command::verify, "verify", "Evaluate every error identity and bound"},
      {Command::sweep, "sweep", "Error table over a list of r values"},
      {Command::table, "table", "Print an aligned error table"},
  };
  std::vector<std::pair<CLI::App*, Command>> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--input", cfg.input, "Input manifest, config or report");
    sub->add_option("--output", cfg.output, "Output path");
    sub->add_option("--r", r_text, "Rank(s), comma separated allowed")->delimiter(',');
    sub->add_option("--r-list", r_list_text, "List of ranks")->delimiter(',');
    sub->add_option("--projector", cfg.projector, "Y projector family")
        ->check(CLI::IsMember({"orthogonal", "ritz", "composite-xy", "composite-yx"}));
    sub->add_option("--map", cfg.map, "Map spec (JSON text or file)");
    sub->add_option("--tol", tol, "Relative tolerance for identities")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_option("--nodes", cfg.nodes, "Finite element nodes");
    if (s.command == Command::generate_synthetic) {
      sub->add_option("--kind", cfg.kind, "Instance kind")
          ->check(CLI::IsMember({"random", "example1", "example2", "example3", "gr2"}));
      sub->add_option("--dim", cfg.dim, "Dimension for random instances")->check(CLI::PositiveNumber);
      sub->add_option("--count", cfg.count, "Snapshot count for random instances")->check(CLI::PositiveNumber);
    }
    apps.emplace_back(sub, s.command);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return {std::nullopt, ExitCode::ok};
  } catch (const CLI::ParseError& e) {
    emit_error(err, "UsageError", e.what(), ExitCode::input_error);
    return {std::nullopt, ExitCode::input_error};
  }
  for (auto& [sub, cmd] : apps)
    if (sub->parsed()) cfg.command = cmd;
  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--tol")) cfg.tol = tol;
  }
  try {
    for (const auto& t : r_text)
      for (Index r : parse_r_values(t)) cfg.r_list.push_back(r);
    for (const auto& t : r_list_text)
      for (Index r : parse_r_values(t)) cfg.r_list.push_back(r);
  } catch (const Error& e) {
    emit_error(err, std::string(e.name()), e.what(), ExitCode::input_error);
    return {std::nullopt, ExitCode::input_error};
  }
  return {cfg, ExitCode::ok};
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::generate_fhn: return cmd_generate_fhn(cfg, out);
      case Command::generate_synthetic: return cmd_generate_synthetic(cfg, out);
      case Command::pod: return cmd_pod(cfg, out);
      case Command::verify: return cmd_verify(cfg, out);
      case Command::sweep: return cmd_sweep(cfg, out);
      case Command::table: return cmd_table(cfg, out);
    }
  } catch (const Error& e) {
    const int code = error_class(e.code()) == ErrorClass::numerical ? ExitCode::numerical_error : ExitCode::input_error;
    emit_error(err, std::string(e.name()), e.what(), code);
    return code;
  } catch (const std::filesystem::filesystem_error& e) {
    emit_error(err, "IoError", e.what(), ExitCode::input_error);
    return ExitCode::input_error;
  } catch (const nlohmann::json::exception& e) {
    emit_error(err, "MalformedManifest", e.what(), ExitCode::input_error);
    return ExitCode::input_error;
  }
  return ExitCode::input_error;
}

int main(int argc, const char* const* argv) {
  const ParseResult parsed = parse_args(argc, argv, std::cout, std::cerr);
  if (!parsed.config) return parsed.exit_code;
  return run(*parsed.config, std::cout, std::cerr);
}

}  // namespace podkit::cli
