// abflux: run interferometer layouts and the ring / Zeeman / Euler-Heisenberg
// calculators from the command line. Exit codes: 0 ok, 1 diagnostics or
// physics errors, 2 I/O.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ab/birefringence.hpp"
#include "ab/constants.hpp"
#include "ab/error.hpp"
#include "ab/ring.hpp"
#include "ab/scenarios.hpp"
#include "ab/setup_dsl.hpp"
#include "ab/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitIo = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  json meta = json::object();
};

std::string csv_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double v) const { return ab::format_double(v); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "1" : "0"; }
    std::string operator()(const std::string& v) const {
      if (v.find_first_of(",\"\n") == std::string::npos) return v;
      std::string quoted = "\"";
      for (char c : v) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      return quoted + "\"";
    }
  };
  return std::visit(Visitor{}, cell);
}

json json_cell(const Cell& cell) {
  struct Visitor {
    json operator()(std::monostate) const { return nullptr; }
    json operator()(double v) const { return v; }
    json operator()(long long v) const { return v; }
    json operator()(bool v) const { return v; }
    json operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

void emit(const Table& table, const std::string& format) {
  if (format == "json") {
    json out;
    out["command"] = table.command;
    out["columns"] = table.columns;
    json rows = json::array();
    for (const auto& row : table.rows) {
      json object = json::object();
      for (std::size_t i = 0; i < row.size(); ++i) object[table.columns[i]] = json_cell(row[i]);
      rows.push_back(std::move(object));
    }
    out["rows"] = std::move(rows);
    out["meta"] = table.meta;
    std::cout << out.dump(2) << '\n';
    return;
  }
  std::string text;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    text += (i ? "," : "") + table.columns[i];
  }
  text += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + csv_cell(row[i]);
    text += '\n';
  }
  std::cout << text;
}

std::string read_file(const std::string& name) {
  fs::path path(name);
  if (!fs::exists(path) && !path.has_parent_path()) {
    const fs::path shipped = fs::path(ABFLUX_DATA_DIR) / path;
    if (fs::exists(shipped)) path = shipped;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + name + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

double parse_mass(const std::string& text) {
  if (text == "electron") return ab::cgs::electron_mass;
  if (text == "proton") return ab::cgs::proton_mass;
  if (text == "muon") return ab::cgs::muon_mass;
  std::size_t used = 0;
  double grams = 0.0;
  try {
    grams = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(grams > 0.0)) {
    throw ab::Error("mass must be electron, proton, muon or a positive value in grams");
  }
  return grams;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string file;
  std::string sweep;
  std::optional<double> alpha;
  std::string gauge = "angle";
  double cut_angle = 0.0;
  int gauge_check = 0;
  unsigned seed = 1;
};

ab::GaugeChoice make_gauge(const std::string& name, double cut_angle) {
  if (name == "cut") return ab::singular_cut_from_angle(cut_angle);
  return ab::SubtendedAngleGauge{};
}

// Relative phase, probability and photon occupations. Branch phases are left
// out: they change with the gauge.
std::vector<double> observables(const ab::dsl::Setup& setup, const ab::ScenarioResult& r) {
  std::vector<double> values{r.relative_phase.value_or(NAN), r.postselection_probability};
  for (const auto& decl : setup.modes) {
    if (decl.mode.kind == ab::ModeKind::photon) {
      values.push_back(ab::mean_occupation(r.final_state, decl.mode.name));
    }
  }
  return values;
}

double max_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i]) && std::isnan(b[i])) continue;
    // relative_phase is an angle; compare on the circle.
    const double d = i == 0 ? ab::angular_distance(a[i], b[i]) : std::abs(a[i] - b[i]);
    worst = std::max(worst, std::isnan(d) ? INFINITY : d);
  }
  return worst;
}

int cmd_simulate(const SimulateOptions& opt, const std::string& out) {
  const std::string text = read_file(opt.file);
  ab::dsl::ParseResult parsed = ab::dsl::parse(text);
  std::vector<ab::dsl::Diagnostic> diagnostics = parsed.diagnostics;
  if (parsed.setup) {
    const auto more = ab::dsl::validate(*parsed.setup);
    diagnostics.insert(diagnostics.end(), more.begin(), more.end());
  }
  for (const auto& d : diagnostics) std::cerr << opt.file << ':' << ab::dsl::to_string(d) << '\n';
  if (!parsed.setup || ab::dsl::has_errors(diagnostics)) return kExitDiagnostics;
  const ab::dsl::Setup& setup = *parsed.setup;

  std::vector<double> alphas;
  if (!opt.sweep.empty()) {
    const ab::SweepSpec spec = ab::parse_sweep(opt.sweep);
    if (spec.parameter != "alpha") throw ab::Error("simulate sweeps only 'alpha'");
    alphas = spec.values();
  } else if (opt.alpha) {
    alphas = {*opt.alpha};
  }

  Table table;
  table.command = "simulate";
  table.columns = {"alpha", "relative_phase", "probability"};
  for (const auto& decl : setup.modes) {
    if (decl.mode.kind == ab::ModeKind::photon) table.columns.push_back("n_" + decl.mode.name);
  }
  for (const auto& decl : setup.paths) table.columns.push_back("phase_" + decl.mode);
  const ab::GaugeChoice gauge = make_gauge(opt.gauge, opt.cut_angle);
  table.meta["file"] = opt.file;
  table.meta["gauge"] = ab::describe(gauge);

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * ab::cgs::pi);
  double worst_gauge_deviation = 0.0;

  const auto run = [&](std::optional<double> alpha) {
    const ab::dsl::AlphaOverrides overrides =
        alpha ? ab::dsl::uniform_alpha(setup, *alpha) : ab::dsl::AlphaOverrides{};
    const ab::ScenarioResult result = ab::dsl::compile(setup, overrides, gauge);
    std::vector<double> values = observables(setup, result);
    for (int k = 0; k < opt.gauge_check; ++k) {
      const ab::ScenarioResult other =
          ab::dsl::compile(setup, overrides, ab::singular_cut_from_angle(angle(rng)));
      worst_gauge_deviation =
          std::max(worst_gauge_deviation, max_deviation(values, observables(setup, other)));
    }
    for (const auto& decl : setup.paths) values.push_back(result.branch_phases.at(decl.mode));
    std::vector<Cell> row;
    const double shown_alpha = alpha ? *alpha
                                     : (setup.fluxons.empty() ? 0.0 : setup.fluxons.front().fluxon.alpha);
    row.emplace_back(shown_alpha);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (std::isnan(values[i])) {
        row.emplace_back(std::monostate{});
      } else {
        row.emplace_back(values[i]);
      }
    }
    table.rows.push_back(std::move(row));
  };
  if (alphas.empty()) {
    run(std::nullopt);
  } else {
    for (double a : alphas) run(a);
  }

  if (opt.gauge_check > 0) {
    table.meta["gauge_check_cuts"] = opt.gauge_check;
    table.meta["gauge_check_max_deviation"] = worst_gauge_deviation;
    std::cerr << "gauge check: " << opt.gauge_check << " random cuts per row, max deviation "
              << ab::format_double(worst_gauge_deviation) << '\n';
  }
  emit(table, out);
  if (opt.gauge_check > 0 && worst_gauge_deviation > 1e-12) return kExitDiagnostics;
  return kExitOk;
}

// ---------------------------------------------------------------- ring

struct RingOptions {
  double radius = 1e-4;
  double beta = 1.0;
  int particles = 1;
  std::optional<double> omega;
  std::optional<double> lambda;
  std::string omega_sweep;
  std::string mass = "electron";
  std::string convention = "as_printed";
};

int cmd_ring(const RingOptions& opt, const std::string& out) {
  if (opt.omega && opt.lambda) throw ab::Error("give --omega or --lambda, not both");
  const double mass = parse_mass(opt.mass);
  const ab::SMatrixConvention convention = opt.convention == "from_amplitude"
                                               ? ab::SMatrixConvention::from_amplitude
                                               : ab::SMatrixConvention::as_printed;
  std::vector<ab::RingParams> points;
  if (!opt.omega_sweep.empty()) {
    const ab::SweepSpec spec = ab::parse_sweep("omega=" + opt.omega_sweep);
    for (double w : spec.values()) {
      points.push_back(ab::RingParams::with_frequency(opt.radius, opt.beta, opt.particles, w, mass));
    }
  } else if (opt.omega) {
    points.push_back(
        ab::RingParams::with_frequency(opt.radius, opt.beta, opt.particles, *opt.omega, mass));
  } else {
    points.push_back(ab::RingParams::with_wavelength(opt.radius, opt.beta, opt.particles,
                                                     opt.lambda.value_or(1e-4), mass));
  }

  Table table;
  table.command = "ring";
  table.columns = {"omega",        "lambda_bar",     "omega0",           "S_plus",
                   "S_minus",      "J_plus_im",      "J_minus_im",       "f_plus",
                   "f_minus",      "smatrix_plus_re", "smatrix_plus_im", "smatrix_minus_re",
                   "smatrix_minus_im", "delta_theta", "delta_theta_closed_form"};
  table.meta["radius"] = opt.radius;
  table.meta["beta"] = opt.beta;
  table.meta["N"] = opt.particles;
  table.meta["mass"] = mass;
  table.meta["convention"] = opt.convention;
  for (const ab::RingParams& p : points) {
    const ab::ResponseResult r = ab::ring_response(p, convention);
    std::vector<Cell> row{p.omega,           p.lambda_bar,        r.omega0,
                          r.s.plus.real(),   r.s.minus.real(),    r.j.plus.imag(),
                          r.j.minus.imag(),  r.f.plus.real(),     r.f.minus.real(),
                          r.smatrix.plus.real(), r.smatrix.plus.imag(), r.smatrix.minus.real(),
                          r.smatrix.minus.imag(), r.delta_theta};
    if (r.delta_theta_closed_form) {
      row.emplace_back(*r.delta_theta_closed_form);
    } else {
      row.emplace_back(std::monostate{});
    }
    table.rows.push_back(std::move(row));
  }
  emit(table, out);
  return kExitOk;
}

// ---------------------------------------------------------------- zeeman

struct ZeemanOptions {
  std::string sweep = "alpha=0:1:101";
  int m_range = 5;
  double radius = 1e-4;
  std::string mass = "electron";
};

int cmd_zeeman(const ZeemanOptions& opt, const std::string& out) {
  const ab::SweepSpec spec = ab::parse_sweep(opt.sweep);
  if (spec.parameter != "alpha") throw ab::Error("zeeman sweeps only 'alpha'");
  ab::RingParams ring;
  ring.radius = opt.radius;
  ring.mass = parse_mass(opt.mass);
  const double reference = ab::ab_zeeman_spectrum(0.0, opt.m_range, ring).ground_energy;

  Table table;
  table.command = "zeeman";
  table.columns = {"alpha", "ground_m", "ground_energy", "shift", "degenerate", "crossing"};
  table.meta["m_range"] = opt.m_range;
  json crossings = json::array();
  std::optional<int> previous_m;
  bool previous_degenerate = false;
  for (double alpha : spec.values()) {
    const ab::ZeemanSpectrum s = ab::ab_zeeman_spectrum(alpha, opt.m_range, ring);
    const bool degenerate = s.ground_levels.size() > 1;
    // A change right after a degenerate row was already reported on that row.
    const bool crossing =
        degenerate || (previous_m && *previous_m != s.ground_m && !previous_degenerate);
    if (crossing) crossings.push_back(alpha);
    previous_m = s.ground_m;
    previous_degenerate = degenerate;
    table.rows.push_back({alpha, static_cast<long long>(s.ground_m), s.ground_energy,
                          s.ground_energy - reference, degenerate, crossing});
  }
  table.meta["crossings"] = crossings;
  emit(table, out);
  return kExitOk;
}

// ---------------------------------------------------------------- eh

struct EhOptions {
  std::string sweep = "B=1:100:9:log";
  std::string mass = "electron";
  double theta = ab::cgs::pi / 2.0;
  std::optional<double> epsilon;
  std::optional<double> area;
};

int cmd_eh(const EhOptions& opt, const std::string& out) {
  const ab::SweepSpec spec = ab::parse_sweep(opt.sweep);
  if (spec.parameter != "B") throw ab::Error("eh sweeps only 'B'");
  ab::LoopModel base;
  base.mass = parse_mass(opt.mass);
  base.theta = opt.theta;
  base.epsilon = opt.epsilon;
  base.area = opt.area;

  const std::vector<double> fields = spec.values();
  const ab::ScalingFit fit = ab::net_phase_scaling(base, fields);
  const double ratio = ab::eh_birefringence_ratio();

  Table table;
  table.command = "eh";
  table.columns = {"B", "loop_phase", "epsilon", "net_phase", "fitted_exponent", "eh_ratio"};
  for (std::size_t i = 0; i < fields.size(); ++i) {
    ab::LoopModel model = base;
    model.field = fields[i];
    const Cell exponent = fit.exponent ? Cell{*fit.exponent} : Cell{std::string("none")};
    table.rows.push_back({fields[i], ab::loop_ab_phase(model), ab::orientation_asymmetry(model),
                          fit.net_phases[i], exponent, ratio});
  }
  table.meta["mass"] = base.mass;
  table.meta["theta"] = base.theta;
  table.meta["fitted_exponent"] = fit.exponent ? json(*fit.exponent) : json("none");
  table.meta["eh_ratio"] = ratio;
  emit(table, out);
  return kExitOk;
}

// ---------------------------------------------------------------- scenarios

int cmd_scenarios_list(const std::string& out) {
  Table table;
  table.command = "scenarios";
  table.columns = {"name", "file", "summary"};
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(ABFLUX_DATA_DIR, ec)) {
    if (entry.path().extension() == ".abl") files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list " + std::string(ABFLUX_DATA_DIR));
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    std::ifstream in(file);
    std::string first;
    std::getline(in, first);
    std::string summary = first.rfind("# ", 0) == 0 ? first.substr(2) : "";
    table.rows.push_back({file.stem().string(), file.string(), summary});
  }
  emit(table, out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aharonov-Bohm layouts and flux-response calculators"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out = "csv";
  app.add_option("--out", out, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Parse, validate and run a .abl layout");
  simulate->add_option("file", sim.file, "Layout file; bare names also search the shipped data")
      ->required();
  simulate->add_option("--sweep", sim.sweep, "alpha=start:stop:steps[:log]");
  simulate->add_option("--alpha", sim.alpha, "Set every fluxon to this flux (flux quanta)");
  simulate->add_option("--gauge", sim.gauge, "Gauge for path phases")
      ->check(CLI::IsMember({"angle", "cut"}))
      ->capture_default_str();
  simulate->add_option("--cut-angle", sim.cut_angle, "Cut direction for --gauge cut (rad)");
  simulate->add_option("--gauge-check", sim.gauge_check,
                       "Recompute each row with this many random cut gauges");
  simulate->add_option("--seed", sim.seed, "Seed for --gauge-check");

  RingOptions ring;
  auto* ring_cmd = app.add_subcommand("ring", "Flux-threaded ring response and Faraday rotation");
  ring_cmd->add_option("--R", ring.radius, "Ring radius (cm)")->capture_default_str();
  ring_cmd->add_option("--beta", ring.beta, "Flux in units of hc/e")->capture_default_str();
  ring_cmd->add_option("--N", ring.particles, "Particles on the ring")->capture_default_str();
  auto* omega_opt = ring_cmd->add_option("--omega", ring.omega, "Light frequency (rad/s)");
  ring_cmd->add_option("--lambda", ring.lambda, "Reduced wavelength c/omega (cm), default 1e-4")
      ->excludes(omega_opt);
  ring_cmd->add_option("--omega-sweep", ring.omega_sweep, "start:stop:steps[:log] in rad/s");
  ring_cmd->add_option("--mass", ring.mass, "electron | proton | muon | grams")
      ->capture_default_str();
  ring_cmd->add_option("--convention", ring.convention, "S-matrix convention")
      ->check(CLI::IsMember({"as_printed", "from_amplitude"}))
      ->capture_default_str();

  ZeemanOptions zeeman;
  auto* zeeman_cmd = app.add_subcommand("zeeman", "Ring levels versus flux");
  zeeman_cmd->add_option("--sweep", zeeman.sweep, "alpha=start:stop:steps")->capture_default_str();
  zeeman_cmd->add_option("--m-range", zeeman.m_range, "Angular momenta -M..M")
      ->capture_default_str();
  zeeman_cmd->add_option("--R", zeeman.radius, "Ring radius (cm)")->capture_default_str();
  zeeman_cmd->add_option("--mass", zeeman.mass, "electron | proton | muon | grams")
      ->capture_default_str();

  EhOptions eh;
  auto* eh_cmd = app.add_subcommand("eh", "Virtual pair loop net phase and vacuum birefringence");
  eh_cmd->add_option("--sweep", eh.sweep, "B=start:stop:steps[:log] in gauss")->capture_default_str();
  eh_cmd->add_option("--mass", eh.mass, "electron | proton | muon | grams")->capture_default_str();
  eh_cmd->add_option("--theta", eh.theta, "Angle between loop plane and B (rad)");
  eh_cmd->add_option("--epsilon", eh.epsilon, "Override the orientation asymmetry");
  eh_cmd->add_option("--area", eh.area, "Loop area (cm^2), default (hbar/mc)^2");

  auto* scenarios_cmd = app.add_subcommand("scenarios", "Shipped layouts");
  scenarios_cmd->require_subcommand(1);
  auto* list_cmd = scenarios_cmd->add_subcommand("list", "List shipped .abl files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitDiagnostics;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out);
    if (*ring_cmd) return cmd_ring(ring, out);
    if (*zeeman_cmd) return cmd_zeeman(zeeman, out);
    if (*eh_cmd) return cmd_eh(eh, out);
    if (*list_cmd) return cmd_scenarios_list(out);
  } catch (const IoError& e) {
    std::cerr << "abflux: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "abflux: " << e.what() << '\n';
    return kExitDiagnostics;
  }
  return kExitDiagnostics;
}
