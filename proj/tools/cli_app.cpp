#include "cli_app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "excires/errors.hpp"
#include "excires/io.hpp"
#include "excires/network.hpp"
#include "excires/optimize.hpp"
#include "excires/spectral.hpp"
#include "excires/transfer.hpp"

namespace excires::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr std::array<const char*, kParamCount> kCoordinateNames{
    "gamma3", "gamma4", "gamma5", "gamma6", "gamma7", "gamma8", "omega8", "h28"};

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParameterError(what + ": '" + text + "' is not a number");
  }
}

// "lo:hi" -> {lo, hi}
std::array<double, 2> parse_range(const std::string& spec, const std::string& what) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos || spec.find(':', colon + 1) != std::string::npos) {
    throw ParameterError(what + ": expected 'lo:hi', got '" + spec + "'");
  }
  const double lo = parse_double(spec.substr(0, colon), what);
  const double hi = parse_double(spec.substr(colon + 1), what);
  if (!(lo < hi)) throw ParameterError(what + ": need lo < hi, got '" + spec + "'");
  return {lo, hi};
}

// "min:max:steps" -> inclusive evenly spaced grid with `steps` points.
std::vector<double> parse_grid(const std::string& spec, const std::string& what) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string::npos || spec.find(':', c2 + 1) != std::string::npos) {
    throw ParameterError(what + ": expected 'min:max:steps', got '" + spec + "'");
  }
  const double lo = parse_double(spec.substr(0, c1), what);
  const double hi = parse_double(spec.substr(c1 + 1, c2 - c1 - 1), what);
  const double steps_val = parse_double(spec.substr(c2 + 1), what);
  const long steps = std::lround(steps_val);
  if (steps < 1 || steps != steps_val) {
    throw ParameterError(what + ": steps must be a positive integer, got '" + spec + "'");
  }
  if (steps == 1) {
    if (lo != hi) throw ParameterError(what + ": a single step needs min == max");
    return {lo};
  }
  std::vector<double> grid(static_cast<std::size_t>(steps));
  for (long i = 0; i < steps; ++i) {
    grid[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  return grid;
}

struct CommonOptions {
  std::string network_path = "data/fmo_adolphs_renger.json";
  std::vector<double> gammas{59.6, 90.0, 50.3, 59.7, 89.7};  // Gamma_3..Gamma_7
  double gamma_sink = 50.1;
  double omega8 = -500.0;
  double h28 = 327.0;
  std::string window_spec;  // "lo:hi" override, empty = default window

  std::vector<double> rate_vector() const {
    std::vector<double> rates = gammas;
    rates.push_back(gamma_sink);
    return rates;
  }
  ParameterVector parameter_vector() const {
    return {gammas[0], gammas[1], gammas[2], gammas[3], gammas[4],
            gamma_sink, omega8,    h28};
  }
};

void add_network_option(CLI::App* sub, CommonOptions& opt) {
  sub->add_option("--network", opt.network_path, "Network JSON file")
      ->capture_default_str();
}

void add_rate_options(CLI::App* sub, CommonOptions& opt) {
  sub->add_option("--gamma", opt.gammas,
                  "Decoherence rates Gamma_3..Gamma_7 (cm^-1), highest bath "
                  "eigenstate first")
      ->expected(5)
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--gamma-sink", opt.gamma_sink, "Sink rate Gamma_8 (cm^-1)")
      ->capture_default_str();
}

void add_sink_options(CLI::App* sub, CommonOptions& opt) {
  sub->add_option("--omega8", opt.omega8, "Sink energy omega_8 (cm^-1)")
      ->capture_default_str();
  sub->add_option("--h28", opt.h28, "Acceptor-sink coupling h_28 (cm^-1)")
      ->capture_default_str();
}

void add_window_option(CLI::App* sub, CommonOptions& opt) {
  sub->add_option("--window", opt.window_spec,
                  "Integration window 'lo:hi' (cm^-1); default spans every "
                  "bath line plus 20 widths");
}

std::vector<double> density_seed(const SpectralProfile& p, const QuadratureWindow& w) {
  try {
    return {renormalized_frequency(p, w)};
  } catch (const ConvergenceError&) {
    return {};
  }
}

struct Pipeline {
  ExcitonNetwork net;
  SystemPartition part;
  BathSpectrum bath;
  SpectralProfile f1, f2;
  QuadratureWindow window;
  NormalizedDensity d1, d2;
};

Pipeline build_pipeline(const CommonOptions& opt) {
  Pipeline p;
  p.net = load_network(opt.network_path);
  const SinkParameters sink{opt.omega8, opt.h28, opt.gamma_sink};
  p.part = partition(p.net, sink);
  p.bath = diagonalize_bath(p.part, opt.rate_vector());
  p.f1 = donor_profile(p.part, p.bath);
  p.f2 = acceptor_profile(p.part, p.bath);
  if (opt.window_spec.empty()) {
    p.window = default_window(p.f1, p.f2);
  } else {
    const auto r = parse_range(opt.window_spec, "--window");
    p.window = {r[0], r[1], 1e-9};
  }
  p.d1 = normalize_density(p.f1, p.window, density_seed(p.f1, p.window));
  p.d2 = normalize_density(p.f2, p.window, density_seed(p.f2, p.window));
  return p;
}

void ensure_parent_directory(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

ordered_json record_to_json(const SearchRecord& rec) {
  ordered_json params = ordered_json::object();
  for (int k = 0; k < kParamCount; ++k) {
    params[kCoordinateNames[k]] = rec.parameters[k];
  }
  ordered_json contacts = ordered_json::array();
  for (int k : rec.boundary_contacts) contacts.push_back(kCoordinateNames[k]);
  return ordered_json{{"objective", rec.objective},
                      {"parameters", params},
                      {"seed", rec.seed},
                      {"evaluations", rec.evaluations},
                      {"provenance", rec.provenance},
                      {"boundary_contacts", contacts}};
}

// ---------------------------------------------------------------- validate
int cmd_validate(const CommonOptions& opt) {
  const ExcitonNetwork net = load_network(opt.network_path);
  std::cout << "constraints satisfied: " << net.n_sites << " sites (donor, acceptor, "
            << net.n_sites - 3 << " bath pigments, sink)";
  if (!net.label.empty()) std::cout << " — " << net.label;
  std::cout << "\n";
  return 0;
}

// ---------------------------------------------------------------- spectra
int cmd_spectra(const CommonOptions& opt, int points, const std::string& out) {
  if (points < 2) throw ParameterError("--points must be at least 2");
  const Pipeline p = build_pipeline(opt);

  ResultTable table;
  table.columns = {"omega", "gamma1", "gamma2", "delta1",
                   "delta2", "f1",     "f2",     "sqrt_f1f2"};
  const double step = (p.window.upper - p.window.lower) / (points - 1);
  for (int i = 0; i < points; ++i) {
    const double omega = p.window.lower + i * step;
    const double v1 = p.d1(omega);
    const double v2 = p.d2(omega);
    table.rows.push_back({omega, decay_rate(p.f1, omega), decay_rate(p.f2, omega),
                          energy_shift(p.f1, omega), energy_shift(p.f2, omega), v1,
                          v2, std::sqrt(v1 * v2)});
  }
  ensure_parent_directory(out);
  write_csv(table, out);
  std::cout << "wrote " << out << " (" << points << " rows, window ["
            << fmt("%.6g", p.window.lower) << ", " << fmt("%.6g", p.window.upper)
            << "] cm^-1)\n";
  return 0;
}

// ---------------------------------------------------------------- resonance
int cmd_resonance(const CommonOptions& opt, const std::string& out) {
  const Pipeline p = build_pipeline(opt);
  const ResonanceSummary s = resonance_summary(p.d1, p.d2);
  const double overlap = overlap_efficiency(p.d1.view(), p.d2.view());

  ordered_json doc{
      {"network", opt.network_path},
      {"sink", ordered_json{{"omega8", opt.omega8},
                            {"h28", opt.h28},
                            {"gamma8", opt.gamma_sink}}},
      {"rates", opt.gammas},
      {"window", ordered_json{{"lower", p.window.lower}, {"upper", p.window.upper}}},
      {"renormalized_donor", s.renorm_donor},
      {"renormalized_acceptor", s.renorm_acceptor},
      {"width_donor", s.width_donor},
      {"width_acceptor", s.width_acceptor},
      {"resonance_frequency", s.resonance_frequency},
      {"effective_width", s.effective_width},
      {"detuning", s.detuning},
      {"overlap_efficiency", overlap}};
  ensure_parent_directory(out);
  write_json(doc, out);
  std::cout << "omega0 = " << fmt("%.4f", s.resonance_frequency)
            << " cm^-1, effective width = " << fmt("%.4f", s.effective_width)
            << " cm^-1, detuning = " << fmt("%.4f", s.detuning)
            << " cm^-1, F = " << fmt("%.6f", overlap) << "\nwrote " << out << "\n";
  return 0;
}

// ---------------------------------------------------------------- transfer
struct TransferOptions {
  std::string tau_model = "constant";
  double tau_ps = 0.1;
  std::string kappa_spec;  // "lo:hi" in ps/(cm^-1)^2; empty = +-50/gamma^3
  std::string t0_spec;     // "lo:hi" in ps; empty = tau +- 10/gamma
  std::string out = "transfer.json";
};

int cmd_transfer(const CommonOptions& opt, const TransferOptions& topt) {
  const Pipeline p = build_pipeline(opt);
  const ResonanceSummary s = resonance_summary(p.d1, p.d2);
  const double overlap = overlap_efficiency(p.d1.view(), p.d2.view());

  PhaseModel model;
  model.resonance_frequency = s.resonance_frequency;
  model.width = s.effective_width;
  model.tau0 = topt.tau_ps / kPicosecondsPerUnit;
  if (topt.tau_model == "constant") {
    model.tau_model = TauModel::constant;
  } else if (topt.tau_model == "quadratic") {
    model.tau_model = TauModel::quadratic;
  } else {
    throw ParameterError("--tau-model must be 'constant' or 'quadratic', got '" +
                         topt.tau_model + "'");
  }

  std::optional<KappaRange> kappa_range;
  if (model.tau_model == TauModel::quadratic) {
    if (topt.kappa_spec.empty()) {
      const double g3 = std::pow(model.width, 3);
      kappa_range = KappaRange{-50.0 / g3, 50.0 / g3};
    } else {
      const auto r = parse_range(topt.kappa_spec, "--kappa");
      kappa_range = KappaRange{r[0] / kPicosecondsPerUnit, r[1] / kPicosecondsPerUnit};
    }
  }
  std::optional<std::array<double, 2>> bracket;
  if (!topt.t0_spec.empty()) {
    const auto r = parse_range(topt.t0_spec, "--t0");
    bracket = {{r[0] / kPicosecondsPerUnit, r[1] / kPicosecondsPerUnit}};
  }

  const ArrivalResult res =
      optimize_arrival(p.d1.view(), p.d2.view(), model, kappa_range, bracket);
  const double phase_factor = overlap > 0.0 ? res.probability / overlap : 0.0;

  ordered_json doc{{"tau_model", topt.tau_model},
                   {"tau_ps", topt.tau_ps},
                   {"resonance_frequency", model.resonance_frequency},
                   {"width", model.width},
                   {"t0_opt_ps", res.arrival_time * kPicosecondsPerUnit},
                   {"kappa_ps", res.kappa * kPicosecondsPerUnit},
                   {"P_opt", res.probability},
                   {"F", overlap},
                   {"phase_factor", phase_factor},
                   {"evaluations", res.evaluations}};
  ensure_parent_directory(topt.out);
  write_json(doc, topt.out);
  std::cout << "P_opt = " << fmt("%.6f", res.probability) << " at t0 = "
            << fmt("%.6f", res.arrival_time * kPicosecondsPerUnit) << " ps (F = "
            << fmt("%.6f", overlap) << ", phase factor = " << fmt("%.6f", phase_factor)
            << ")\nwrote " << topt.out << "\n";
  return 0;
}

// ---------------------------------------------------------------- bounce
int cmd_bounce(double p, double q, long n, const std::string& out) {
  const BounceParameters bp{p, q};
  const double eta_n = bounce_efficiency(bp, n);
  const AsymptoticEfficiency ae = asymptotic_efficiency(bp);
  std::cout << "eta(" << n << ") = " << fmt("%.4f", eta_n) << "\n"
            << "eta(inf) = " << fmt("%.4f", ae.exact) << "\n"
            << "eta(inf) first-order in q = " << fmt("%.4f", ae.first_order_in_q)
            << "\n";
  if (!out.empty()) {
    ordered_json doc{{"p", p},
                     {"q", q},
                     {"n", n},
                     {"eta_n", eta_n},
                     {"eta_inf", ae.exact},
                     {"eta_inf_first_order", ae.first_order_in_q}};
    ensure_parent_directory(out);
    write_json(doc, out);
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- optimize
struct OptimizeOptions {
  long budget = 10000;
  int workers = 1;
  int top_k = 10;
  bool refine = true;
  std::string bounds_file;
  std::string out_dir = ".";
  std::uint64_t seed = kDefaultSeed;
  std::string seed_source = "default";
};

ParameterBounds load_bounds(const std::string& path) {
  ParameterBounds bounds;
  if (path.empty()) return bounds;
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open bounds file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("bounds file is not valid JSON: " + std::string(e.what()));
  }
  const auto read_range = [&](const char* key, std::array<double, 2>& target) {
    if (!doc.contains(key)) return;
    const auto& v = doc[key];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw FormatError(std::string("bounds file: '") + key +
                        "' must be a [lower, upper] pair");
    }
    target = {v[0].get<double>(), v[1].get<double>()};
  };
  read_range("gamma", bounds.gamma_range);
  read_range("omega8", bounds.omega8_range);
  read_range("h28", bounds.h28_range);
  return bounds;
}

int cmd_optimize(const CommonOptions& copt, const OptimizeOptions& oopt) {
  const ExcitonNetwork net = load_network(copt.network_path);
  const ParameterBounds bounds = load_bounds(oopt.bounds_file);

  const SearchResult search = random_search(net, bounds, oopt.budget, oopt.seed,
                                            oopt.workers, oopt.top_k);
  SearchRecord best = search.best;
  std::vector<SearchRecord> refined;
  if (oopt.refine) {
    for (const SearchRecord& rec : search.top) {
      refined.push_back(refine_local(net, rec.parameters, bounds));
      if (refined.back().objective > best.objective) best = refined.back();
    }
  }

  fs::create_directories(oopt.out_dir);
  const std::string json_path = (fs::path(oopt.out_dir) / "optimize.json").string();
  const std::string csv_path = (fs::path(oopt.out_dir) / "evaluations.csv").string();

  ordered_json doc;
  doc["metadata"] =
      ordered_json{{"network", copt.network_path},
                   {"seed", oopt.seed},
                   {"seed_source", oopt.seed_source},
                   {"budget", oopt.budget},
                   {"workers", oopt.workers},
                   {"top_k", oopt.top_k},
                   {"refine", oopt.refine},
                   {"bounds", ordered_json{{"gamma", bounds.gamma_range},
                                           {"omega8", bounds.omega8_range},
                                           {"h28", bounds.h28_range}}}};
  doc["best"] = record_to_json(best);
  doc["best_sampled"] = record_to_json(search.best);
  doc["top"] = ordered_json::array();
  for (const SearchRecord& rec : search.top) doc["top"].push_back(record_to_json(rec));
  doc["refined"] = ordered_json::array();
  for (const SearchRecord& rec : refined) doc["refined"].push_back(record_to_json(rec));
  doc["failed_evaluations"] = search.failed_evaluations;
  write_json(doc, json_path);

  ResultTable table;
  table.columns = {"index",  "gamma3", "gamma4", "gamma5", "gamma6", "gamma7",
                   "gamma8", "omega8", "h28",    "objective", "ok"};
  for (const EvaluationRow& row : search.evaluations) {
    std::vector<double> r;
    r.push_back(static_cast<double>(row.index));
    for (double v : row.parameters) r.push_back(v);
    r.push_back(row.objective);
    r.push_back(row.ok ? 1.0 : 0.0);
    table.rows.push_back(std::move(r));
  }
  write_csv(table, csv_path);

  std::cout << "best F = " << fmt("%.6f", best.objective) << " (" << best.provenance
            << ") at omega8 = " << fmt("%.2f", best.parameters[6]) << ", h28 = "
            << fmt("%.2f", best.parameters[7]) << "; |omega8|/h28 = "
            << fmt("%.4f", std::abs(best.parameters[6]) /
                               std::max(best.parameters[7], 1e-12))
            << "\nfailed evaluations: " << search.failed_evaluations << "\nwrote "
            << json_path << ", " << csv_path << "\n";
  return 0;
}

// ---------------------------------------------------------------- sweep
int cmd_sweep(const CommonOptions& opt, const std::string& h28_spec,
              const std::string& omega8_spec, const std::string& out) {
  const ExcitonNetwork net = load_network(opt.network_path);
  const std::vector<double> h28s = parse_grid(h28_spec, "--h28");
  const std::vector<double> omega8s = parse_grid(omega8_spec, "--omega8");
  const std::array<double, 6> gamma_values{opt.gammas[0], opt.gammas[1],
                                           opt.gammas[2], opt.gammas[3],
                                           opt.gammas[4], opt.gamma_sink};
  const SweepResult res = grid_sweep(net, h28s, omega8s, gamma_values);

  ResultTable table;
  table.columns = {"h28", "omega8", "F", "ok"};
  for (std::size_t i = 0; i < h28s.size(); ++i) {
    for (std::size_t j = 0; j < omega8s.size(); ++j) {
      const std::size_t cell = i * omega8s.size() + j;
      table.rows.push_back({h28s[i], omega8s[j], res.values[cell],
                            res.ok[cell] ? 1.0 : 0.0});
    }
  }
  ensure_parent_directory(out);
  write_csv(table, out);

  double best = -1.0;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < h28s.size(); ++i) {
    for (std::size_t j = 0; j < omega8s.size(); ++j) {
      const std::size_t cell = i * omega8s.size() + j;
      if (res.ok[cell] && res.values[cell] > best) {
        best = res.values[cell];
        bi = i;
        bj = j;
      }
    }
  }
  std::cout << "wrote " << out << " (" << table.rows.size() << " cells)\n";
  if (best >= 0.0) {
    std::cout << "grid max F = " << fmt("%.6f", best) << " at h28 = "
              << fmt("%.2f", h28s[bi]) << ", omega8 = " << fmt("%.2f", omega8s[bj])
              << " (|omega8|/h28 = "
              << fmt("%.4f", std::abs(omega8s[bj]) / std::max(h28s[bi], 1e-12))
              << ")\n";
  }
  return 0;
}

// ---------------------------------------------------------------- tempsweep
struct TempSweepOptions {
  double tmin = 20.0;
  double tmax = 1000.0;
  long steps = 40;
  bool linear = false;
  double t0 = 77.0;
  std::string out = "tempsweep.csv";
};

int cmd_tempsweep(const CommonOptions& opt, const TempSweepOptions& topt) {
  if (topt.steps < 1) throw ParameterError("--steps must be at least 1");
  if (!(topt.tmin > 0.0) || !(topt.tmax >= topt.tmin)) {
    throw ParameterError("need 0 < tmin <= tmax");
  }
  const ExcitonNetwork net = load_network(opt.network_path);

  std::vector<double> grid(static_cast<std::size_t>(topt.steps));
  if (topt.steps == 1) {
    grid[0] = topt.tmin;
  } else {
    for (long i = 0; i < topt.steps; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(topt.steps - 1);
      grid[static_cast<std::size_t>(i)] =
          topt.linear ? topt.tmin + s * (topt.tmax - topt.tmin)
                      : topt.tmin * std::pow(topt.tmax / topt.tmin, s);
    }
  }

  const auto curve = temperature_sweep(net, opt.parameter_vector(), grid, topt.t0);

  ResultTable table;
  table.columns = {"temperature", "F"};
  for (const auto& [t, f] : curve) table.rows.push_back({t, f});
  ensure_parent_directory(topt.out);
  write_csv(table, topt.out);

  const auto peak = std::max_element(
      curve.begin(), curve.end(),
      [](const auto& a, const auto& b) { return a.second < b.second; });
  std::cout << "wrote " << topt.out << " (" << curve.size() << " points, "
            << (topt.linear ? "linear" : "geometric") << " grid)\n";
  if (peak != curve.end()) {
    std::cout << "peak F = " << fmt("%.6f", peak->second) << " at T = "
              << fmt("%.2f", peak->first) << " K\n";
  }
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"Excitonic energy-transfer resonance toolkit"};
  app.name("excires");

  CommonOptions validate_opt;
  CLI::App* sub_validate = app.add_subcommand(
      "validate", "Check a network file against the structural constraints");
  add_network_option(sub_validate, validate_opt);

  CommonOptions spectra_opt;
  int spectra_points = 2000;
  std::string spectra_out = "spectra.csv";
  CLI::App* sub_spectra = app.add_subcommand(
      "spectra", "Emit decay rates, energy shifts, and emission densities as CSV");
  add_network_option(sub_spectra, spectra_opt);
  add_rate_options(sub_spectra, spectra_opt);
  add_sink_options(sub_spectra, spectra_opt);
  add_window_option(sub_spectra, spectra_opt);
  sub_spectra->add_option("--points", spectra_points, "Grid points across the window")
      ->capture_default_str();
  sub_spectra->add_option("--out", spectra_out, "Output CSV path")
      ->capture_default_str();

  CommonOptions resonance_opt;
  std::string resonance_out = "resonance.json";
  CLI::App* sub_resonance = app.add_subcommand(
      "resonance",
      "Report renormalized frequencies, widths, detuning, and overlap");
  add_network_option(sub_resonance, resonance_opt);
  add_rate_options(sub_resonance, resonance_opt);
  add_sink_options(sub_resonance, resonance_opt);
  add_window_option(sub_resonance, resonance_opt);
  sub_resonance->add_option("--out", resonance_out, "Output JSON path")
      ->capture_default_str();

  CommonOptions transfer_opt;
  TransferOptions transfer_extra;
  CLI::App* sub_transfer = app.add_subcommand(
      "transfer", "Optimize the arrival time (and kappa) for the transfer probability");
  add_network_option(sub_transfer, transfer_opt);
  add_rate_options(sub_transfer, transfer_opt);
  add_sink_options(sub_transfer, transfer_opt);
  add_window_option(sub_transfer, transfer_opt);
  sub_transfer
      ->add_option("--tau-model", transfer_extra.tau_model,
                   "Flight-time model: constant | quadratic")
      ->capture_default_str();
  sub_transfer->add_option("--tau", transfer_extra.tau_ps, "Flight time tau (ps)")
      ->capture_default_str();
  sub_transfer->add_option(
      "--kappa", transfer_extra.kappa_spec,
      "Kappa range 'lo:hi' in ps/(cm^-1)^2 for the quadratic model; default "
      "+-50/width^3");
  sub_transfer->add_option("--t0", transfer_extra.t0_spec,
                           "Arrival-time bracket 'lo:hi' in ps; default tau +- "
                           "10/width");
  sub_transfer->add_option("--out", transfer_extra.out, "Output JSON path")
      ->capture_default_str();

  double bounce_p = 0.5, bounce_q = 1e-3;
  long bounce_n = 5;
  std::string bounce_out;
  CLI::App* sub_bounce = app.add_subcommand(
      "bounce", "Compound efficiency of the bouncing-exciton exchange");
  sub_bounce->add_option("--p", bounce_p, "Per-shot sink-dissipation probability")
      ->capture_default_str();
  sub_bounce->add_option("--q", bounce_q, "Per-flight recombination probability")
      ->capture_default_str();
  sub_bounce->add_option("--n", bounce_n, "Number of shots")->capture_default_str();
  sub_bounce->add_option("--out", bounce_out, "Optional JSON output path");

  CommonOptions optimize_copt;
  OptimizeOptions optimize_opt;
  CLI::App* sub_optimize = app.add_subcommand(
      "optimize", "Random search plus local refinement over the sink parameters");
  add_network_option(sub_optimize, optimize_copt);
  sub_optimize->add_option("--budget", optimize_opt.budget, "Random-search evaluations")
      ->capture_default_str();
  CLI::Option* seed_flag =
      sub_optimize->add_option("--seed", optimize_opt.seed,
                               "Search seed (overrides the " +
                                   std::string(kSeedEnvironmentVariable) +
                                   " environment variable and the built-in default)");
  sub_optimize->add_option("--workers", optimize_opt.workers, "Worker threads")
      ->capture_default_str();
  sub_optimize->add_option("--top-k", optimize_opt.top_k, "Candidates kept for refinement")
      ->capture_default_str();
  sub_optimize->add_flag("--refine,!--no-refine", optimize_opt.refine,
                         "Refine the top candidates with simplex descent");
  sub_optimize->add_option("--bounds-file", optimize_opt.bounds_file,
                           "JSON bounds override: {\"gamma\": [lo,hi], \"omega8\": "
                           "[lo,hi], \"h28\": [lo,hi]}");
  sub_optimize->add_option("--out-dir", optimize_opt.out_dir, "Output directory")
      ->capture_default_str();

  CommonOptions sweep_opt;
  std::string sweep_h28 = "0:600:61";
  std::string sweep_omega8 = "-500:0:51";
  std::string sweep_out = "sweep.csv";
  CLI::App* sub_sweep = app.add_subcommand(
      "sweep", "Overlap efficiency over an (h28, omega8) grid at fixed rates");
  add_network_option(sub_sweep, sweep_opt);
  add_rate_options(sub_sweep, sweep_opt);
  sub_sweep->add_option("--h28", sweep_h28, "h28 grid 'min:max:steps' (cm^-1)")
      ->capture_default_str();
  sub_sweep->add_option("--omega8", sweep_omega8, "omega8 grid 'min:max:steps' (cm^-1)")
      ->capture_default_str();
  sub_sweep->add_option("--out", sweep_out, "Output CSV path")->capture_default_str();

  CommonOptions temp_opt;
  TempSweepOptions temp_extra;
  CLI::App* sub_temp = app.add_subcommand(
      "tempsweep", "Overlap efficiency versus temperature (rates scale as T/T0)");
  add_network_option(sub_temp, temp_opt);
  add_rate_options(sub_temp, temp_opt);
  add_sink_options(sub_temp, temp_opt);
  sub_temp->add_option("--tmin", temp_extra.tmin, "Lowest temperature (K)")
      ->capture_default_str();
  sub_temp->add_option("--tmax", temp_extra.tmax, "Highest temperature (K)")
      ->capture_default_str();
  sub_temp->add_option("--steps", temp_extra.steps, "Grid points")
      ->capture_default_str();
  sub_temp->add_flag("--linear", temp_extra.linear,
                     "Linear temperature grid (default geometric)");
  sub_temp->add_option("--t0", temp_extra.t0, "Reference temperature (K)")
      ->capture_default_str();
  sub_temp->add_option("--out", temp_extra.out, "Output CSV path")
      ->capture_default_str();

  // An unrecognized first token is a usage error in the subcommand sense, not
  // a bad flag value, so it gets its own exit code and the full command list.
  constexpr std::array<std::string_view, 8> kSubcommands{
      "validate", "spectra",  "resonance", "transfer",
      "bounce",   "optimize", "sweep",     "tempsweep"};
  if (args.empty() ||
      (args[0][0] != '-' &&
       std::find(kSubcommands.begin(), kSubcommands.end(), args[0]) ==
           kSubcommands.end())) {
    if (!args.empty()) std::cerr << "unknown subcommand: '" << args[0] << "'\n";
    std::cerr << app.help();
    return 64;
  }

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("excires");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (app.got_subcommand(sub_validate)) return cmd_validate(validate_opt);
    if (app.got_subcommand(sub_spectra)) {
      return cmd_spectra(spectra_opt, spectra_points, spectra_out);
    }
    if (app.got_subcommand(sub_resonance)) {
      return cmd_resonance(resonance_opt, resonance_out);
    }
    if (app.got_subcommand(sub_transfer)) {
      return cmd_transfer(transfer_opt, transfer_extra);
    }
    if (app.got_subcommand(sub_bounce)) {
      return cmd_bounce(bounce_p, bounce_q, bounce_n, bounce_out);
    }
    if (app.got_subcommand(sub_optimize)) {
      if (seed_flag->count() > 0) {
        optimize_opt.seed_source = "flag";
      } else if (const char* env = std::getenv(kSeedEnvironmentVariable);
                 env != nullptr && *env != '\0') {
        try {
          std::size_t pos = 0;
          const std::string text(env);
          const unsigned long long v = std::stoull(text, &pos);
          if (pos != text.size()) throw std::invalid_argument(text);
          optimize_opt.seed = v;
          optimize_opt.seed_source = "environment";
        } catch (const std::exception&) {
          throw ParameterError(std::string(kSeedEnvironmentVariable) +
                               " must be an unsigned integer, got '" + env + "'");
        }
      }
      return cmd_optimize(optimize_copt, optimize_opt);
    }
    if (app.got_subcommand(sub_sweep)) {
      return cmd_sweep(sweep_opt, sweep_h28, sweep_omega8, sweep_out);
    }
    if (app.got_subcommand(sub_temp)) return cmd_tempsweep(temp_opt, temp_extra);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::cerr << app.help();
  return 64;
}

}  // namespace excires::cli
