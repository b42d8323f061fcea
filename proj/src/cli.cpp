#include "affdim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "affdim/attractor.hpp"
#include "affdim/cone.hpp"
#include "affdim/errors.hpp"
#include "affdim/ifs.hpp"
#include "affdim/json_format.hpp"
#include "affdim/pressure.hpp"

namespace affdim {

using nlohmann::json;

namespace {

json matrix_json(const Mat2& m) { return json::array({{m.a, m.b}, {m.c, m.d}}); }

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("AFFDIM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 0;
}

SpectralOptions spectral_options(const RunConfig& config) {
  return {config.tol, config.max_order};
}

json validate_report(const IfsSystem& system, const RunConfig& config) {
  const OmegaReport omega = check_omega(system, {config.boundary_samples, config.margin});
  json details = json::array();
  for (const MapOmegaDetail& d : omega.per_map_detail) {
    details.push_back({{"index", d.index},
                       {"positive", d.positive},
                       {"det", d.det},
                       {"w_min", d.w_min},
                       {"image_margin", d.image_margin},
                       {"cond_i", d.cond_i},
                       {"cond_ii", d.cond_ii},
                       {"cond_iii", d.cond_iii}});
  }
  const ConeResult cone = find_invariant_cone(system, config.cone_depth, config.margin);
  const ContractionCertificate cert = estimate_jsr_upper(system, config.jsr_depth);
  json report;
  report["omega"] = {{"cond_i", omega.cond_i},
                     {"cond_ii", omega.cond_ii},
                     {"cond_iii", omega.cond_iii},
                     {"cond_iv", omega.cond_iv},
                     {"margins", omega.margins},
                     {"per_map_detail", details}};
  report["irreducible"] = check_irreducible(system);
  report["cone"] = {
      {"status", to_string(cone.status)},
      {"basis", cone.basis ? matrix_json(*cone.basis) : json(nullptr)},
      {"direction_arc", cone.direction_arc
                            ? json::array({cone.direction_arc->first, cone.direction_arc->second})
                            : json(nullptr)},
      {"epsilon_gamma", cone.epsilon_gamma ? json(*cone.epsilon_gamma) : json(nullptr)},
      {"note", cone.note}};
  report["contraction"] = {{"certified", cert.certified},
                           {"word_length", cert.word_length},
                           {"bound", number_or_null(cert.bound)},
                           {"bounds", cert.bounds}};
  return report;
}

json pressure_json(const PressureValue& p) {
  json doc = {{"s", p.s}, {"value", p.value}, {"method", to_string(p.method)}};
  json meta;
  if (p.method == PressureMethod::brute_force) {
    meta["word_length"] = p.word_length;
  } else {
    meta["order_used"] = p.order_used;
    meta["gap"] = number_or_null(p.gap);
  }
  meta["error_estimate"] = number_or_null(p.error_estimate);
  doc["meta"] = meta;
  doc["warnings"] = p.warnings;
  return doc;
}

json dimension_json(const DimensionResult& d) {
  return {{"s0", d.s0},
          {"residual", d.residual},
          {"dP_ds", number_or_null(d.dP_ds)},
          {"branch", d.branch},
          {"order_used", d.order_used},
          {"iterations", d.iterations},
          {"warnings", d.warnings}};
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "param_index,param_value,s0,residual,order_used,status\n";
  for (const SweepRow& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    os << r.param_index << ',' << format_double(r.param_value) << ','
       << (r.ok() ? format_double(r.s0) : "") << ',' << (r.ok() ? format_double(r.residual) : "")
       << ',' << r.order_used << ',' << status << '\n';
  }
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

int run_validate(const RunConfig& config, std::ostream& out) {
  const IfsSystem system = load_system(config.input);
  out << dump_json(validate_report(system, config)) << '\n';
  return 0;
}

int run_pressure(const RunConfig& config, std::ostream& out) {
  if (!config.s) throw std::invalid_argument("pressure: --s is required");
  const IfsSystem system = load_system(config.input);
  const std::string method = config.method.empty() ? "spectral" : config.method;
  PressureValue p;
  if (method == "spectral") {
    p = spectral_pressure(system, *config.s, spectral_options(config));
  } else if (method == "brute") {
    p = brute_force_pressure(system, *config.s, config.word_len);
  } else {
    throw std::invalid_argument("pressure: unknown --method '" + method + "'");
  }
  out << dump_json(pressure_json(p)) << '\n';
  return 0;
}

int run_dimension(const RunConfig& config, std::ostream& out) {
  const IfsSystem system = load_system(config.input);
  out << dump_json(dimension_json(affinity_dimension(system, spectral_options(config)))) << '\n';
  return 0;
}

int run_derivative(const RunConfig& config, std::ostream& out) {
  if (!config.s) throw std::invalid_argument("derivative: --s is required");
  const IfsSystem system = load_system(config.input);
  const double s = *config.s;
  const SpectralOptions opts = spectral_options(config);
  const std::string method = config.method.empty() ? "perturbation" : config.method;
  DerivativeResult d;
  if (config.wrt == "s") {
    if (method == "perturbation") {
      d = pressure_s_derivative(system, s, opts);
    } else if (method == "complex-step") {
      d = complex_step_s_derivative(system, s, config.step > 0 ? config.step : kComplexStep, opts);
    } else if (method == "central") {
      d = central_s_derivative(system, s, config.step > 0 ? config.step : kCentralStep, opts);
    } else {
      throw std::invalid_argument("derivative: unknown --method '" + method + "'");
    }
  } else {
    const std::size_t k = parse_parameter_ref(config.wrt);
    if (method == "perturbation") {
      d = perturbation_t_derivative(system, s, k, opts);
    } else if (method == "complex-step") {
      d = complex_step_t_derivative(system, s, k, config.step > 0 ? config.step : kComplexStep,
                                    opts);
    } else if (method == "central") {
      d = central_t_derivative(system, s, k, config.step > 0 ? config.step : kCentralStep, opts);
    } else {
      throw std::invalid_argument("derivative: unknown --method '" + method + "'");
    }
  }
  const json doc = {{"s", s},
                    {"wrt", config.wrt},
                    {"method", to_string(d.method)},
                    {"value", d.value},
                    {"order_used", d.order_used},
                    {"warnings", d.warnings}};
  out << dump_json(doc) << '\n';
  return 0;
}

int run_sweep(const RunConfig& config, std::ostream& out) {
  const IfsSystem system = load_system(config.input);
  const std::size_t k = parse_parameter_ref(config.param);
  const std::vector<SweepRow> rows = sweep(system, k, config.from, config.to, config.steps,
                                           spectral_options(config),
                                           resolve_threads(config.threads));
  std::string text;
  if (config.format == "json") {
    json doc = json::array();
    for (const SweepRow& r : rows) {
      doc.push_back({{"param_index", r.param_index},
                     {"param_value", r.param_value},
                     {"s0", number_or_null(r.s0)},
                     {"residual", number_or_null(r.residual)},
                     {"order_used", r.order_used},
                     {"status", r.status}});
    }
    text = dump_json(doc) + "\n";
  } else {
    text = sweep_csv(rows);
  }
  if (config.out_path.empty()) {
    out << text;
  } else {
    write_text(config.out_path, text);
    out << dump_json({{"rows", rows.size()}, {"out", config.out_path}}) << '\n';
  }
  return 0;
}

int run_attractor(const RunConfig& config, std::ostream& out) {
  const IfsSystem system = load_system(config.input);
  const AttractorCloud cloud = emit_attractor(system, config.points, config.seed);
  std::ostringstream csv;
  csv << "x,y\n";
  for (const Vec2& p : cloud.points) csv << format_double(p[0]) << ',' << format_double(p[1]) << '\n';
  if (config.out_path.empty()) {
    out << csv.str();
  } else {
    write_text(config.out_path, csv.str());
    out << dump_json({{"count", cloud.count},
                      {"seed", cloud.seed},
                      {"out", config.out_path},
                      {"radius_bound", number_or_null(attractor_radius_bound(system))}})
        << '\n';
  }
  return 0;
}

void report_error(std::ostream& err, const char* kind, const std::string& message,
                  std::optional<std::size_t> map_index = std::nullopt) {
  json doc = {{"error", kind}, {"message", message}};
  if (map_index) doc["map_index"] = *map_index;
  err << dump_json(doc) << '\n';
}

}  // namespace

void check_config(const RunConfig& config) {
  if (!(config.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const std::size_t n = config.max_order;
  if (n < 8 || n > 4096 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("max order must be a power of 2 between 8 and 4096");
  }
  if (config.word_len < 1) throw std::invalid_argument("word length must be >= 1");
  if (config.steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (config.boundary_samples < 8) throw std::invalid_argument("boundary samples must be >= 8");
  if (!(config.margin >= 0.0)) throw std::invalid_argument("margin must be nonnegative");
  if (config.format != "json" && config.format != "csv") {
    throw std::invalid_argument("format must be json or csv");
  }
}

std::size_t parse_parameter_ref(const std::string& text) {
  if (text.size() < 3 || text.compare(0, 2, "t:") != 0) {
    throw std::invalid_argument("expected a parameter reference t:<k>, got '" + text + "'");
  }
  const std::string digits = text.substr(2);
  if (!std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw std::invalid_argument("expected a parameter reference t:<k>, got '" + text + "'");
  }
  return static_cast<std::size_t>(std::stoull(digits));
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    check_config(config);
    const std::string& cmd = config.subcommand;
    if (cmd == "validate") return run_validate(config, out);
    if (cmd == "pressure") return run_pressure(config, out);
    if (cmd == "dimension") return run_dimension(config, out);
    if (cmd == "derivative") return run_derivative(config, out);
    if (cmd == "sweep") return run_sweep(config, out);
    if (cmd == "attractor") return run_attractor(config, out);
    throw std::invalid_argument("unknown subcommand '" + cmd + "'");
  } catch (const ValidationError& e) {
    report_error(err, "validation", e.what(), e.map_index());
    return 2;
  } catch (const std::logic_error& e) {
    report_error(err, "invalid_input", e.what());
    return 2;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sub-additive pressure and affinity dimension of planar affine IFSs", "affdim"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig config;
  app.add_option("--threads", config.threads, "Worker cap (fallback: AFFDIM_THREADS)");

  auto input = [&](CLI::App* sub) {
    sub->add_option("file", config.input, "System description (JSON)")->required();
  };
  auto spectral = [&](CLI::App* sub) {
    sub->add_option("--tol", config.tol, "Tolerance");
  };

  CLI::App* validate = app.add_subcommand("validate", "Check hypotheses and report");
  input(validate);
  validate->add_option("--samples", config.boundary_samples, "Boundary sample count");
  validate->add_option("--margin", config.margin, "Invariance margin");
  validate->add_option("--max-depth", config.cone_depth, "Cone discovery word depth");
  validate->add_option("--jsr-depth", config.jsr_depth, "Contraction word length limit");

  CLI::App* pressure = app.add_subcommand("pressure", "Evaluate P(s)");
  input(pressure);
  pressure->add_option("--s", config.s, "Exponent s")->required();
  pressure->add_option("--method", config.method, "spectral|brute");
  pressure->add_option("--order", config.max_order, "Maximum truncation order");
  pressure->add_option("--word-len", config.word_len, "Brute-force word length");
  spectral(pressure);

  CLI::App* dimension = app.add_subcommand("dimension", "Affinity dimension (root of P = 1)");
  input(dimension);
  spectral(dimension);
  dimension->add_option("--max-order", config.max_order, "Maximum truncation order");

  CLI::App* derivative = app.add_subcommand("derivative", "Derivative of P");
  input(derivative);
  derivative->add_option("--s", config.s, "Exponent s")->required();
  derivative->add_option("--wrt", config.wrt, "s or t:<k>");
  derivative->add_option("--method", config.method, "perturbation|complex-step|central");
  derivative->add_option("--step", config.step, "Step size");
  derivative->add_option("--max-order", config.max_order, "Maximum truncation order");
  spectral(derivative);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Affinity dimension along a parameter");
  input(sweep_cmd);
  sweep_cmd->add_option("--param", config.param, "t:<k>")->required();
  sweep_cmd->add_option("--from", config.from, "Start value")->required();
  sweep_cmd->add_option("--to", config.to, "End value")->required();
  sweep_cmd->add_option("--steps", config.steps, "Grid points")->required();
  sweep_cmd->add_option("--out", config.out_path, "CSV output path");
  sweep_cmd->add_option("--format", config.format, "csv|json");
  sweep_cmd->add_option("--max-order", config.max_order, "Maximum truncation order");
  spectral(sweep_cmd);

  CLI::App* attractor = app.add_subcommand("attractor", "Chaos-game sample of the attractor");
  input(attractor);
  attractor->add_option("--points", config.points, "Number of points")->required();
  attractor->add_option("--seed", config.seed, "Generator seed")->required();
  attractor->add_option("--out", config.out_path, "CSV output path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return 2;
  }
  for (CLI::App* sub : app.get_subcommands()) config.subcommand = sub->get_name();
  if (config.subcommand == "sweep" && sweep_cmd->count("--format") == 0) config.format = "csv";
  return run(config, out, err);
}

}  // namespace affdim
