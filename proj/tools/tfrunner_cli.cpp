// tfrunner: command line front end. Every subcommand prints one JSON document
// on standard output.
//
// Exit codes: 0 success, 2 numerical dependence, 3 inconclusive, 64 usage.

#include "tfrunner/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace {

using tfr::io::json;

constexpr int kUsage = 64;
constexpr int kInconclusive = 3;

struct Output {
  json doc;
  int code = 0;
};

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

/// Splits "0,1/2,0.25" and parses each entry as an exact rational.
std::optional<std::vector<tfr::Rational>> as_rationals(const std::vector<std::string>& items) {
  std::vector<tfr::Rational> out;
  try {
    for (const auto& s : items) out.push_back(tfr::parse_rational(s));
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  return out;
}

std::vector<double> as_doubles(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) {
      // Accept "p/q" as well.
      v = tfr::to_double(tfr::parse_rational(s));
    }
    out.push_back(v);
  }
  return out;
}

tfr::ExactFrequencies rational_values(const std::vector<tfr::Rational>& qs) {
  tfr::ExactFrequencies ex{tfr::RealBasis(), {}};
  for (const auto& q : qs) ex.values.push_back(tfr::ExactReal::rational(q, 1));
  return ex;
}

tfr::RunnerInstance runner_instance(const std::vector<std::string>& v, const std::vector<std::string>& s) {
  tfr::RunnerInstance inst;
  inst.velocities = as_doubles(v);
  inst.starts = s.empty() ? std::vector<double>(inst.velocities.size(), 0.0) : as_doubles(s);
  if (auto q = as_rationals(v)) inst.exact = rational_values(*q);
  inst.validate();
  return inst;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw tfr::io::ParseError("cannot write '" + path + "'");
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  out.precision(17);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-frequency translates, lonely runners and Gabor-system independence"};
  app.require_subcommand(1);
  Output result;

  // ---------------------------------------------------------------- affine-dim
  auto* affine = app.add_subcommand("affine-dim", "Affine dimension over Q of a finite set of reals");
  std::vector<std::string> omegas;
  std::string exact_file;
  affine->add_option("--omegas", omegas, "Comma-separated values; rationals are treated exactly")->delimiter(',');
  affine->add_option("--exact", exact_file, "JSON file {basis, values} with exact values");
  bool force_float = false;
  affine->add_flag("--float", force_float, "Treat the values as floating point (heuristic relation search)");
  affine->callback([&] {
    if (!exact_file.empty()) {
      auto ex = tfr::io::exact_values_from_json(tfr::io::read_json_file(exact_file));
      result.doc = {{"affine_dimension", tfr::affine_dimension(ex.values)}, {"exact", true}};
    } else if (auto q = as_rationals(omegas); !force_float && q && !q->empty()) {
      result.doc = {{"affine_dimension", tfr::affine_dimension(rational_values(*q).values)}, {"exact", true}};
    } else {
      if (omegas.empty()) throw CLI::ValidationError("--omegas or --exact is required");
      result.doc = {{"affine_dimension", tfr::float_affine_dimension(as_doubles(omegas))}, {"exact", false},
                    {"heuristic", true}};
    }
  });

  // ----------------------------------------------------------------- relations
  auto* rel = app.add_subcommand("relations", "Integer relations among a list of reals");
  std::vector<std::string> rel_values;
  std::int64_t height = 64;
  double rel_tol = 1e-9;
  rel->add_option("--values", rel_values, "Comma-separated values")->delimiter(',');
  rel->add_option("--exact", exact_file, "JSON file {basis, values} with exact values");
  rel->add_option("--height", height, "Height bound for floating inputs")->check(CLI::PositiveNumber);
  rel->add_option("--tolerance", rel_tol, "Residual tolerance for floating inputs")->check(CLI::PositiveNumber);
  rel->add_flag("--float", force_float, "Treat the values as floating point (heuristic relation search)");
  rel->callback([&] {
    std::optional<tfr::ExactFrequencies> ex;
    if (!exact_file.empty())
      ex = tfr::io::exact_values_from_json(tfr::io::read_json_file(exact_file));
    else if (auto q = as_rationals(rel_values); !force_float && q && !q->empty())
      ex = rational_values(*q);
    if (ex) {
      auto lat = tfr::relation_lattice(ex->values);
      auto sub = tfr::subgroup_basis(ex->values);
      json gens = json::array();
      for (const auto& g : sub.generators) gens.push_back(tfr::io::to_json(g, ex->basis));
      result.doc = {{"exact", true}, {"relations", lat.basis}, {"rank", lat.rank()},
                    {"subgroup", {{"generators", gens}, {"coords", sub.coords}}}};
    } else {
      if (rel_values.empty()) throw CLI::ValidationError("--values or --exact is required");
      auto found = tfr::float_relation_candidates(as_doubles(rel_values), {height, rel_tol});
      result.doc = {{"exact", false}, {"heuristic", true}, {"relations", found}, {"height", height},
                    {"tolerance", rel_tol}};
    }
  });

  // -------------------------------------------------------------------- approx
  auto* approx = app.add_subcommand("approx", "Simultaneous approximation t*lambda_j ~ x_j (mod 1)");
  std::vector<std::string> lambdas;
  std::vector<double> targets;
  double eps = 0.05, alpha = 0.0;
  std::int64_t approx_budget = std::int64_t{1} << 34;
  approx->add_option("--lambdas", lambdas, "Comma-separated frequencies")->delimiter(',');
  approx->add_option("--targets", targets, "Comma-separated targets")->delimiter(',')->required();
  approx->add_option("--eps", eps, "Approximation tolerance in (0, 1/2]");
  approx->add_option("--alpha", alpha, "Window start");
  approx->add_option("--budget", approx_budget, "Maximum grid points")->check(CLI::PositiveNumber);
  approx->add_option("--exact", exact_file, "JSON file {basis, values} with exact frequencies");
  approx->callback([&] {
    tfr::ApproxTask task;
    if (!exact_file.empty()) {
      task = tfr::ApproxTask::from_exact(tfr::io::exact_values_from_json(tfr::io::read_json_file(exact_file)), targets,
                                         eps, alpha);
    } else if (auto q = as_rationals(lambdas); q && !q->empty()) {
      task = tfr::ApproxTask::from_exact(rational_values(*q), targets, eps, alpha);
    } else {
      if (lambdas.empty()) throw CLI::ValidationError("--lambdas or --exact is required");
      task.lambdas = as_doubles(lambdas);
      task.targets = targets;
      task.epsilon = eps;
      task.window_start = alpha;
    }
    task.scan_budget = approx_budget;
    task.validate();
    auto verdict = tfr::classify_sequence(task);
    result.doc = {{"sequence", tfr::io::to_json(verdict)}, {"epsilon", eps}, {"window_start", alpha}};
    if (!verdict.good()) {
      result.doc["status"] = "bad_sequence";
      result.doc["witness"] = nullptr;
      return;
    }
    auto w = tfr::kronecker_witness(task);
    result.doc["status"] = w ? "found" : "budget_exhausted";
    result.doc["witness"] = w ? tfr::io::to_json(*w) : json(nullptr);
    if (!w) result.code = kInconclusive;
  });

  // -------------------------------------------------------------------- runner
  auto* runner = app.add_subcommand("runner", "Shifted lonely runner search");
  std::vector<std::string> velocities, starts;
  double target = 0.25, window_start = 0.0;
  std::int64_t runner_budget = std::int64_t{1} << 30;
  std::string scan_csv;
  double scan_from = 0.0, scan_to = 1.0;
  std::size_t scan_samples = 10001;
  runner->add_option("--velocities", velocities, "Comma-separated distinct positive speeds")->delimiter(',')->required();
  runner->add_option("--starts", starts, "Comma-separated starting positions")->delimiter(',');
  runner->add_option("--target", target, "Required distance from the spectator, in (0, 1/2]");
  runner->add_option("--window-start", window_start, "Earliest admissible time");
  runner->add_option("--budget", runner_budget, "Maximum grid points")->check(CLI::PositiveNumber);
  runner->add_option("--scan-csv", scan_csv, "Also write (t, margin) samples to this CSV file");
  runner->add_option("--scan-from", scan_from, "Start of the CSV scan");
  runner->add_option("--scan-to", scan_to, "End of the CSV scan");
  runner->add_option("--scan-samples", scan_samples, "Number of CSV samples")->check(CLI::Range(2, 100000000));
  runner->callback([&] {
    auto inst = runner_instance(velocities, starts);
    auto hit = tfr::find_lonely_time(inst, target, window_start, runner_budget);
    result.doc = {{"target", target}, {"window_start", window_start}, {"found", hit.has_value()},
                  {"witness", hit ? tfr::io::to_json(*hit) : json(nullptr)}};
    if (!hit) result.code = kInconclusive;
    if (!scan_csv.empty()) {
      std::vector<std::vector<double>> rows;
      for (const auto& s : tfr::margin_samples(inst, scan_from, scan_to, scan_samples)) rows.push_back({s.t, s.margin});
      write_csv(scan_csv, {"t", "margin"}, rows);
      result.doc["scan_csv"] = scan_csv;
    }
  });

  // ----------------------------------------------------------------- spectator
  auto* spectator = app.add_subcommand("spectator", "Three-spectator selection for 1:2:3 velocities");
  spectator->add_option("--velocities", velocities, "Comma-separated speeds proportional to 1:2:3")
      ->delimiter(',')
      ->required();
  spectator->add_option("--starts", starts, "Comma-separated starting positions")->delimiter(',');
  spectator->add_option("--window-start", window_start, "Earliest admissible time");
  spectator->callback([&] {
    auto inst = runner_instance(velocities, starts);
    result.doc = tfr::io::to_json(tfr::select_spectator(inst, window_start));
  });

  // --------------------------------------------------------------------- gabor
  auto* gabor = app.add_subcommand("gabor", "Gram matrices of finite Gabor systems");
  gabor->require_subcommand(1);
  std::string function_file, lambda_file, basis_file, csv_file, coeffs_file;
  double window = 16.0;
  std::size_t samples = std::size_t{1} << 14;
  auto add_system_options = [&](CLI::App* sub) {
    sub->add_option("--function", function_file, "FunctionModel JSON file")->required();
    sub->add_option("--lambda", lambda_file, "PointSet JSON file")->required();
    sub->add_option("--window", window, "Half-width T of the window [-T, T]")->check(CLI::PositiveNumber);
    sub->add_option("--samples", samples, "Number of quadrature nodes")->check(CLI::Range(2, 1 << 26));
  };
  auto* score = gabor->add_subcommand("score", "Minimum Gram eigenvalue and null vector");
  add_system_options(score);
  score->callback([&] {
    auto f = tfr::io::function_from_json(tfr::io::read_json_file(function_file));
    auto ps = tfr::io::points_from_json(tfr::io::read_json_file(lambda_file));
    auto s = tfr::independence_score(f, ps, window, samples);
    result.doc = tfr::io::to_json(s);
    result.doc["window"] = window;
    result.doc["samples"] = samples;
    if (s.dependent()) result.code = 2;
  });
  auto* gsamples = gabor->add_subcommand("samples", "Dump sampled time-frequency translates");
  add_system_options(gsamples);
  gsamples->add_option("--csv", csv_file, "Output CSV file")->required();
  gsamples->callback([&] {
    auto f = tfr::io::function_from_json(tfr::io::read_json_file(function_file));
    auto ps = tfr::io::points_from_json(tfr::io::read_json_file(lambda_file));
    auto sys = tfr::sample_system(f, ps, window, samples);
    std::vector<std::string> header{"t"};
    for (std::size_t j = 0; j < ps.size(); ++j) {
      header.push_back("re_" + std::to_string(j));
      header.push_back("im_" + std::to_string(j));
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < sys.grid.size(); ++i) {
      std::vector<double> r{sys.grid[i]};
      for (const auto& v : sys.vectors) r.push_back(v[i].real()), r.push_back(v[i].imag());
      rows.push_back(std::move(r));
    }
    write_csv(csv_file, header, rows);
    result.doc = {{"csv", csv_file}, {"rows", rows.size()}, {"columns", header}};
  });

  // ----------------------------------------------------------------------- hrt
  auto* hrt = app.add_subcommand("hrt", "Refutation of specific dependence relations");
  hrt->require_subcommand(1);
  double hrt_start = 0.0;
  auto* verify = hrt->add_subcommand("verify", "Verify a relation sum_j d_j M T f = 0 or certify independence");
  verify->add_option("--function", function_file, "FunctionModel JSON file")->required();
  verify->add_option("--lambda", lambda_file, "PointSet JSON file")->required();
  verify->add_option("--coeffs", coeffs_file, "Coefficient JSON file; default: Gram null attempt");
  verify->add_option("--exact", basis_file, "Basis JSON file for exact frequencies");
  verify->add_option("--window", window, "Gram window half-width")->check(CLI::PositiveNumber);
  verify->add_option("--samples", samples, "Gram quadrature nodes")->check(CLI::Range(2, 1 << 26));
  verify->add_option("--window-start", hrt_start, "Earliest witness time");
  verify->callback([&] {
    auto f = tfr::io::function_from_json(tfr::io::read_json_file(function_file));
    std::optional<tfr::RealBasis> basis;
    if (!basis_file.empty()) basis = tfr::io::basis_from_json(tfr::io::read_json_file(basis_file));
    auto ps = tfr::io::points_from_json(tfr::io::read_json_file(lambda_file), basis);
    std::optional<std::vector<tfr::Complex>> c;
    if (!coeffs_file.empty()) c = tfr::io::coefficients_from_json(tfr::io::read_json_file(coeffs_file));
    tfr::VerifyOptions opts;
    opts.window_start = hrt_start;
    opts.gram_window = window;
    opts.gram_samples = samples;
    auto r = tfr::verify(f, ps, c, opts);
    result.doc = tfr::io::to_json(r);
    result.code = tfr::exit_code(r);
  });
  auto* classify = hrt->add_subcommand("classify", "Case of a four-point configuration");
  classify->add_option("--lambda", lambda_file, "PointSet JSON file")->required();
  classify->add_option("--exact", basis_file, "Basis JSON file for exact frequencies");
  classify->callback([&] {
    std::optional<tfr::RealBasis> basis;
    if (!basis_file.empty()) basis = tfr::io::basis_from_json(tfr::io::read_json_file(basis_file));
    auto ps = tfr::io::points_from_json(tfr::io::read_json_file(lambda_file), basis);
    auto norm = tfr::normalize_origin(tfr::FunctionModel(), ps);
    auto cls = tfr::classify_4pt_detailed(norm.points);
    result.doc = tfr::io::to_json(cls.tag);
    result.doc["normalized"] = tfr::io::to_json(norm.points);
    result.doc["origin_index"] = norm.origin_index;
    result.doc["heuristic"] = !ps.exact();
    if (cls.tau_ratio) result.doc["tau_ratio"] = {cls.tau_ratio->first, cls.tau_ratio->second};
  });

  // ---------------------------------------------------------------------- demo
  auto* demo = app.add_subcommand("demo", "Reproducible demonstrations");
  demo->require_subcommand(1);
  double a = 0.3;
  auto* counter = demo->add_subcommand("counterexample", "2 + cos(2 pi x) with six translates is dependent");
  counter->add_option("--a", a, "Time offset of the second column");
  counter->add_option("--window", window, "Gram window half-width")->check(CLI::PositiveNumber);
  counter->add_option("--samples", samples, "Gram quadrature nodes")->check(CLI::Range(2, 1 << 26));
  counter->callback([&] {
    const tfr::FunctionModel f{tfr::TwoPlusCos{}};
    const auto ps = tfr::make_points({{0, 0}, {0, -1}, {0, 1}, {a, 0}, {a, -1}, {a, 1}});
    auto s = tfr::independence_score(f, ps, window, samples);
    result.doc = {{"function", tfr::io::to_json(f)}, {"lambda", tfr::io::to_json(ps)}, {"a", a},
                  {"score", tfr::io::to_json(s)}, {"window", window}, {"samples", samples}};
    result.code = s.dependent() ? 2 : kInconclusive;
  });
  std::uint64_t seed = 42;
  std::size_t count = 1000;
  auto* suite = demo->add_subcommand("runner-suite", "Random shifted three-runner instances");
  suite->add_option("--seed", seed, "Random seed");
  suite->add_option("--count", count, "Number of instances")->check(CLI::Range(1, 1000000));
  suite->add_option("--target", target, "Required distance from the spectator");
  suite->callback([&] {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(1, 60), den(1, 6);
    std::uniform_real_distribution<double> start(0.0, 1.0);
    std::size_t hits = 0;
    json misses = json::array();
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<std::string> v;
      std::vector<double> s;
      while (v.size() < 3) {
        auto q = tfr::to_string(tfr::Rational(num(rng), den(rng)));
        if (std::find(v.begin(), v.end(), q) == v.end()) v.push_back(q);
      }
      for (int k = 0; k < 3; ++k) s.push_back(start(rng));
      tfr::RunnerInstance inst;
      inst.velocities = as_doubles(v);
      inst.starts = s;
      inst.exact = rational_values(*as_rationals(v));
      if (tfr::find_lonely_time(inst, target, 0.0, std::int64_t{1} << 24))
        ++hits;
      else
        misses.push_back({{"velocities", v}, {"starts", s}});
    }
    result.doc = {{"seed", seed}, {"count", count}, {"target", target}, {"found", hits}, {"misses", misses}};
    if (hits != count) result.code = kInconclusive;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInconclusive;
  }
  print(result.doc);
  return result.code;
}
