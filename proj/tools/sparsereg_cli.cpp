// Command-line front end. Matrices are plain numeric CSV without a header; vectors hold one value
// per line. Feature indices on the command line and in every output are 1-based. Tables go to
// --out (stdout when absent); scalar results are written first as '# key=value' comment lines.
// Failures print one JSON object {"error": kind, "message": text} on stderr and exit with 2.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sparsereg/sparsereg.hpp"

using namespace sparsereg;

namespace {

/// Writes to a file when a path is given, else to stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      detail::require(static_cast<bool>(*file_), ErrorKind::IoError, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& text, const std::string& what) {
  double v = 0.0;
  detail::require(detail::parse_double(text, v), ErrorKind::ParseError, "invalid " + what + " '" + text + "'");
  return v;
}

std::size_t parse_count(const std::string& text, const std::string& what) {
  const double v = parse_real(text, what);
  detail::require(v >= 0.0 && v == std::floor(v), ErrorKind::ParseError, "invalid " + what + " '" + text + "'");
  return static_cast<std::size_t>(v);
}

/// "1,4,7" (1-based) to a 0-based index set.
IndexSet parse_indices(const std::string& text) {
  IndexSet out;
  for (const auto& item : split_list(text)) {
    const auto j = parse_count(item, "index");
    detail::require(j >= 1, ErrorKind::DomainError, "indices are 1-based");
    out.push_back(j - 1);
  }
  return detail::normalized_index_set(std::move(out));
}

/// Comma list, or logspace:lo:hi:count.
std::vector<double> parse_real_grid(const std::string& text) {
  if (text.rfind("logspace:", 0) == 0) {
    std::vector<std::string> fields;
    std::stringstream ss(text.substr(9));
    std::string f;
    while (std::getline(ss, f, ':')) fields.push_back(f);
    detail::require(fields.size() == 3, ErrorKind::ParseError, "expected logspace:lo:hi:count");
    const double lo = parse_real(fields[0], "grid bound");
    const double hi = parse_real(fields[1], "grid bound");
    const auto count = parse_count(fields[2], "grid size");
    detail::require(lo > 0.0 && hi > lo && count >= 2, ErrorKind::DomainError, "invalid logspace grid");
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
      grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return grid;
  }
  std::vector<double> grid;
  for (const auto& item : split_list(text)) grid.push_back(parse_real(item, "grid value"));
  return grid;
}

/// Comma list of counts, each either a value or a range a-b.
std::vector<std::size_t> parse_count_grid(const std::string& text) {
  std::vector<std::size_t> grid;
  for (const auto& item : split_list(text)) {
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto lo = parse_count(item.substr(0, dash), "range start");
      const auto hi = parse_count(item.substr(dash + 1), "range end");
      detail::require(lo <= hi, ErrorKind::DomainError, "empty range '" + item + "'");
      for (auto q = lo; q <= hi; ++q) grid.push_back(q);
    } else {
      grid.push_back(parse_count(item, "grid value"));
    }
  }
  return grid;
}

std::string join_indices(const IndexSet& set) {
  std::string out;
  for (auto j : set) out += (out.empty() ? "" : ",") + std::to_string(j + 1);
  return out;
}

void write_coefficients(std::ostream& out, const CoefVector& beta) {
  out << "j,beta\n";
  for (std::size_t j = 0; j < beta.size(); ++j) out << j + 1 << ',' << format_number(beta[j]) << '\n';
}

void write_fit_summary(std::ostream& out, const std::string& prefix, const LassoFit& fit) {
  out << "# " << prefix << "kkt_residual=" << format_number(fit.kkt_residual) << '\n'
      << "# " << prefix << "objective=" << format_number(fit.objective_value) << '\n'
      << "# " << prefix << "sweeps=" << fit.sweeps_used << '\n'
      << "# " << prefix << "converged=" << (fit.converged ? "true" : "false") << '\n';
}

NormIndex parse_norm(const std::string& text) {
  const auto p = NormIndex::parse(text);
  detail::require(p.is_standard(), ErrorKind::DomainError, "p must be 1, 2 or inf");
  return p;
}

Exactness exactness_of(const Quantity& q) { return q.exactness; }

BoundInputs read_bound_inputs(const std::string& params_path, const std::string& quantities_path) {
  BoundInputs in;
  for (const auto& [key, value] : read_key_values(params_path)) {
    if (key == "n") in.n = parse_count(value, key);
    else if (key == "d") in.d = parse_count(value, key);
    else if (key == "k") in.k = parse_count(value, key);
    else if (key == "ell") in.ell = parse_count(value, key);
    else if (key == "s") in.s = parse_count(value, key);
    else if (key == "q") in.q = parse_count(value, key);
    else if (key == "p") in.p = parse_norm(value);
    else if (key == "t") in.t = parse_real(value, key);
    else if (key == "t_d" || key == "t_D") in.t_d = parse_real(value, key);
    else if (key == "lambda") in.lambda = parse_real(value, key);
    else if (key == "alpha") in.alpha = parse_real(value, key);
    else if (key == "epsilon" || key == "epsilon_fs") in.epsilon_fs = parse_real(value, key);
    else if (key == "sigma") in.sigma = parse_real(value, key);
    else if (key == "a") in.a = parse_real(value, key);
    else if (key == "delta") in.delta = parse_real(value, key);
    else if (key == "tail1") in.tail1 = parse_real(value, key);
    else if (key == "tailp") in.tailp = parse_real(value, key);
    else if (key == "tail2") in.tail2 = parse_real(value, key);
    else if (key == "approx_noise") in.approx_noise = parse_real(value, key);
    else if (key == "approx_err") in.approx_err = parse_real(value, key);
    else if (key == "coherence" || key == "M") in.coherence = parse_real(value, key);
    else detail::fail(ErrorKind::ParseError, params_path + ": unknown parameter '" + key + "'");
  }
  if (!quantities_path.empty()) {
    const auto rows = read_fields(quantities_path);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == 0 && !rows[r].empty() && rows[r][0] == "k") continue;
      detail::require(rows[r].size() == 6, ErrorKind::ParseError,
                      quantities_path + ": row " + std::to_string(r + 1) + " needs 6 fields");
      const auto& f = rows[r];
      const double value = parse_real(f[4], "quantity value");
      in.quantities.set(parse_count(f[0], "k"), parse_count(f[1], "ell"), parse_norm(f[2]), f[3],
                        Quantity{value, parse_exactness(f[5]), std::isinf(value)});
    }
  }
  return in;
}

void write_bound_report(std::ostream& out, const BoundReport& report) {
  auto quote = [](const std::string& s) { return "\"" + s + "\""; };
  for (const auto& c : report.conditions) {
    out << report.bound_name << ',' << quote(c.text) << ',' << (c.holds ? "true" : "false") << ','
        << format_number(c.margin) << '\n';
  }
  for (const auto& c : report.alternatives) {
    out << report.bound_name << ',' << quote("alternative: " + c.text) << ',' << (c.holds ? "true" : "false") << ','
        << format_number(c.margin) << '\n';
  }
  out << report.bound_name << ",rhs," << (report.rhs ? "true" : "false") << ','
      << (report.rhs ? format_number(*report.rhs) : "undefined") << '\n';
}

int report_error(const std::string& kind, const std::string& message) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  std::cerr << j.dump() << std::endl;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse regression with selective L1 penalization"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // fit
  std::string design, response, out_path, unpenalized;
  double lambda = 0.0, tol = 1e-8;
  std::size_t max_sweeps = 100000;
  auto* fit = app.add_subcommand("fit", "Selectively penalized Lasso fit");
  fit->add_option("--design", design, "Design matrix CSV (n x d)")->required();
  fit->add_option("--response", response, "Response vector CSV")->required();
  fit->add_option("--lambda", lambda, "Regularization level")->required();
  fit->add_option("--unpenalized", unpenalized, "Comma list of 1-based unpenalized features");
  fit->add_option("--tol", tol, "KKT tolerance");
  fit->add_option("--max-sweeps", max_sweeps, "Sweep budget");
  fit->add_option("--out", out_path, "Coefficient CSV output");

  // two-stage
  std::optional<std::size_t> q_opt;
  std::optional<double> alpha_opt;
  auto* two = app.add_subcommand("two-stage", "Lasso, then refit with the selected features unpenalized");
  two->add_option("--design", design)->required();
  two->add_option("--response", response)->required();
  two->add_option("--lambda", lambda)->required();
  auto* q_flag = two->add_option("--q", q_opt, "Select the q largest coefficients");
  auto* a_flag = two->add_option("--alpha", alpha_opt, "Select coefficients with magnitude above alpha");
  q_flag->excludes(a_flag);
  two->add_option("--tol", tol);
  two->add_option("--max-sweeps", max_sweeps);
  two->add_option("--out", out_path);

  // tune
  std::string lambda_grid_text = "auto", q_grid_text = "0-6";
  std::size_t folds = 5;
  std::uint64_t seed = 1;
  auto* tune = app.add_subcommand("tune", "Sequential cross-validation of lambda, then q");
  tune->add_option("--design", design)->required();
  tune->add_option("--response", response)->required();
  tune->add_option("--lambda-grid", lambda_grid_text, "Comma list, logspace:lo:hi:count, or auto");
  tune->add_option("--q-grid", q_grid_text, "Comma list or ranges, e.g. 0-6");
  tune->add_option("--folds", folds);
  tune->add_option("--seed", seed);
  tune->add_option("--tol", tol);
  tune->add_option("--out", out_path);

  // diagnose
  std::string gram_path, p_text = "2";
  std::size_t k = 1, ell = 1, budget = 200000;
  bool pi_heuristic = false;
  auto* diag = app.add_subcommand("diagnose", "Sub-block quantities of a Gram matrix");
  auto* gram_opt = diag->add_option("--gram", gram_path, "Gram matrix CSV (d x d)");
  auto* design_opt = diag->add_option("--design", design, "Design CSV; the Gram matrix is (1/n) X^T X");
  gram_opt->excludes(design_opt);
  diag->add_option("--k", k, "Block size")->required();
  diag->add_option("--ell", ell, "Second block size")->required();
  diag->add_option("--p", p_text, "1, 2, inf, or all");
  diag->add_option("--budget", budget, "Evaluation budget per quantity");
  diag->add_flag("--pi-heuristic", pi_heuristic, "Also report a heuristic lower estimate of pi");
  diag->add_option("--out", out_path);

  // bounds
  std::string params_path, quantities_path, bound_name;
  auto* bounds = app.add_subcommand("bounds", "Evaluate bound conditions and right-hand sides");
  bounds->add_option("--params", params_path, "Key-value or JSON parameter file")->required();
  bounds->add_option("--quantities", quantities_path, "Quantity CSV written by diagnose");
  bounds->add_option("--bound", bound_name, "Bound name or 'all'")->required();
  bounds->add_option("--out", out_path);

  // greedy
  std::string mean_response, beta_bar_path;
  std::optional<double> mu2;
  auto* greedy = app.add_subcommand("greedy", "Greedy residual-correlation correction of a reference vector");
  greedy->add_option("--design", design)->required();
  greedy->add_option("--mean-response", mean_response, "Noiseless mean response CSV")->required();
  greedy->add_option("--beta-bar", beta_bar_path, "Reference coefficient CSV")->required();
  greedy->add_option("--k", k, "Number of steps")->required();
  greedy->add_option("--mu2", mu2, "Smallest k-sparse eigenvalue, enables the displacement check");
  greedy->add_option("--out", out_path);

  // simulate
  SimConfig sim;
  std::string chart_path, chart_metric, design_kind = "gaussian";
  double perturbation = 0.02;
  auto* simulate = app.add_subcommand("simulate", "Synthetic two-stage experiment over a (lambda, q) grid");
  simulate->add_option("--n", sim.n);
  simulate->add_option("--d", sim.d);
  simulate->add_option("--k", sim.k_true, "Nonzeros of the true coefficient vector");
  simulate->add_option("--sigma", sim.sigma);
  simulate->add_option("--coef-low", sim.coef_low);
  simulate->add_option("--coef-high", sim.coef_high);
  simulate->add_option("--trials", sim.trials);
  simulate->add_option("--lambda-grid", lambda_grid_text);
  simulate->add_option("--q-grid", q_grid_text);
  simulate->add_option("--seed", seed);
  simulate->add_option("--design", design_kind, "gaussian or near-orthogonal");
  simulate->add_option("--perturbation", perturbation);
  simulate->add_option("--tol", tol);
  simulate->add_option("--out", out_path)->required();
  simulate->add_option("--chart", chart_path, "SVG chart output");
  simulate->add_option("--chart-metric", chart_metric, "Metric plotted in the chart");

  // holdout
  std::string data_path;
  std::size_t target_col = 0, train_size = 20, trials = 100, augment = 0;
  bool no_intercept = false, no_normalize = false;
  auto* holdout = app.add_subcommand("holdout", "Random train/test splits of a tabular dataset");
  holdout->add_option("--data", data_path, "CSV or whitespace table, optional header row")->required();
  holdout->add_option("--target-col", target_col, "1-based response column")->required();
  holdout->add_option("--train", train_size);
  holdout->add_option("--trials", trials);
  holdout->add_option("--augment", augment, "Append this many random features");
  holdout->add_flag("--no-intercept", no_intercept);
  holdout->add_flag("--no-normalize", no_normalize, "Keep raw column scales");
  holdout->add_option("--lambda-grid", lambda_grid_text);
  holdout->add_option("--q-grid", q_grid_text);
  holdout->add_option("--seed", seed);
  holdout->add_option("--tol", tol);
  holdout->add_option("--out", out_path)->required();
  holdout->add_option("--chart", chart_path);
  holdout->add_option("--chart-metric", chart_metric);

  // validate-bound
  double delta = 0.05;
  BoundMcOptions mc;
  std::string mc_p = "2";
  SimConfig mc_sim;
  mc_sim.n = 50;
  mc_sim.d = 10;
  mc_sim.k_true = 2;
  mc_sim.trials = 500;
  mc_sim.design = DesignKind::NearOrthogonal;
  auto* validate = app.add_subcommand("validate-bound", "Monte Carlo check of a bound against measured errors");
  validate->add_option("--bound", bound_name, "corollary41, corollary61 or theorem81")->required();
  validate->add_option("--delta", delta);
  validate->add_option("--trials", mc_sim.trials);
  validate->add_option("--n", mc_sim.n);
  validate->add_option("--d", mc_sim.d);
  validate->add_option("--k-true", mc_sim.k_true);
  validate->add_option("--sigma", mc_sim.sigma);
  validate->add_option("--seed", seed);
  validate->add_option("--perturbation", perturbation);
  validate->add_option("--k", mc.k);
  validate->add_option("--ell", mc.ell);
  validate->add_option("--t", mc.t);
  validate->add_option("--p", mc_p);
  validate->add_option("--alpha-factor", mc.alpha_factor);
  validate->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("UsageError", e.what());
  }

  try {
    SolverConfig solver;
    solver.kkt_tolerance = tol;
    solver.max_sweeps = max_sweeps;

    if (*fit) {
      const DesignMatrix x(read_matrix_csv(design));
      const ResponseVector y(read_vector_csv(response));
      const auto result = fit_lasso(x, y, PenaltySpec(lambda, parse_indices(unpenalized)), solver);
      Output out(out_path);
      write_fit_summary(out.stream(), "", result);
      write_coefficients(out.stream(), result.beta);
      return result.converged ? 0 : report_error("NonConvergence", "sweep budget exhausted before the KKT tolerance");
    }

    if (*two) {
      detail::require(q_opt.has_value() || alpha_opt.has_value(), ErrorKind::DomainError, "give --q or --alpha");
      const DesignMatrix x(read_matrix_csv(design));
      const ResponseVector y(read_vector_csv(response));
      const SelectionRule rule = q_opt ? SelectionRule{TopQRule{*q_opt}} : SelectionRule{ThresholdRule{*alpha_opt}};
      const auto result = run_two_stage(x, y, lambda, rule, solver);
      Output out(out_path);
      out.stream() << "# selected=" << join_indices(result.selected) << '\n';
      write_fit_summary(out.stream(), "stage1_", result.stage1);
      write_fit_summary(out.stream(), "stage2_", result.stage2);
      write_coefficients(out.stream(), result.stage2.beta);
      return 0;
    }

    if (*tune) {
      const DesignMatrix x(read_matrix_csv(design));
      const ResponseVector y(read_vector_csv(response));
      const auto grid = lambda_grid_text == "auto" ? default_lambda_grid(x, y) : parse_real_grid(lambda_grid_text);
      const auto result = tune_sequential(x, y, grid, parse_count_grid(q_grid_text), folds, seed, solver);
      Output out(out_path);
      out.stream() << "# lambda_star=" << format_number(result.lambda_star) << '\n'
                   << "# q_star=" << result.q_star << '\n'
                   << "stage,lambda,q,mean_error,folds\n";
      for (const auto& r : result.cv_table) {
        out.stream() << r.stage << ',' << format_number(r.lambda) << ',' << r.q << ',' << format_number(r.mean_error)
                     << ',' << r.folds << '\n';
      }
      return 0;
    }

    if (*diag) {
      detail::require(!gram_path.empty() || !design.empty(), ErrorKind::DomainError, "give --gram or --design");
      const GramMatrix a = gram_path.empty() ? gram(DesignMatrix(read_matrix_csv(design)))
                                             : GramMatrix(read_matrix_csv(gram_path));
      DiagnosticsConfig config;
      config.budget = budget;
      config.pi_heuristic = pi_heuristic;
      std::vector<NormIndex> norms;
      if (p_text == "all") {
        norms = {NormIndex::one(), NormIndex::two(), NormIndex::inf()};
      } else {
        norms = {parse_norm(p_text)};
      }
      Output out(out_path);
      out.stream() << "k,ell,p,quantity,value,exactness\n";
      for (const auto& p : norms) {
        const auto q = compute_quantities(a, k, ell, p, config);
        auto row = [&](const std::string& name, const Quantity& v) {
          out.stream() << k << ',' << ell << ',' << p.label() << ',' << name << ',' << format_number(v.value) << ','
                       << to_string(exactness_of(v)) << '\n';
        };
        row("rho", q.rho);
        row("mu", q.mu);
        row("omega", q.omega);
        row("theta", q.theta);
        row("gamma", q.gamma);
        row("pi", q.pi);
        if (q.pi_heuristic) row("pi_lower", Quantity{*q.pi_heuristic, Exactness::HeuristicLower, false});
        row("theta_bar", q.theta_bar);
      }
      return 0;
    }

    if (*bounds) {
      const auto in = read_bound_inputs(params_path, quantities_path);
      Output out(out_path);
      out.stream() << "bound,item,holds,value\n";
      const auto names = bound_name == "all" ? bound_names() : std::vector<std::string>{bound_name};
      for (const auto& name : names) {
        try {
          write_bound_report(out.stream(), evaluate_bound(name, in));
        } catch (const Error& e) {
          if (bound_name != "all") throw;
          std::string message = std::string(to_string(e.kind())) + ": " + e.what();
          for (auto& ch : message) {
            if (ch == '"') ch = '\'';
          }
          out.stream() << name << ",error,false,\"" << message << "\"\n";
        }
      }
      return 0;
    }

    if (*greedy) {
      const DesignMatrix x(read_matrix_csv(design));
      const ResponseVector ey(read_vector_csv(mean_response));
      const CoefVector beta_bar(read_vector_csv(beta_bar_path));
      const auto trace = greedy_correct(x, ey, beta_bar, k);
      const auto cert = prop51_certificate(trace, x, ey, beta_bar, k, mu2);
      Output out(out_path);
      out.stream() << "# k_star=" << cert.k_star << '\n'
                   << "# bound_holds=" << (cert.bound_holds ? "true" : "false") << '\n'
                   << "# threshold=" << format_number(cert.threshold) << '\n'
                   << "# approx_err=" << format_number(cert.approx_err) << '\n';
      if (cert.displacement_bound) {
        out.stream() << "# displacement=" << format_number(*cert.displacement) << '\n'
                     << "# displacement_bound=" << format_number(*cert.displacement_bound) << '\n';
      }
      out.stream() << "step,j,alpha,residual_inf,energy\n";
      for (std::size_t s = 0; s < trace.iterates.size(); ++s) {
        out.stream() << s << ',' << (s == 0 ? std::string() : std::to_string(trace.picked_indices[s - 1] + 1)) << ','
                     << (s == 0 ? std::string() : format_number(trace.step_sizes[s - 1])) << ','
                     << format_number(trace.residual_corr_inf[s]) << ',' << format_number(trace.energy[s]) << '\n';
      }
      return 0;
    }

    if (*simulate) {
      sim.seed = seed;
      sim.q_grid = parse_count_grid(q_grid_text);
      sim.perturbation = perturbation;
      sim.solver = solver;
      detail::require(design_kind == "gaussian" || design_kind == "near-orthogonal", ErrorKind::DomainError,
                      "--design must be gaussian or near-orthogonal");
      sim.design = design_kind == "gaussian" ? DesignKind::Gaussian : DesignKind::NearOrthogonal;
      if (lambda_grid_text != "auto") sim.lambda_grid = parse_real_grid(lambda_grid_text);
      auto table = run_simulation(sim);
      table.metadata["lambda_grid_source"] = lambda_grid_text == "auto" ? "default: 32 log-spaced points from 1e-3 lambda_max to lambda_max of trial 0" : "user";
      emit_outputs(table, out_path, chart_path.empty() ? std::nullopt : std::optional<std::string>(chart_path),
                   chart_metric.empty() ? "estimation_error" : chart_metric);
      return 0;
    }

    if (*holdout) {
      detail::require(target_col >= 1, ErrorKind::DomainError, "--target-col is 1-based");
      auto data = load_tabular_dataset(data_path, target_col - 1, !no_intercept);
      DesignMatrix x = data.x;
      if (!no_normalize) x = DesignMatrix(normalize_columns(x.values()));
      x = augment_random_features(x, augment, seed);
      const auto grid = lambda_grid_text == "auto" ? default_lambda_grid(x, data.y) : parse_real_grid(lambda_grid_text);
      auto table = run_holdout(x, data.y, train_size, trials, grid, parse_count_grid(q_grid_text), seed, solver);
      table.metadata["augment"] = std::to_string(augment);
      table.metadata["normalized"] = no_normalize ? "false" : "true";
      table.metadata["lambda_grid_source"] = lambda_grid_text == "auto" ? "default: 32 log-spaced points from 1e-3 lambda_max to lambda_max of the full dataset" : "user";
      emit_outputs(table, out_path, chart_path.empty() ? std::nullopt : std::optional<std::string>(chart_path),
                   chart_metric.empty() ? "test_error" : chart_metric);
      return 0;
    }

    if (*validate) {
      mc_sim.seed = seed;
      mc_sim.perturbation = perturbation;
      mc_sim.solver = solver;
      mc.p = parse_norm(mc_p);
      const auto result = validate_bound_montecarlo(mc_sim, bound_name, delta, mc);
      const double band = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(mc_sim.trials));
      Output out(out_path);
      out.stream() << "# bound=" << result.bound_name << '\n'
                   << "# evaluable=" << result.evaluable << '\n'
                   << "# violations=" << result.violations << '\n'
                   << "# violation_rate=" << format_number(result.violation_rate) << '\n'
                   << "# tolerance_band=" << format_number(band) << '\n'
                   << "trial,conditions_hold,rhs,measured,violated\n";
      for (const auto& r : result.rows) {
        out.stream() << r.trial << ',' << (r.conditions_hold ? "true" : "false") << ','
                     << (r.rhs ? format_number(*r.rhs) : "undefined") << ','
                     << (r.conditions_hold ? format_number(r.measured) : "") << ',' << (r.violated ? "true" : "false")
                     << '\n';
      }
      return 0;
    }
  } catch (const Error& e) {
    return report_error(std::string(to_string(e.kind())), e.what());
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what());
  }
  return 0;
}
