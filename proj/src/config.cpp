#include "cpinn/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cpinn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "': '" + v + "' is not a number");
  }
}

long to_long(const std::string& v, const std::string& key) {
  const double d = to_double(v, key);
  return static_cast<long>(d);
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  throw std::invalid_argument("config key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<int> to_ints(const std::string& v, const std::string& key) {
  std::vector<int> out;
  for (const auto& w : split_ws(v)) out.push_back(static_cast<int>(to_long(w, key)));
  return out;
}

std::vector<long> to_longs(const std::string& v, const std::string& key) {
  std::vector<long> out;
  for (const auto& w : split_ws(v)) out.push_back(to_long(w, key));
  return out;
}

void set_key(ExperimentConfig& cfg, const std::string& section, const std::string& key,
             const std::string& value) {
  SolverConfig& s = cfg.solver;
  const std::string full = section + "." + key;
  if (section == "experiment") {
    if (key == "problem") cfg.problem = value;
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "seed") s.seed = static_cast<std::uint64_t>(to_long(value, full));
    else if (key == "precision") {
      const long p = to_long(value, full);
      if (p != 32 && p != 64)
        throw std::invalid_argument("experiment.precision must be 32 or 64");
      cfg.precision_bits = static_cast<int>(p);
    } else if (key == "eval_points") s.eval_points = to_long(value, full);
    else if (key == "trace_eval_points") s.trace_eval_points = to_long(value, full);
    else if (key == "trace_every") s.trace_every = to_long(value, full);
    else if (key == "heatmap") cfg.emit_heatmaps = to_bool(value, full);
    else if (key == "heatmap_grid") cfg.heatmap_grid = static_cast<int>(to_long(value, full));
    else if (key == "checkpoint_every") s.checkpoint_every = to_long(value, full);
    else throw std::invalid_argument("unknown config key '" + full + "'");
  } else if (section == "problem") {
    if (key == "domain") cfg.custom_domain = value;
    else if (key == "lambda") cfg.custom_lambda = to_double(value, full);
    else if (key == "state") cfg.custom_state = value;
    else if (key == "control") cfg.custom_control = value;
    else if (key == "pde") cfg.custom_pde = value;
    else if (key == "bounds") {
      const auto parts = split_ws(value);
      if (parts.size() != 2)
        throw std::invalid_argument("problem.bounds expects two numbers");
      cfg.custom_bounds = std::make_pair(to_double(parts[0], full), to_double(parts[1], full));
    } else throw std::invalid_argument("unknown config key '" + full + "'");
  } else if (section == "net") {
    if (key == "hidden") s.hidden = to_ints(value, full);
    else if (key == "activation") s.activation = activation_from_string(value);
    else throw std::invalid_argument("unknown config key '" + full + "'");
  } else if (section == "solver") {
    if (key == "method") {
      s.method = method_from_string(value);
      cfg.methods = {s.method};
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& m : split_ws(value)) cfg.methods.push_back(method_from_string(m));
      if (!cfg.methods.empty()) s.method = cfg.methods.front();
    } else if (key == "n_interior") s.n_interior = to_long(value, full);
    else if (key == "n_boundary") s.n_boundary = to_long(value, full);
    else if (key == "alpha_boundary") s.alpha_boundary = to_double(value, full);
    else if (key == "alpha_interior") s.alpha_interior = to_double(value, full);
    else if (key == "optimizer") {
      if (value == "lbfgs") s.use_adam = false;
      else if (value == "adam") s.use_adam = true;
      else throw std::invalid_argument("solver.optimizer must be lbfgs or adam");
    } else if (key == "lbfgs_history") s.lbfgs_history = static_cast<int>(to_long(value, full));
    else if (key == "adam_lr") s.adam_lr = to_double(value, full);
    else if (key == "adam_milestones") s.adam_milestones = to_longs(value, full);
    else if (key == "cpinn_iters") s.cpinn_iters = to_long(value, full);
    else if (key == "resample_each_stage") s.resample_each_stage = to_bool(value, full);
    else if (key == "constrained_output_scale")
      s.constrained_output_scale = to_double(value, full);
    else if (key == "smooth_projection") s.smooth_projection = to_double(value, full);
    else throw std::invalid_argument("unknown config key '" + full + "'");
  } else if (section == "aonn") {
    if (key == "step") s.aonn_step = to_double(value, full);
    else if (key == "outer") s.aonn_outer = static_cast<int>(to_long(value, full));
    else if (key == "pde_iters") s.aonn_pde_iters = to_long(value, full);
    else if (key == "fit_iters") s.aonn_fit_iters = to_long(value, full);
    else throw std::invalid_argument("unknown config key '" + full + "'");
  } else if (section == "pm") {
    if (key == "mu0") s.pm_mu0 = to_double(value, full);
    else if (key == "beta") s.pm_beta = to_double(value, full);
    else if (key == "outer") s.pm_outer = static_cast<int>(to_long(value, full));
    else if (key == "first_iters") s.pm_first_iters = to_long(value, full);
    else if (key == "rest_iters") s.pm_rest_iters = to_long(value, full);
    else if (key == "mu_box0") s.pm_mu_box0 = to_double(value, full);
    else if (key == "beta_box") s.pm_beta_box = to_double(value, full);
    else throw std::invalid_argument("unknown config key '" + full + "'");
  } else if (section == "alm") {
    if (key == "mu") s.alm_mu = to_double(value, full);
    else if (key == "outer") s.alm_outer = static_cast<int>(to_long(value, full));
    else if (key == "first_iters") s.alm_first_iters = to_long(value, full);
    else if (key == "rest_iters") s.alm_rest_iters = to_long(value, full);
    else if (key == "clip") s.alm_clip = to_double(value, full);
    else throw std::invalid_argument("unknown config key '" + full + "'");
  } else {
    throw std::invalid_argument("unknown config section '[" + section + "]'");
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                    ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                  ": key outside any [section]");
    try {
      set_key(cfg, section, key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto dot = key.find('.');
  if (dot == std::string::npos)
    throw std::invalid_argument("override key must look like section.key, got '" + key + "'");
  set_key(cfg, key.substr(0, dot), key.substr(dot + 1), value);
}

ProblemSpec ExperimentConfig::build_problem() const {
  if (problem != "custom") return load_problem(problem);

  const auto dom_parts = split_ws(custom_domain);
  Domain domain;
  if (dom_parts.empty()) throw std::invalid_argument("problem.domain is empty");
  if (dom_parts[0] == "annulus") {
    if (dom_parts.size() != 3) throw std::invalid_argument("domain = annulus <r_in> <r_out>");
    domain = Domain::annulus(std::stod(dom_parts[1]), std::stod(dom_parts[2]));
  } else if (dom_parts[0] == "hypercube") {
    if (dom_parts.size() != 2) throw std::invalid_argument("domain = hypercube <d>");
    domain = Domain::hypercube(std::stoi(dom_parts[1]));
  } else if (dom_parts[0] == "unit_square_subregion") {
    domain = Domain::unit_square_with_subregion();
  } else {
    throw std::invalid_argument("unknown domain family '" + dom_parts[0] + "'");
  }

  auto state_field = [&]() -> ScalarField {
    const auto parts = split_ws(custom_state);
    if (parts[0] == "quadratic_radius") return ybar_quadratic_radius();
    if (parts[0] == "prod_sin") return ybar_prod_sin(domain.dim);
    if (parts[0] == "exp_bump_sin") return ybar_exp_bump_sin();
    throw std::invalid_argument("unknown state family '" + parts[0] +
                                "' (quadratic_radius | prod_sin | exp_bump_sin)");
  }();

  auto control_field = [&]() -> ScalarField {
    const auto parts = split_ws(custom_control);
    if (parts[0] == "ring_sin" && parts.size() == 2)
      return control_ring_sin(std::stod(parts[1]));
    if (parts[0] == "state_multiple" && parts.size() == 2)
      return control_state_multiple(state_field, std::stod(parts[1]));
    if (parts[0] == "poly_cos" && parts.size() == 2) return control_poly_cos(std::stod(parts[1]));
    throw std::invalid_argument("unknown control family '" + custom_control +
                                "' (ring_sin s | state_multiple c | poly_cos s)");
  }();

  PdeSpec pde;
  {
    const auto parts = split_ws(custom_pde);
    if (parts.empty()) throw std::invalid_argument("problem.pde is empty");
    if (parts[0] == "linear" && parts.size() == 2) {
      pde.c0 = std::stod(parts[1]);
    } else if (parts[0] == "cubic_subregion" && parts.size() == 4) {
      pde = pde_cubic_subregion(std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3]));
    } else {
      throw std::invalid_argument("unknown pde family '" + custom_pde +
                                  "' (linear c0 | cubic_subregion c0 k_in k_out)");
    }
  }

  auto prob = manufacture_problem(state_field, control_field, custom_lambda, domain, pde,
                                  custom_bounds);
  prob.name = "custom";
  return prob;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  const SolverConfig& s = cfg.solver;
  std::ostringstream os;
  os.precision(17);
  os << "[experiment]\n";
  os << "problem = " << cfg.problem << "\n";
  if (!cfg.output_dir.empty()) os << "output_dir = " << cfg.output_dir << "\n";
  os << "seed = " << s.seed << "\n";
  os << "precision = " << cfg.precision_bits << "\n";
  os << "eval_points = " << s.eval_points << "\n";
  os << "trace_eval_points = " << s.trace_eval_points << "\n";
  os << "trace_every = " << s.trace_every << "\n";
  os << "heatmap = " << (cfg.emit_heatmaps ? 1 : 0) << "\n";
  os << "heatmap_grid = " << cfg.heatmap_grid << "\n";
  if (cfg.problem == "custom") {
    os << "\n[problem]\n";
    os << "domain = " << cfg.custom_domain << "\n";
    os << "lambda = " << cfg.custom_lambda << "\n";
    os << "state = " << cfg.custom_state << "\n";
    os << "control = " << cfg.custom_control << "\n";
    os << "pde = " << cfg.custom_pde << "\n";
    if (cfg.custom_bounds)
      os << "bounds = " << cfg.custom_bounds->first << " " << cfg.custom_bounds->second << "\n";
  }
  os << "\n[net]\nhidden =";
  for (int h : s.hidden) os << " " << h;
  os << "\nactivation = " << to_string(s.activation) << "\n";
  os << "\n[solver]\n";
  os << "methods =";
  for (Method m : cfg.methods) os << " " << to_string(m);
  os << "\n";
  os << "n_interior = " << s.n_interior << "\n";
  os << "n_boundary = " << s.n_boundary << "\n";
  os << "alpha_boundary = " << s.alpha_boundary << "\n";
  os << "alpha_interior = " << s.alpha_interior << "\n";
  os << "optimizer = " << (s.use_adam ? "adam" : "lbfgs") << "\n";
  os << "lbfgs_history = " << s.lbfgs_history << "\n";
  os << "adam_lr = " << s.adam_lr << "\n";
  if (!s.adam_milestones.empty()) {
    os << "adam_milestones =";
    for (long m : s.adam_milestones) os << " " << m;
    os << "\n";
  }
  os << "cpinn_iters = " << s.cpinn_iters << "\n";
  os << "resample_each_stage = " << (s.resample_each_stage ? 1 : 0) << "\n";
  os << "smooth_projection = " << s.smooth_projection << "\n";
  os << "constrained_output_scale = " << s.constrained_output_scale << "\n";
  os << "\n[aonn]\n";
  os << "step = " << s.aonn_step << "\nouter = " << s.aonn_outer
     << "\npde_iters = " << s.aonn_pde_iters << "\nfit_iters = " << s.aonn_fit_iters << "\n";
  os << "\n[pm]\n";
  os << "mu0 = " << s.pm_mu0 << "\nbeta = " << s.pm_beta << "\nouter = " << s.pm_outer
     << "\nfirst_iters = " << s.pm_first_iters << "\nrest_iters = " << s.pm_rest_iters
     << "\nmu_box0 = " << s.pm_mu_box0 << "\nbeta_box = " << s.pm_beta_box << "\n";
  os << "\n[alm]\n";
  os << "mu = " << s.alm_mu << "\nouter = " << s.alm_outer
     << "\nfirst_iters = " << s.alm_first_iters << "\nrest_iters = " << s.alm_rest_iters
     << "\nclip = " << s.alm_clip << "\n";
  return os.str();
}

}  // namespace cpinn
