#include "perish/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace perish {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_double(const std::string& v, const std::string& key) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key " + key + ": cannot parse number from '" + v + "'");
  }
  if (pos != v.size())
    throw std::invalid_argument("config key " + key + ": trailing characters in '" + v + "'");
  return d;
}

long long to_int(const std::string& v, const std::string& key) {
  const double d = to_double(v, key);
  const auto i = static_cast<long long>(d);
  if (static_cast<double>(i) != d)
    throw std::invalid_argument("config key " + key + ": expected an integer, got '" + v + "'");
  return i;
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config key " + key + ": expected a boolean, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::string cleaned = v;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream is(cleaned);
  std::string tok;
  while (is >> tok) out.push_back(to_double(tok, key));
  return out;
}

}  // namespace

DemandModel RunConfig::demand() const {
  if (demand_kind == "exponential")
    return DemandModel::exponential(demand_mean, demand_step > 0 ? demand_step : 0.1);
  if (demand_kind == "poisson") return DemandModel::poisson(demand_mean);
  if (demand_kind == "finite")
    return DemandModel::finite(demand_values, demand_probs,
                               demand_step > 0 ? demand_step : 1.0);
  throw std::invalid_argument("unknown demand kind '" + demand_kind + "'");
}

CostParams RunConfig::costs() const {
  CostParams p;
  p.c = c;
  p.h = h;
  p.r = r;
  p.theta = theta;
  p.lifetime = m;
  p.lead_time = l;
  return p;
}

SimConfig RunConfig::sim_config() const {
  SimConfig s;
  s.periods = periods;
  s.burn_in = burn_in;
  s.seed = seed;
  s.sample_stride = sample_stride;
  return s;
}

SimConfig RunConfig::curve_config() const {
  SimConfig s;
  s.periods = curve_periods;
  s.burn_in = curve_burn_in;
  s.seed = seed;
  s.sample_stride = std::max<long long>(1, curve_periods / 40);
  return s;
}

void RunConfig::validate() const {
  demand();           // revalidates the demand block
  costs().validate(); // and the cost/structure blocks
  if (periods <= burn_in || burn_in < 0)
    throw std::invalid_argument("simulation requires periods > burn_in >= 0");
  if (curve_periods <= curve_burn_in || curve_burn_in < 0)
    throw std::invalid_argument("curve simulation requires curve_periods > curve_burn_in >= 0");
  if (wex_periods <= wex_burn_in || wex_burn_in < 0)
    throw std::invalid_argument("externality simulation requires wex_periods > wex_burn_in >= 0");
  if (sample_stride <= 0) throw std::invalid_argument("sample_stride must be positive");
  if (!(alpha > 0.0) || alpha >= 1.0) throw std::invalid_argument("alpha must lie in (0,1)");
  if (!(root_tol > 0.0)) throw std::invalid_argument("root_tol must be positive");
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      if (section != "demand" && section != "cost" && section != "structure" &&
          section != "simulation" && section != "solver" && section != "output")
        throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                    ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (qual == "demand.kind") {
      cfg.demand_kind = value;
    } else if (qual == "demand.mean") {
      cfg.demand_mean = to_double(value, qual);
    } else if (qual == "demand.values") {
      cfg.demand_values = to_list(value, qual);
    } else if (qual == "demand.probs") {
      cfg.demand_probs = to_list(value, qual);
    } else if (qual == "demand.step") {
      cfg.demand_step = to_double(value, qual);
    } else if (qual == "cost.h") {
      cfg.h = to_double(value, qual);
    } else if (qual == "cost.r") {
      cfg.r = to_double(value, qual);
    } else if (qual == "cost.theta") {
      cfg.theta = to_double(value, qual);
    } else if (qual == "cost.c") {
      cfg.c = to_double(value, qual);
    } else if (qual == "structure.m") {
      cfg.m = static_cast<int>(to_int(value, qual));
    } else if (qual == "structure.l") {
      cfg.l = static_cast<int>(to_int(value, qual));
    } else if (qual == "simulation.periods") {
      cfg.periods = to_int(value, qual);
    } else if (qual == "simulation.burn_in") {
      cfg.burn_in = to_int(value, qual);
    } else if (qual == "simulation.seed") {
      cfg.seed = static_cast<std::uint64_t>(to_int(value, qual));
    } else if (qual == "simulation.sample_stride") {
      cfg.sample_stride = to_int(value, qual);
    } else if (qual == "solver.root_tol") {
      cfg.root_tol = to_double(value, qual);
    } else if (qual == "solver.delta") {
      cfg.delta = to_double(value, qual);
    } else if (qual == "solver.alpha") {
      cfg.alpha = to_double(value, qual);
    } else if (qual == "solver.curve_periods") {
      cfg.curve_periods = to_int(value, qual);
    } else if (qual == "solver.curve_burn_in") {
      cfg.curve_burn_in = to_int(value, qual);
    } else if (qual == "solver.refine_periods") {
      cfg.refine_periods = to_int(value, qual);
    } else if (qual == "solver.wex_periods") {
      cfg.wex_periods = to_int(value, qual);
    } else if (qual == "solver.wex_burn_in") {
      cfg.wex_burn_in = to_int(value, qual);
    } else if (qual == "solver.table_bound") {
      cfg.table_bound = to_double(value, qual);
    } else if (qual == "solver.qc_scan_max") {
      cfg.qc_scan_max = to_double(value, qual);
    } else if (qual == "solver.reuse_zero_leadtime_qc") {
      cfg.reuse_zero_leadtime_qc = to_bool(value, qual);
    } else if (qual == "solver.wex_reestimate") {
      cfg.wex_reestimate = to_bool(value, qual);
    } else if (qual == "output.dir") {
      cfg.out_dir = value;
    } else {
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": unknown key '" +
                                  qual + "'");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace perish
