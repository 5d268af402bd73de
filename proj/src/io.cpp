#include "jcs/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace jcs {

using nlohmann::json;

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "NA";
  if (std::isinf(x)) return x > 0 ? "Inf" : "-Inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string fixed(double x, int digits = 4) {
  if (std::isnan(x)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string pad(const std::string& s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const std::string& where) {
  if (text == "NA" || text == "NaN" || text == "nan") return std::nan("");
  if (text == "Inf" || text == "inf") return HUGE_VAL;
  if (text == "-Inf" || text == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
    throw ValidationError(where + ": '" + text + "' is not a number");
  return v;
}

long parse_long(const std::string& text, const std::string& where) {
  char* end = nullptr;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size())
    throw ValidationError(where + ": '" + text + "' is not an integer");
  return v;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ValidationError(what + ": JSON parse error at line " + std::to_string(line) + ", column " +
                          std::to_string(column) + ": " + e.what());
  }
}

void require_object(const json& j, const std::string& what) {
  if (!j.is_object()) throw ValidationError(what + ": expected a JSON object");
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& what) {
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ValidationError(what + ": unknown field '" + key + "'");
}

double get_double(const json& j, const std::string& key, const std::string& what) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ValidationError(what + ": field '" + key + "' must be a number");
  return v.get<double>();
}

long get_long(const json& j, const std::string& key, const std::string& what) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ValidationError(what + ": field '" + key + "' must be an integer");
  return v.get<long>();
}

std::string get_string(const json& j, const std::string& key, const std::string& what) {
  const json& v = j.at(key);
  if (!v.is_string()) throw ValidationError(what + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::uint64_t get_seed(const json& j, const std::string& key, const std::string& what) {
  const json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  throw ValidationError(what + ": field '" + key + "' must be a non-negative integer");
}

Vector get_vector(const json& v, const std::string& field, const std::string& what) {
  if (!v.is_array()) throw ValidationError(what + ": field '" + field + "' must be an array of numbers");
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ValidationError(what + ": field '" + field + "' must be an array of numbers");
    out(static_cast<Index>(i)) = v[i].get<double>();
  }
  return out;
}

// Scalar broadcasts to `n`; arrays must have length n.
Vector get_block_vector(const json& j, const std::string& field, Index n, const std::string& what,
                        const std::string& size_name) {
  const json& v = j.at(field);
  if (v.is_number()) return Vector::Constant(n, v.get<double>());
  Vector out = get_vector(v, field, what);
  if (out.size() != n)
    throw ValidationError(what + "." + field + " has length " + std::to_string(out.size()) + " but " + size_name +
                          " = " + std::to_string(n));
  return out;
}

Matrix get_matrix(const json& v, const std::string& field, const std::string& what) {
  if (!v.is_array()) throw ValidationError(what + ": field '" + field + "' must be an array of rows");
  const Index rows = static_cast<Index>(v.size());
  Matrix out(rows, rows);
  for (Index r = 0; r < rows; ++r) {
    const Vector row = get_vector(v[static_cast<std::size_t>(r)], field, what);
    if (row.size() != rows) throw ValidationError(what + ": field '" + field + "' must be a square matrix");
    out.row(r) = row.transpose();
  }
  return out;
}

json to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Vector(m.row(r).transpose())));
  return a;
}

json mcmc_to_json(const MCMCConfig& c) {
  json j;
  j["iterations"] = c.iterations;
  j["burn_in"] = c.burn_in;
  j["thin"] = c.thin;
  j["adapt_start"] = c.adapt_start;
  j["adapt_interval"] = c.adapt_interval;
  if (c.adapt_window)
    j["adapt_window"] = *c.adapt_window;
  else
    j["adapt_window"] = "all-history";
  j["proposal_scale"] = c.proposal_scale;
  j["jitter"] = c.jitter;
  j["seed"] = c.seed;
  return j;
}

MCMCConfig mcmc_from_json(const json& j, MCMCConfig c) {
  const std::string what = "mcmc";
  require_object(j, what);
  reject_unknown(j,
                 {"iterations", "burn_in", "thin", "adapt_start", "adapt_interval", "adapt_window", "proposal_scale",
                  "jitter", "seed"},
                 what);
  if (j.contains("iterations")) c.iterations = get_long(j, "iterations", what);
  if (j.contains("burn_in")) c.burn_in = get_long(j, "burn_in", what);
  if (j.contains("thin")) c.thin = get_long(j, "thin", what);
  if (j.contains("adapt_start")) c.adapt_start = get_long(j, "adapt_start", what);
  if (j.contains("adapt_interval")) c.adapt_interval = get_long(j, "adapt_interval", what);
  if (j.contains("adapt_window")) {
    const json& w = j["adapt_window"];
    if (w.is_string() && w.get<std::string>() == "all-history")
      c.adapt_window.reset();
    else if (w.is_number_integer())
      c.adapt_window = w.get<long>();
    else
      throw ValidationError(what + ": field 'adapt_window' must be \"all-history\" or an integer");
  }
  if (j.contains("proposal_scale")) c.proposal_scale = get_double(j, "proposal_scale", what);
  if (j.contains("jitter")) c.jitter = get_double(j, "jitter", what);
  if (j.contains("seed")) c.seed = get_seed(j, "seed", what);
  return c;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["beta11"] = s.beta11;
  j["beta21"] = s.beta21;
  j["psi"] = s.psi;
  j["n"] = s.n;
  j["censoring"] = to_string(s.censoring);
  j["frailty"] = to_string(s.frailty);
  j["seed"] = s.seed;
  return j;
}

json layout_to_json(const ParamLayout& l) { return {{"n_prime", l.n_prime}, {"p", l.p}, {"q", l.q}}; }

std::vector<std::string> split_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("write failed for " + path.string());
}

Dataset parse_dataset_csv(std::istream& in, const std::optional<Vector>& grid, const TimeScale& time_scale) {
  if (!(time_scale.scale > 0.0) || !std::isfinite(time_scale.scale) || !std::isfinite(time_scale.offset))
    throw ValidationError("time_scale: scale must be positive and finite");
  const std::vector<std::string> lines = split_lines(in);
  std::size_t header_line = 0;
  while (header_line < lines.size() && trim(lines[header_line]).empty()) ++header_line;
  if (header_line == lines.size()) throw ValidationError("dataset: empty file");

  const std::vector<std::string> header = split_csv(lines[header_line]);
  std::map<std::string, std::size_t> column;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (!column.emplace(header[k], k).second) throw ValidationError("dataset: duplicate column '" + header[k] + "'");
  }
  for (const char* required : {"u", "delta", "n_count"})
    if (!column.count(required)) throw ValidationError(std::string("dataset: missing column '") + required + "'");

  auto count_prefixed = [&](const std::string& prefix) {
    Index n = 0;
    while (column.count(prefix + std::to_string(n + 1))) ++n;
    for (const auto& [name, idx] : column) {
      if (name.rfind(prefix, 0) == 0) {
        const std::string rest = name.substr(prefix.size());
        const long k = std::strtol(rest.c_str(), nullptr, 10);
        if (k < 1 || k > n) throw ValidationError("dataset: missing column '" + prefix + std::to_string(n + 1) + "'");
      }
    }
    return n;
  };
  const Index p = count_prefixed("x1_");
  const Index q = count_prefixed("x2_");

  std::vector<Observation> obs;
  for (std::size_t li = header_line + 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const std::vector<std::string> fields = split_csv(lines[li]);
    const std::string where = "dataset line " + std::to_string(li + 1);
    if (fields.size() != header.size())
      throw ValidationError(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                            std::to_string(fields.size()));
    Observation o;
    o.u = time_scale.apply(parse_double(fields[column["u"]], where + ", column 'u'"));
    const long delta = parse_long(fields[column["delta"]], where + ", column 'delta'");
    if (delta != 0 && delta != 1) throw ValidationError(where + ", column 'delta': must be 0 or 1");
    o.delta = static_cast<int>(delta);
    o.n_count = parse_long(fields[column["n_count"]], where + ", column 'n_count'");
    o.x1.resize(p);
    o.x2.resize(q);
    for (Index k = 0; k < p; ++k) {
      const std::string name = "x1_" + std::to_string(k + 1);
      o.x1(k) = parse_double(fields[column[name]], where + ", column '" + name + "'");
    }
    for (Index k = 0; k < q; ++k) {
      const std::string name = "x2_" + std::to_string(k + 1);
      o.x2(k) = parse_double(fields[column[name]], where + ", column '" + name + "'");
    }
    obs.push_back(std::move(o));
  }
  if (obs.empty()) throw ValidationError("dataset: no observations");
  if (grid) {
    Vector g = *grid;
    for (Index d = 0; d < g.size(); ++d) g(d) = time_scale.apply(g(d));
    return Dataset(std::move(obs), std::move(g), p, q);
  }
  return Dataset::with_inferred_grid(std::move(obs), p, q);
}

Dataset read_dataset_csv(const std::filesystem::path& path, const std::optional<Vector>& grid,
                         const TimeScale& time_scale) {
  std::ifstream in = open_input(path);
  return parse_dataset_csv(in, grid, time_scale);
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  out << "u,delta,n_count";
  for (Index k = 0; k < data.p(); ++k) out << ",x1_" << k + 1;
  for (Index k = 0; k < data.q(); ++k) out << ",x2_" << k + 1;
  out << '\n';
  for (const Observation& o : data.observations()) {
    out << num(o.u) << ',' << o.delta << ',' << o.n_count;
    for (Index k = 0; k < o.x1.size(); ++k) out << ',' << num(o.x1(k));
    for (Index k = 0; k < o.x2.size(); ++k) out << ',' << num(o.x2(k));
    out << '\n';
  }
}

void write_chain_csv(const Chain& chain, std::ostream& out) {
  for (std::size_t k = 0; k < chain.labels.size(); ++k) out << (k ? "," : "") << chain.labels[k];
  out << '\n';
  for (Index s = 0; s < chain.size(); ++s) {
    for (Index k = 0; k < chain.dim(); ++k) out << (k ? "," : "") << num(chain.draws(s, k));
    out << '\n';
  }
}

std::string chain_metadata_json(const Chain& chain) {
  json j;
  j["labels"] = chain.labels;
  if (chain.layout) j["layout"] = layout_to_json(*chain.layout);
  j["config"] = mcmc_to_json(chain.config);
  j["seed"] = chain.config.seed;
  j["retained"] = chain.size();
  j["acceptance_rate"] = chain.acceptance_rate;
  j["map_point"] = to_json(chain.map_point);
  j["proposal_cov_final"] = to_json(chain.proposal_cov_final);
  j["warnings"] = chain.warnings;
  return j.dump(2) + "\n";
}

Chain read_chain(const std::filesystem::path& csv_path, const std::filesystem::path& metadata_path) {
  const std::string what = "chain metadata " + metadata_path.string();
  const json meta = parse_json(read_text_file(metadata_path), what);
  require_object(meta, what);

  Chain chain;
  try {
    if (meta.contains("config")) chain.config = mcmc_from_json(meta["config"], {});
    if (meta.contains("layout")) {
      const json& l = meta["layout"];
      chain.layout = ParamLayout{get_long(l, "n_prime", what), get_long(l, "p", what), get_long(l, "q", what)};
    }
    if (meta.contains("acceptance_rate")) chain.acceptance_rate = get_double(meta, "acceptance_rate", what);
    if (meta.contains("map_point")) chain.map_point = get_vector(meta["map_point"], "map_point", what);
    if (meta.contains("proposal_cov_final") && !meta["proposal_cov_final"].empty())
      chain.proposal_cov_final = get_matrix(meta["proposal_cov_final"], "proposal_cov_final", what);
    if (meta.contains("warnings")) chain.warnings = meta["warnings"].get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ValidationError(what + ": " + e.what());
  }

  std::ifstream in = open_input(csv_path);
  const std::vector<std::string> lines = split_lines(in);
  if (lines.empty()) throw ValidationError("chain " + csv_path.string() + ": empty file");
  chain.labels = split_csv(lines.front());
  if (chain.layout && static_cast<Index>(chain.labels.size()) != chain.layout->dim())
    throw ValidationError("chain " + csv_path.string() + ": header has " + std::to_string(chain.labels.size()) +
                          " columns but the layout needs " + std::to_string(chain.layout->dim()));
  if (chain.layout && chain.labels != chain.layout->labels())
    throw ValidationError("chain " + csv_path.string() + ": column labels do not match the parameter layout");
  std::vector<std::vector<double>> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const std::vector<std::string> fields = split_csv(lines[li]);
    const std::string where = "chain " + csv_path.string() + " line " + std::to_string(li + 1);
    if (fields.size() != chain.labels.size()) throw ValidationError(where + ": wrong number of fields");
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_double(f, where));
    rows.push_back(std::move(row));
  }
  chain.draws.resize(static_cast<Index>(rows.size()), static_cast<Index>(chain.labels.size()));
  for (std::size_t s = 0; s < rows.size(); ++s)
    for (std::size_t k = 0; k < rows[s].size(); ++k)
      chain.draws(static_cast<Index>(s), static_cast<Index>(k)) = rows[s][k];
  return chain;
}

std::string mcmc_config_json(const MCMCConfig& config) { return mcmc_to_json(config).dump(2) + "\n"; }

MCMCConfig parse_mcmc_config(const std::string& json_text, const MCMCConfig& defaults) {
  return mcmc_from_json(parse_json(json_text, "mcmc"), defaults);
}

std::string scenario_json(const Scenario& scenario) { return scenario_to_json(scenario).dump(2) + "\n"; }

Scenario parse_scenario(const std::string& json_text) {
  const std::string what = "scenario";
  const json j = parse_json(json_text, what);
  require_object(j, what);
  reject_unknown(j, {"beta11", "beta21", "psi", "n", "censoring", "frailty", "seed"}, what);
  Scenario s;
  if (j.contains("beta11")) s.beta11 = get_double(j, "beta11", what);
  if (j.contains("beta21")) s.beta21 = get_double(j, "beta21", what);
  if (j.contains("psi")) s.psi = get_double(j, "psi", what);
  if (j.contains("n")) s.n = get_long(j, "n", what);
  if (j.contains("censoring")) s.censoring = censoring_from_string(get_string(j, "censoring", what));
  if (j.contains("frailty")) s.frailty = frailty_from_string(get_string(j, "frailty", what));
  if (j.contains("seed")) s.seed = get_seed(j, "seed", what);
  s.validate();
  return s;
}

PriorSpec parse_prior_spec(const std::string& json_text, const ParamLayout& layout) {
  const json j = parse_json(json_text, "priors");
  require_object(j, "priors");
  reject_unknown(j, {"phi_star", "nu", "beta1", "beta2", "psi_star"}, "priors");
  const PriorSpec vague = PriorSpec::vague(layout);

  auto diag_block = [&](const std::string& name, Index n, const GaussianBlock& fallback, const std::string& size_name) {
    if (!j.contains(name)) return std::pair<Vector, Vector>{fallback.mean(), fallback.cov().diagonal()};
    const json& b = j[name];
    const std::string what = "priors." + name;
    require_object(b, what);
    reject_unknown(b, {"mean", "variance"}, what);
    if (!b.contains("mean") || !b.contains("variance"))
      throw ValidationError(what + ": needs both 'mean' and 'variance'");
    return std::pair<Vector, Vector>{get_block_vector(b, "mean", n, "priors." + name, size_name),
                                     get_block_vector(b, "variance", n, "priors." + name, size_name)};
  };

  const std::string grid_size = "the dataset grid has n'";
  auto [phi_mean, phi_var] = diag_block("phi_star", layout.n_prime, vague.phi_star(), grid_size);
  auto [b1_mean, b1_var] = diag_block("beta1", layout.p, vague.beta1(), "the dataset has p");
  auto [b2_mean, b2_var] = diag_block("beta2", layout.q, vague.beta2(), "the dataset has q");

  Vector nu_mean = vague.nu().mean();
  Matrix nu_cov = vague.nu().cov();
  if (j.contains("nu")) {
    const json& b = j["nu"];
    const std::string what = "priors.nu";
    require_object(b, what);
    reject_unknown(b, {"mean", "variance", "rho", "covariance"}, what);
    if (!b.contains("mean")) throw ValidationError(what + ": needs 'mean'");
    nu_mean = get_block_vector(b, "mean", layout.n_prime, what, grid_size);
    if (b.contains("covariance")) {
      if (b.contains("variance") || b.contains("rho"))
        throw ValidationError(what + ": give either 'covariance' or 'variance' (with optional 'rho'), not both");
      nu_cov = get_matrix(b["covariance"], "covariance", what);
      if (nu_cov.rows() != layout.n_prime)
        throw ValidationError(what + ".covariance is " + std::to_string(nu_cov.rows()) + "x" +
                              std::to_string(nu_cov.rows()) + " but " + grid_size + " = " +
                              std::to_string(layout.n_prime));
    } else {
      if (!b.contains("variance")) throw ValidationError(what + ": needs 'variance' or 'covariance'");
      const Vector var = get_block_vector(b, "variance", layout.n_prime, what, grid_size);
      if (b.contains("rho"))
        nu_cov = ar1_covariance(var, get_double(b, "rho", what));
      else
        nu_cov = var.asDiagonal();
    }
  }

  double psi_mean = vague.psi_star().mean()(0);
  double psi_var = vague.psi_star().cov()(0, 0);
  if (j.contains("psi_star")) {
    const json& b = j["psi_star"];
    const std::string what = "priors.psi_star";
    require_object(b, what);
    reject_unknown(b, {"mean", "variance"}, what);
    if (!b.contains("mean") || !b.contains("variance"))
      throw ValidationError(what + ": needs both 'mean' and 'variance'");
    psi_mean = get_double(b, "mean", what);
    psi_var = get_double(b, "variance", what);
  }
  try {
    return PriorSpec(phi_mean, phi_var, nu_mean, nu_cov, b1_mean, b1_var, b2_mean, b2_var, psi_mean, psi_var);
  } catch (const DomainError& e) {
    throw ValidationError(std::string("priors: ") + e.what());
  }
}

std::string prior_spec_json(const PriorSpec& prior) {
  json j;
  j["phi_star"] = {{"mean", to_json(prior.phi_star().mean())},
                   {"variance", to_json(Vector(prior.phi_star().cov().diagonal()))}};
  j["nu"] = {{"mean", to_json(prior.nu().mean())}, {"covariance", to_json(prior.nu().cov())}};
  j["beta1"] = {{"mean", to_json(prior.beta1().mean())},
                {"variance", to_json(Vector(prior.beta1().cov().diagonal()))}};
  j["beta2"] = {{"mean", to_json(prior.beta2().mean())},
                {"variance", to_json(Vector(prior.beta2().cov().diagonal()))}};
  j["psi_star"] = {{"mean", prior.psi_star().mean()(0)}, {"variance", prior.psi_star().cov()(0, 0)}};
  return j.dump(2) + "\n";
}

FitConfig parse_fit_config(const std::string& json_text, Index p, Index q) {
  const std::string what = "fit config";
  const json j = parse_json(json_text, what);
  require_object(j, what);
  reject_unknown(j, {"grid", "time_scale", "profiles", "time_mesh", "chains"}, what);
  FitConfig fc;
  if (j.contains("grid")) fc.grid = get_vector(j["grid"], "grid", what);
  if (j.contains("time_mesh")) fc.time_mesh = get_vector(j["time_mesh"], "time_mesh", what);
  if (j.contains("chains")) {
    fc.chains = static_cast<int>(get_long(j, "chains", what));
    if (fc.chains < 1) throw ValidationError(what + ": field 'chains' must be at least 1");
  }
  if (j.contains("time_scale")) {
    const json& t = j["time_scale"];
    require_object(t, what + ".time_scale");
    reject_unknown(t, {"offset", "scale"}, what + ".time_scale");
    if (t.contains("offset")) fc.time_scale.offset = get_double(t, "offset", what + ".time_scale");
    if (t.contains("scale")) fc.time_scale.scale = get_double(t, "scale", what + ".time_scale");
    if (!(fc.time_scale.scale > 0.0)) throw ValidationError(what + ".time_scale: 'scale' must be positive");
  }
  if (j.contains("profiles")) {
    if (!j["profiles"].is_array()) throw ValidationError(what + ": field 'profiles' must be an array");
    std::size_t k = 0;
    for (const json& pj : j["profiles"]) {
      const std::string pw = what + ".profiles[" + std::to_string(k++) + "]";
      require_object(pj, pw);
      reject_unknown(pj, {"name", "x1", "x2"}, pw);
      CovariateProfile prof;
      prof.name = pj.contains("name") ? get_string(pj, "name", pw) : "profile_" + std::to_string(k);
      prof.x1 = pj.contains("x1") ? get_block_vector(pj, "x1", p, pw, "the dataset has p") : Vector::Zero(p);
      prof.x2 = pj.contains("x2") ? get_block_vector(pj, "x2", q, pw, "the dataset has q") : Vector::Zero(q);
      fc.profiles.push_back(std::move(prof));
    }
  }
  return fc;
}

std::string format_summary_table(const FitSummary& summary) {
  std::ostringstream out;
  const std::string bci = fixed(100.0 * summary.level, 0) + "% BCI";
  out << pad("Parameter", 12, true) << pad("Estimate", 12) << pad("PSD", 12) << "  " << bci << '\n';
  for (const auto& p : summary.parameters) {
    out << pad(p.name, 12, true) << pad(fixed(p.estimate), 12) << pad(fixed(p.psd), 12) << "  ("
        << fixed(p.lower) << ", " << fixed(p.upper) << ")\n";
  }
  out << "retained draws: " << summary.s0 << '\n';
  return out.str();
}

std::string summary_json(const FitSummary& summary) {
  json j;
  j["level"] = summary.level;
  j["retained"] = summary.s0;
  json params = json::array();
  for (const auto& p : summary.parameters)
    params.push_back({{"name", p.name}, {"estimate", p.estimate}, {"psd", p.psd}, {"lower", p.lower},
                      {"upper", p.upper}});
  j["parameters"] = params;
  j["baseline"] = {{"grid", to_json(summary.baseline.grid)},
                   {"phi_hat", to_json(summary.baseline.phi_hat)},
                   {"nu_hat", to_json(summary.baseline.nu_hat)}};
  return j.dump(2) + "\n";
}

void write_influence_csv(const InfluenceReport& report, std::ostream& out) {
  out << "subject,cpo,log_cpo,kl,influential\n";
  for (Index i = 0; i < report.kl.size(); ++i) {
    out << i + 1 << ',' << num(report.cpo(i)) << ',' << num(report.log_cpo(i)) << ',' << num(report.kl(i)) << ','
        << (report.influential[static_cast<std::size_t>(i)] ? 1 : 0) << '\n';
  }
}

void write_kl_plot_csv(const InfluenceReport& report, std::ostream& out) {
  out << "subject,kl\n";
  for (Index i = 0; i < report.kl.size(); ++i) out << i + 1 << ',' << num(report.kl(i)) << '\n';
}

std::string model_fit_json(const InfluenceReport& report) {
  json j;
  j["dic"] = report.dic;
  j["p_d"] = report.p_d;
  j["dev_bar"] = report.dev_bar;
  j["dev_at_mean"] = report.dev_at_mean;
  j["lpml"] = report.lpml;
  j["kl_threshold"] = kInfluenceThreshold;
  j["influential_count"] = report.influential_count();
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

void write_convergence_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "parameter,psrf,ess\n";
  for (const auto& r : report.rows) out << r.label << ',' << num(r.psrf) << ',' << num(r.ess) << '\n';
}

void write_acf_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "parameter,lag,acf\n";
  for (const auto& r : report.rows)
    for (Index k = 0; k < r.acf.size(); ++k) out << r.label << ',' << k << ',' << num(r.acf(k)) << '\n';
}

std::string format_replication_table(const ReplicationReport& report) {
  std::ostringstream out;
  const Scenario& s = report.scenario;
  out << "scenario: beta11=" << num(s.beta11) << " beta21=" << num(s.beta21);
  if (s.frailty == Frailty::Gamma) out << " psi=" << num(s.psi);
  out << " n=" << s.n << " censoring=" << to_string(s.censoring) << " frailty=" << to_string(s.frailty) << '\n';
  out << "replicates: " << report.replicates << " (failed: " << report.failures << ")"
      << "  mcmc: " << report.mcmc.iterations << "/" << report.mcmc.burn_in << "/" << report.mcmc.thin << '\n';
  out << pad("Parameter", 10, true) << pad("True", 9) << pad("Mean", 9) << pad("Abs. bias", 11) << pad("ESD", 9)
      << pad("SSE", 9) << pad("CP", 7) << '\n';
  for (const auto& r : report.rows) {
    out << pad(r.name, 10, true) << pad(fixed(r.truth, 2), 9) << pad(fixed(r.mean), 9) << pad(fixed(r.abs_bias), 11)
        << pad(fixed(r.esd), 9) << pad(fixed(r.sse), 9) << pad(fixed(r.cp, 2), 7) << '\n';
  }
  out << "MeanMSE Lambda10: " << fixed(report.mean_mse_lambda10) << '\n';
  out << "MeanMSE Lambda20: " << fixed(report.mean_mse_lambda20) << '\n';
  out << "mean acceptance: " << fixed(report.mean_acceptance, 3) << '\n';
  return out.str();
}

std::string replication_json(const ReplicationReport& report) {
  json j;
  j["scenario"] = scenario_to_json(report.scenario);
  j["mcmc"] = mcmc_to_json(report.mcmc);
  j["replicates"] = report.replicates;
  j["failures"] = report.failures;
  j["failure_messages"] = report.failure_messages;
  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"parameter", r.name}, {"true", r.truth}, {"mean", r.mean}, {"abs_bias", r.abs_bias},
                    {"esd", r.esd}, {"sse", r.sse}, {"cp", r.cp}});
  j["rows"] = rows;
  j["mean_mse_lambda10"] = report.mean_mse_lambda10;
  j["mean_mse_lambda20"] = report.mean_mse_lambda20;
  j["mean_acceptance"] = report.mean_acceptance;
  return j.dump(2) + "\n";
}

void write_replication_csv(const ReplicationReport& report, std::ostream& out) {
  out << "parameter,true,mean,abs_bias,esd,sse,cp\n";
  for (const auto& r : report.rows)
    out << r.name << ',' << num(r.truth) << ',' << num(r.mean) << ',' << num(r.abs_bias) << ',' << num(r.esd) << ','
        << num(r.sse) << ',' << num(r.cp) << '\n';
}

}  // namespace jcs
