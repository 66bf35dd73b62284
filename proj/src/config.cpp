#include "coopd2d/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace coopd2d {

const char* scheme_name(SchemeKind s) {
  switch (s) {
    case SchemeKind::Optimal: return "optimal";
    case SchemeKind::Random: return "random";
    case SchemeKind::Proposed: return "proposed";
    case SchemeKind::ProposedCoopSets: return "proposed-coopsets";
  }
  return "?";
}

SchemeKind scheme_from_name(const std::string& name) {
  if (name == "optimal") return SchemeKind::Optimal;
  if (name == "random") return SchemeKind::Random;
  if (name == "proposed") return SchemeKind::Proposed;
  if (name == "proposed-coopsets" || name == "proposed_coopsets")
    return SchemeKind::ProposedCoopSets;
  throw ConfigError("run.schemes: unknown scheme '" + name + "'");
}

QosConfig RunConfig::qos() const {
  QosConfig q;
  q.q_c = q_c;
  q.q_d = q_d;
  q.mu = mu;
  q.nu = nu;
  q.p_min_w = dbm_to_watts(p_min_dbm);
  q.p_max_w = dbm_to_watts(p_max_dbm);
  q.phi = phi;
  q.phi2 = phi2;
  return q;
}

NoiseModel RunConfig::noise() const { return make_noise_model(n0_dbm_per_hz, bandwidth_hz); }

ActionGrid RunConfig::reporting_grid() const {
  return build_grid(dbm_to_watts(p_min_dbm), dbm_to_watts(p_max_dbm), dp_db, dtheta);
}

ActionGrid RunConfig::training_grid() const {
  return build_grid(dbm_to_watts(p_min_dbm), dbm_to_watts(p_max_dbm), training_dp_db, dtheta);
}

TrainConfig RunConfig::train(std::uint64_t agent_seed) const {
  TrainConfig t;
  t.episodes = episodes;
  t.steps_per_episode = steps;
  t.minibatch = minibatch;
  t.learning_rate = lr;
  t.discount = discount;
  t.replay_capacity = static_cast<std::size_t>(replay);
  t.seed = agent_seed;
  t.hidden_sizes = hidden;
  t.td_candidates = td_candidates;
  t.scale_lr_by_reward = scale_lr_by_reward;
  t.adam = adam_optimizer;
  return t;
}

CoopSetConfig RunConfig::coopset() const { return {r1_m, r2_m}; }

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

double parse_double(const std::string& v, const std::string& field) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(field + ": expected a number, got '" + v + "'");
  }
}

long parse_int(const std::string& v, const std::string& field) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(field + ": expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& v, const std::string& field) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(field + ": expected a boolean, got '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  for (const std::string& part : split(text, ',')) {
    if (part.find(':') != std::string::npos) {
      const auto bits = split(part, ':');
      if (bits.size() < 2 || bits.size() > 3)
        throw ConfigError(field + ": range must be lo:hi or lo:hi:step");
      const double lo = parse_double(bits[0], field);
      const double hi = parse_double(bits[1], field);
      const double step = bits.size() == 3 ? parse_double(bits[2], field) : 1.0;
      if (!(step > 0.0)) throw ConfigError(field + ": range step must be > 0");
      if (hi < lo) throw ConfigError(field + ": range hi must be >= lo");
      for (double v = lo; v <= hi + 1e-9 * step; v += step) out.push_back(v);
    } else if (!part.empty()) {
      out.push_back(parse_double(part, field));
    }
  }
  if (out.empty()) throw ConfigError(field + ": empty list");
  return out;
}

namespace {

void apply_kv(RunConfig& c, const std::string& section, const std::string& key,
              const std::string& raw) {
  const std::string field = section + "." + key;
  const std::string v = unquote(trim(raw));
  auto num = [&] { return parse_double(v, field); };
  auto integer = [&] { return parse_int(v, field); };

  if (section == "scenario") {
    if (key == "m") c.m_links = static_cast<int>(integer());
    else if (key == "n") c.n_links = static_cast<int>(integer());
    else if (key == "radius_m") c.radius_m = num();
    else if (key == "pl_exponent") c.pl_exponent = num();
    else if (key == "d2d_max_pair_distance_m") c.d2d_max_pair_distance_m = num();
    else throw ConfigError(field + ": unknown key");
  } else if (section == "qos") {
    if (key == "q_c") c.q_c = num();
    else if (key == "q_d") c.q_d = num();
    else if (key == "mu") c.mu = num();
    else if (key == "nu") c.nu = num();
    else if (key == "p_min_dbm") c.p_min_dbm = num();
    else if (key == "p_max_dbm") c.p_max_dbm = num();
    else if (key == "phi") c.phi = num();
    else if (key == "phi2") c.phi2 = num();
    else throw ConfigError(field + ": unknown key");
  } else if (section == "grid") {
    if (key == "dp_db") c.dp_db = num();
    else if (key == "dtheta") c.dtheta = num();
    else if (key == "training_dp_db") c.training_dp_db = num();
    else throw ConfigError(field + ": unknown key");
  } else if (section == "train") {
    if (key == "episodes") c.episodes = static_cast<int>(integer());
    else if (key == "steps") c.steps = static_cast<int>(integer());
    else if (key == "minibatch") c.minibatch = static_cast<int>(integer());
    else if (key == "lr") c.lr = num();
    else if (key == "discount") c.discount = num();
    else if (key == "replay") c.replay = static_cast<int>(integer());
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(integer());
    else if (key == "td_candidates") c.td_candidates = static_cast<int>(integer());
    else if (key == "scale_lr_by_reward") c.scale_lr_by_reward = parse_bool(v, field);
    else if (key == "adam") c.adam_optimizer = parse_bool(v, field);
    else if (key == "hidden") {
      c.hidden.clear();
      for (double h : parse_number_list(v, field)) c.hidden.push_back(static_cast<int>(h));
    } else throw ConfigError(field + ": unknown key");
  } else if (section == "coopset") {
    if (key == "r1_m") c.r1_m = num();
    else if (key == "r2_m") c.r2_m = num();
    else throw ConfigError(field + ": unknown key");
  } else if (section == "noise") {
    if (key == "n0_dbm_per_hz") c.n0_dbm_per_hz = num();
    else if (key == "bandwidth_hz") c.bandwidth_hz = num();
    else throw ConfigError(field + ": unknown key");
  } else if (section == "run") {
    if (key == "schemes") {
      c.schemes.clear();
      if (v == "all") {
        c.schemes = {SchemeKind::Optimal, SchemeKind::Random, SchemeKind::Proposed,
                     SchemeKind::ProposedCoopSets};
      } else {
        for (const std::string& name : split(v, ','))
          if (!name.empty()) c.schemes.push_back(scheme_from_name(name));
      }
      if (c.schemes.empty()) throw ConfigError(field + ": empty scheme list");
    } else if (key == "runs_per_point") c.runs_per_point = static_cast<int>(integer());
    else if (key == "n_sweep") {
      c.n_sweep.clear();
      for (double n : parse_number_list(v, field)) c.n_sweep.push_back(static_cast<int>(n));
    } else if (key == "workers") c.workers = static_cast<int>(integer());
    else if (key == "out_dir") c.out_dir = v;
    else if (key == "record_timing") c.record_timing = parse_bool(v, field);
    else if (key == "distances") c.distances = parse_number_list(v, field);
    else if (key == "warm_start") c.warm_start = parse_bool(v, field);
    else throw ConfigError(field + ": unknown key");
  } else {
    throw ConfigError("[" + section + "]: unknown section");
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text,
                            const std::vector<ConfigOverride>& overrides) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key +
                        "' outside any [section]");
    apply_kv(cfg, section, key, value);
  }
  for (const auto& [path, value] : overrides) {
    const std::size_t dot = path.find('.');
    if (dot == std::string::npos)
      throw ConfigError("override '" + path + "': expected section.key");
    apply_kv(cfg, path.substr(0, dot), path.substr(dot + 1), value);
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config(const std::string& path, const std::vector<ConfigOverride>& overrides) {
  if (path.empty()) return parse_config_text("", overrides);
  std::ifstream f(path);
  if (!f) throw ConfigError("config file not found: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

void validate(const RunConfig& cfg) {
  if (cfg.m_links < 1) throw ConfigError("scenario.m: must be >= 1");
  if (cfg.n_links < 1) throw ConfigError("scenario.n: must be >= 1");
  if (!(cfg.radius_m > 0.0)) throw ConfigError("scenario.radius_m: must be > 0");
  if (!(cfg.pl_exponent > 0.0)) throw ConfigError("scenario.pl_exponent: must be > 0");
  if (cfg.d2d_max_pair_distance_m < 0.0)
    throw ConfigError("scenario.d2d_max_pair_distance_m: must be >= 0");
  if (!(cfg.q_c > 0.0)) throw ConfigError("qos.q_c: must be > 0");
  if (!(cfg.q_d > 0.0)) throw ConfigError("qos.q_d: must be > 0");
  if (!(cfg.mu > 0.0)) throw ConfigError("qos.mu: must be > 0");
  if (!(cfg.nu > 0.0)) throw ConfigError("qos.nu: must be > 0");
  if (cfg.p_min_dbm > cfg.p_max_dbm)
    throw ConfigError("qos.p_min_dbm: must be <= qos.p_max_dbm");
  if (cfg.phi < 0.0) throw ConfigError("qos.phi: must be >= 0");
  if (cfg.phi2 < 0.0) throw ConfigError("qos.phi2: must be >= 0");
  if (!(cfg.bandwidth_hz > 0.0)) throw ConfigError("noise.bandwidth_hz: must be > 0");
  if (!(cfg.r1_m > 0.0)) throw ConfigError("coopset.r1_m: must be > 0");
  if (!(cfg.r2_m > 0.0)) throw ConfigError("coopset.r2_m: must be > 0");
  if (cfg.runs_per_point < 1) throw ConfigError("run.runs_per_point: must be >= 1");
  if (cfg.n_sweep.empty()) throw ConfigError("run.n_sweep: must not be empty");
  for (int n : cfg.n_sweep)
    if (n < 1) throw ConfigError("run.n_sweep: entries must be >= 1");
  if (cfg.workers < 0) throw ConfigError("run.workers: must be >= 0");
  if (cfg.distances.empty()) throw ConfigError("run.distances: must not be empty");
  for (double d : cfg.distances)
    if (!(d > 0.0)) throw ConfigError("run.distances: entries must be > 0");

  try {
    validate(cfg.qos());
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("qos: ") + e.what());
  }
  try {
    cfg.reporting_grid();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("grid.dp_db/dtheta: ") + e.what());
  }
  try {
    cfg.training_grid();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("grid.training_dp_db/dtheta: ") + e.what());
  }
  try {
    validate(cfg.train(cfg.seed));
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
}

}  // namespace coopd2d
