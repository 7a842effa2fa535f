#include "sqrs/io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sqrs {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  auto end = s.find_last_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& section, const std::string& key,
                    const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config value for " + section + "." + key +
                                " is not a number: '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& section, const std::string& key,
                        const std::string& value) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size() || v < 0) throw std::invalid_argument("bad integer");
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("config value for " + section + "." + key +
                                " is not a nonnegative integer: '" + value + "'");
  }
}

bool parse_bool(const std::string& section, const std::string& key,
                const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config value for " + section + "." + key +
                              " is not a boolean: '" + value + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& value, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse(item));
  }
  return out;
}

AttackKind attack_kind_from_name(const std::string& name) {
  if (name == "none") return AttackKind::None;
  if (name == "measure-resend") return AttackKind::MeasureResend;
  if (name == "photon-split") return AttackKind::PhotonSplit;
  if (name == "spoof-flip") return AttackKind::SpoofFlip;
  if (name == "mitm-relabel") return AttackKind::MitmRelabel;
  if (name == "impersonate-alice") return AttackKind::ImpersonateAlice;
  if (name == "impersonate-bob") return AttackKind::ImpersonateBob;
  throw std::invalid_argument("unknown attack kind: " + name);
}

std::string attack_kind_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::MeasureResend: return "measure-resend";
    case AttackKind::PhotonSplit: return "photon-split";
    case AttackKind::SpoofFlip: return "spoof-flip";
    case AttackKind::MitmRelabel: return "mitm-relabel";
    case AttackKind::ImpersonateAlice: return "impersonate-alice";
    case AttackKind::ImpersonateBob: return "impersonate-bob";
  }
  return "none";
}

void apply_key(ExperimentConfig& cfg, const std::string& section,
               const std::string& key, const std::string& value) {
  auto num = [&] { return parse_double(section, key, value); };
  auto u64 = [&] { return parse_u64(section, key, value); };
  auto flag = [&] { return parse_bool(section, key, value); };
  auto u64_list = [&] {
    return parse_list<std::uint64_t>(
        value, [&](const std::string& s) { return parse_u64(section, key, s); });
  };
  auto num_list = [&] {
    return parse_list<double>(
        value, [&](const std::string& s) { return parse_double(section, key, s); });
  };

  if (section == "run") {
    if (key == "scenario") { cfg.scenario = value; return; }
    if (key == "trials") { cfg.trials = u64(); return; }
    if (key == "seed") { cfg.master_seed = u64(); return; }
  } else if (section == "grid") {
    if (key == "k") { cfg.grid_k = static_cast<int>(u64()); return; }
    if (key == "theta0") { cfg.theta0 = num(); return; }
  } else if (section == "estimation") {
    if (key == "phi") { cfg.true_phi = num(); return; }
    if (key == "mu") { cfg.mu = u64(); return; }
    if (key == "passes") { cfg.passes = u64_list(); return; }
    if (key == "phi_list") { cfg.phi_list = num_list(); return; }
    if (key == "mu_list") { cfg.mu_list = u64_list(); return; }
    if (key == "qubits_per_test") { cfg.qubits_per_test = u64(); return; }
    if (key == "max_passes") { cfg.max_passes = u64(); return; }
    if (key == "multipass") { cfg.multipass = u64(); return; }
    if (key == "n_single") { cfg.n_single = u64(); return; }
    if (key == "n_multi") { cfg.n_multi = u64(); return; }
    if (key == "n_baseline") { cfg.n_baseline = u64(); return; }
  } else if (section == "protocol") {
    if (key == "p") { cfg.p_test = num(); return; }
    if (key == "p_list") { cfg.p_list = num_list(); return; }
    if (key == "epsilon") { cfg.epsilon = num(); return; }
    if (key == "epsilon_tilde") { cfg.epsilon_tilde = num(); return; }
    if (key == "eta") { cfg.eta = num(); return; }
    if (key == "secrets_random") { cfg.secrets_random = flag(); return; }
  } else if (section == "attack") {
    if (key == "kind") { cfg.attack.kind = attack_kind_from_name(value); return; }
    if (key == "fraction") { cfg.attack.fraction = num(); return; }
    if (key == "eve_epsilon") { cfg.attack.eve_epsilon = num(); return; }
    if (key == "eve_epsilon_tilde") { cfg.attack.eve_epsilon_tilde = num(); return; }
    if (key == "delta") { cfg.attack.eve_delta = num(); return; }
    if (key == "gamma") { cfg.attack.eve_gamma = num(); return; }
    if (key == "kbar") { cfg.attack.kbar = num(); return; }
    if (key == "attack_count") { cfg.attack.attack_count = u64(); return; }
    if (key == "relabel_budget") { cfg.attack.relabel_budget = u64(); return; }
    if (key == "swap23") { cfg.attack.relabel_swap23 = flag(); return; }
    if (key == "pre_reveal") { cfg.attack.flip_pre_reveal = flag(); return; }
  } else if (section == "photonics") {
    if (key == "kbar") { cfg.kbar = num(); return; }
    if (key == "kbar_list") { cfg.kbar_list = num_list(); return; }
  } else {
    throw std::invalid_argument("unknown config section: [" + section + "]");
  }
  throw std::invalid_argument("unknown config key: " + section + "." + key);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw std::invalid_argument("malformed section header at line " +
                                    std::to_string(lineno));
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("expected key = value at line " +
                                  std::to_string(lineno));
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (section.empty()) {
      throw std::invalid_argument("key outside any section at line " +
                                  std::to_string(lineno));
    }
    apply_key(cfg, section, key, value);
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  return parse_config_text(read_file(path));
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["scenario"] = c.scenario;
  j["true_phi"] = c.true_phi;
  j["mu"] = c.mu;
  j["p_test"] = c.p_test;
  j["passes"] = c.passes;
  j["kbar"] = c.kbar;
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  j["grid_k"] = c.grid_k;
  j["theta0"] = c.theta0;
  j["epsilon"] = c.epsilon;
  j["epsilon_tilde"] = c.epsilon_tilde;
  j["eta"] = c.eta;
  j["secrets_random"] = c.secrets_random;
  j["phi_list"] = c.phi_list;
  j["mu_list"] = c.mu_list;
  j["p_list"] = c.p_list;
  j["kbar_list"] = c.kbar_list;
  j["qubits_per_test"] = c.qubits_per_test;
  j["max_passes"] = c.max_passes;
  j["multipass"] = c.multipass;
  j["n_single"] = c.n_single;
  j["n_multi"] = c.n_multi;
  j["n_baseline"] = c.n_baseline;
  j["attack"] = {{"kind", attack_kind_name(c.attack.kind)},
                 {"fraction", c.attack.fraction},
                 {"eve_epsilon", c.attack.eve_epsilon},
                 {"eve_epsilon_tilde", c.attack.eve_epsilon_tilde},
                 {"delta", c.attack.eve_delta},
                 {"gamma", c.attack.eve_gamma},
                 {"kbar", c.attack.kbar},
                 {"attack_count", c.attack.attack_count},
                 {"relabel_budget", c.attack.relabel_budget},
                 {"swap23", c.attack.relabel_swap23},
                 {"pre_reveal", c.attack.flip_pre_reveal}};
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.scenario = j.at("scenario").get<std::string>();
  c.true_phi = j.at("true_phi").get<double>();
  c.mu = j.at("mu").get<std::uint64_t>();
  c.p_test = j.at("p_test").get<double>();
  c.passes = j.at("passes").get<std::vector<std::uint64_t>>();
  c.kbar = j.at("kbar").get<double>();
  c.trials = j.at("trials").get<std::uint64_t>();
  c.master_seed = j.at("master_seed").get<std::uint64_t>();
  c.grid_k = j.at("grid_k").get<int>();
  c.theta0 = j.at("theta0").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.epsilon_tilde = j.at("epsilon_tilde").get<double>();
  c.eta = j.at("eta").get<double>();
  c.secrets_random = j.at("secrets_random").get<bool>();
  c.phi_list = j.at("phi_list").get<std::vector<double>>();
  c.mu_list = j.at("mu_list").get<std::vector<std::uint64_t>>();
  c.p_list = j.at("p_list").get<std::vector<double>>();
  c.kbar_list = j.at("kbar_list").get<std::vector<double>>();
  c.qubits_per_test = j.at("qubits_per_test").get<std::uint64_t>();
  c.max_passes = j.at("max_passes").get<std::uint64_t>();
  c.multipass = j.at("multipass").get<std::uint64_t>();
  c.n_single = j.at("n_single").get<std::uint64_t>();
  c.n_multi = j.at("n_multi").get<std::uint64_t>();
  c.n_baseline = j.at("n_baseline").get<std::uint64_t>();
  const auto& a = j.at("attack");
  c.attack.kind = attack_kind_from_name(a.at("kind").get<std::string>());
  c.attack.fraction = a.at("fraction").get<double>();
  c.attack.eve_epsilon = a.at("eve_epsilon").get<double>();
  c.attack.eve_epsilon_tilde = a.at("eve_epsilon_tilde").get<double>();
  c.attack.eve_delta = a.at("delta").get<double>();
  c.attack.eve_gamma = a.at("gamma").get<double>();
  c.attack.kbar = a.at("kbar").get<double>();
  c.attack.attack_count = a.at("attack_count").get<std::uint64_t>();
  c.attack.relabel_budget = a.at("relabel_budget").get<std::uint64_t>();
  c.attack.relabel_swap23 = a.at("swap23").get<bool>();
  c.attack.flip_pre_reveal = a.at("pre_reveal").get<bool>();
  return c;
}

std::string table_csv(const AggregateResult& result) {
  std::ostringstream out;
  bool first = true;
  for (const auto& name : result.key_names) {
    if (!first) out << ',';
    out << name;
    first = false;
  }
  for (const auto& name : result.stat_names) {
    if (!first) out << ',';
    out << name << ',' << name << "_se";
    first = false;
  }
  out << '\n';
  for (std::size_t r = 0; r < result.keys.size(); ++r) {
    first = true;
    for (double k : result.keys[r]) {
      if (!first) out << ',';
      out << format_double(k);
      first = false;
    }
    for (const auto& [value, se] : result.stats[r]) {
      if (!first) out << ',';
      out << format_double(value) << ',' << format_double(se);
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

std::string curves_csv(const AggregateResult& result) {
  std::ostringstream out;
  out << "theta";
  for (const auto& [name, values] : result.curves) out << ',' << name;
  out << '\n';
  const int k_bins = result.grid.k_bins;
  for (int k = 0; k < k_bins; ++k) {
    out << format_double(result.grid.theta0 + two_pi * k / k_bins);
    for (const auto& [name, values] : result.curves) {
      out << ',' << format_double(values[k]);
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::ordered_json summary_json(const ExperimentConfig& config,
                                    const AggregateResult& result,
                                    const std::string& format) {
  nlohmann::ordered_json j;
  j["scenario"] = config.scenario;
  j["master_seed"] = config.master_seed;
  j["config"] = config_to_json(config);
  j["key_names"] = result.key_names;
  j["stat_names"] = result.stat_names;
  if (format == "json") {
    j["rows"] = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < result.keys.size(); ++r) {
      nlohmann::ordered_json row;
      row["keys"] = result.keys[r];
      nlohmann::ordered_json stats = nlohmann::ordered_json::array();
      for (const auto& [value, se] : result.stats[r]) {
        stats.push_back({{"value", value}, {"se", se}});
      }
      row["stats"] = stats;
      j["rows"].push_back(row);
    }
    nlohmann::ordered_json curves;
    for (const auto& [name, values] : result.curves) curves[name] = values;
    j["curves"] = curves;
  }
  return j;
}

EmittedFiles emit(const ExperimentConfig& config, const AggregateResult& result,
                  const std::string& out_dir, const std::string& prefix,
                  const std::string& format) {
  if (format != "csv" && format != "json") {
    throw std::invalid_argument("format must be csv or json");
  }
  EmittedFiles files;
  std::string base = out_dir.empty() ? prefix : out_dir + "/" + prefix;
  if (format == "csv") {
    std::string table_path = base + "_table.csv";
    write_file(table_path, table_csv(result));
    files.paths.push_back(table_path);
    if (!result.curves.empty()) {
      std::string curves_path = base + "_curves.csv";
      write_file(curves_path, curves_csv(result));
      files.paths.push_back(curves_path);
    }
  }
  std::string summary_path = base + "_summary.json";
  write_file(summary_path, summary_json(config, result, format).dump(2) + "\n");
  files.paths.push_back(summary_path);
  return files;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sqrs
