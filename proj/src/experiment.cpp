#include "qcopa/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace qcopa {

ConfigError::ConfigError(Kind kind, std::size_t line, const std::string& what)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      kind_(kind),
      line_(line) {}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

struct Entry {
  std::string value;
  std::size_t line;
};

using Section = std::map<std::string, Entry>;

// Parsed sections plus the line of each section header.
struct Document {
  std::map<std::string, Section> sections;
  std::map<std::string, std::size_t> header_line;
};

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"network", {"gains", "p_max_dbm", "noise_dbm", "beta", "links", "n_power"}},
      {"learning",
       {"alpha", "gamma", "epsilon_start", "epsilon_end", "epsilon_decay_episodes",
        "exploration_fraction"}},
      {"experiment", {"episodes", "seed", "betas", "elimination", "output_dir"}},
  };
  return keys;
}

Document read_document(std::istream& in) {
  Document doc;
  std::string raw;
  std::string current;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(ConfigError::Kind::parse, line_no, "unterminated section header");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!known_keys().contains(current))
        throw ConfigError(ConfigError::Kind::parse, line_no,
                          "unknown section [" + current + "]");
      doc.sections[current];
      doc.header_line[current] = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(ConfigError::Kind::parse, line_no, "expected key = value");
    if (current.empty())
      throw ConfigError(ConfigError::Kind::parse, line_no, "key outside of a section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto& allowed = known_keys().at(current);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(ConfigError::Kind::parse, line_no,
                        "unknown key '" + key + "' in [" + current + "]");
    if (doc.sections[current].contains(key))
      throw ConfigError(ConfigError::Kind::parse, line_no, "duplicate key '" + key + "'");
    doc.sections[current][key] = {value, line_no};
  }
  return doc;
}

double to_double(const Entry& e, const std::string& key) {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (e.value.empty() || end != begin + e.value.size() || !std::isfinite(v))
    throw ConfigError(ConfigError::Kind::parse, e.line,
                      "'" + key + "' is not a number: " + e.value);
  return v;
}

std::uint64_t to_unsigned(const Entry& e, const std::string& key) {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  if (e.value.empty() || e.value[0] == '-')
    throw ConfigError(ConfigError::Kind::parse, e.line,
                      "'" + key + "' is not a non-negative integer: " + e.value);
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end != begin + e.value.size())
    throw ConfigError(ConfigError::Kind::parse, e.line,
                      "'" + key + "' is not a non-negative integer: " + e.value);
  return v;
}

std::vector<double> to_list(const Entry& e, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split(e.value, ','))
    out.push_back(to_double({item, e.line}, key));
  return out;
}

const Entry* find(const Section& s, const std::string& key) {
  auto it = s.find(key);
  return it == s.end() ? nullptr : &it->second;
}

[[noreturn]] void invalid(std::size_t line, const std::string& what) {
  throw ConfigError(ConfigError::Kind::validation, line, what);
}

NetworkConfig build_network(const Section& s, std::size_t header) {
  std::vector<double> gains{2.5, 1.5};
  std::size_t gains_line = header;
  if (auto* e = find(s, "gains")) {
    gains = to_list(*e, "gains");
    gains_line = e->line;
  }
  const std::size_t n = gains.size();
  if (n == 0) invalid(gains_line, "at least one agent is required");

  std::vector<double> caps;
  if (auto* e = find(s, "p_max_dbm")) {
    caps = to_list(*e, "p_max_dbm");
    if (caps.size() != n) invalid(e->line, "p_max_dbm needs one entry per gain");
  } else if (n == 2) {
    caps = {10.0, 13.0};
  } else {
    invalid(gains_line, "p_max_dbm is required when there are not exactly two agents");
  }

  NetworkConfig cfg;
  cfg.gain = gains;
  cfg.p_max_dbm = caps;
  cfg.noise_mw = dbm_to_mw(0.0);
  if (auto* e = find(s, "noise_dbm")) cfg.noise_mw = dbm_to_mw(to_double(*e, "noise_dbm"));

  if (auto* e = find(s, "n_power")) {
    const auto k = to_unsigned(*e, "n_power");
    if (k < 2) invalid(e->line, "n_power must be at least 2");
    cfg.n_power = static_cast<std::size_t>(k);
  }

  cfg.interferers.assign(n, {});
  const Entry* links = find(s, "links");
  const Entry* beta_entry = find(s, "beta");
  if (links && beta_entry) invalid(links->line, "give either beta or links, not both");
  if (links) {
    // "j->i:ratio" with 1-based ids: SBS j interferes at UE i.
    for (const auto& item : split(links->value, ',')) {
      const auto arrow = item.find("->");
      const auto colon = item.find(':');
      if (arrow == std::string::npos || colon == std::string::npos || colon < arrow)
        throw ConfigError(ConfigError::Kind::parse, links->line,
                          "link must look like 'j->i:beta', got '" + item + "'");
      const Entry from{trim(item.substr(0, arrow)), links->line};
      const Entry to{trim(item.substr(arrow + 2, colon - arrow - 2)), links->line};
      const Entry ratio{trim(item.substr(colon + 1)), links->line};
      const auto j = to_unsigned(from, "links");
      const auto i = to_unsigned(to, "links");
      const double b = to_double(ratio, "links");
      if (j < 1 || j > n || i < 1 || i > n) invalid(links->line, "link agent out of range");
      if (!(b >= 0.0 && b <= 1.0)) invalid(links->line, "interference ratio out of [0, 1]");
      cfg.interferers[i - 1].push_back({static_cast<AgentId>(j - 1), b});
    }
  } else {
    double beta = 0.3;
    if (beta_entry) {
      beta = to_double(*beta_entry, "beta");
      if (!(beta >= 0.0 && beta <= 1.0))
        invalid(beta_entry->line, "beta must lie in [0, 1], got " + beta_entry->value);
    }
    for (AgentId i = 0; i < n; ++i)
      for (AgentId j = 0; j < n; ++j)
        if (i != j) cfg.interferers[i].push_back({j, beta});
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    invalid(header, e.what());
  }
  return cfg;
}

LearningParams build_learning(const Section& s, std::size_t header, bool& explicit_decay,
                              double& fraction) {
  LearningParams p;
  auto set = [&](const char* key, double& field) {
    if (auto* e = find(s, key)) field = to_double(*e, key);
  };
  set("alpha", p.alpha);
  set("gamma", p.gamma);
  set("epsilon_start", p.epsilon_start);
  set("epsilon_end", p.epsilon_end);
  if (auto* e = find(s, "epsilon_decay_episodes")) {
    p.epsilon_decay_episodes = to_unsigned(*e, "epsilon_decay_episodes");
    explicit_decay = true;
  }
  if (auto* e = find(s, "exploration_fraction")) {
    fraction = to_double(*e, "exploration_fraction");
    if (!(fraction >= 0.0 && fraction <= 1.0))
      invalid(e->line, "exploration_fraction must lie in [0, 1]");
  }
  auto line_of = [&](const char* key) {
    auto* e = find(s, key);
    return e ? e->line : header;
  };
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) invalid(line_of("alpha"), "alpha must lie in (0, 1]");
  if (!(p.gamma >= 0.0 && p.gamma < 1.0)) invalid(line_of("gamma"), "gamma must lie in [0, 1)");
  if (!(p.epsilon_start >= 0.0 && p.epsilon_start <= 1.0))
    invalid(line_of("epsilon_start"), "epsilon_start must lie in [0, 1]");
  if (!(p.epsilon_end >= 0.0 && p.epsilon_end <= 1.0))
    invalid(line_of("epsilon_end"), "epsilon_end must lie in [0, 1]");
  if (p.epsilon_start < p.epsilon_end)
    invalid(line_of("epsilon_end"), "epsilon_start must be >= epsilon_end");
  return p;
}

}  // namespace

std::vector<double> parse_betas(const std::string& text) {
  std::vector<double> out;
  const std::string t = trim(text);
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3)
      throw ConfigError(ConfigError::Kind::parse, 0, "range must be start:stop:step");
    const double start = to_double({parts[0], 0}, "betas");
    const double stop = to_double({parts[1], 0}, "betas");
    const double step = to_double({parts[2], 0}, "betas");
    if (!(step > 0.0) || stop < start)
      throw ConfigError(ConfigError::Kind::validation, 0, "empty or inverted beta range");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k)
      out.push_back(start + static_cast<double>(k) * step);
  } else {
    for (const auto& item : split(t, ',')) out.push_back(to_double({item, 0}, "betas"));
  }
  for (double b : out)
    if (!(b >= 0.0 && b <= 1.0))
      throw ConfigError(ConfigError::Kind::validation, 0,
                        "beta must lie in [0, 1], got " + std::to_string(b));
  return out;
}

ExperimentConfig parse_config(std::istream& in) {
  const Document doc = read_document(in);
  auto section = [&](const std::string& name) -> std::pair<Section, std::size_t> {
    auto it = doc.sections.find(name);
    if (it == doc.sections.end()) return {Section{}, 0};
    return {it->second, doc.header_line.at(name)};
  };

  ExperimentConfig cfg;
  const auto [net, net_line] = section("network");
  cfg.network = build_network(net, net_line);
  const auto [learn, learn_line] = section("learning");
  cfg.learning = build_learning(learn, learn_line, cfg.explicit_decay,
                                cfg.exploration_fraction);

  const auto [exp, exp_line] = section("experiment");
  if (auto* e = find(exp, "episodes")) {
    const auto v = to_unsigned(*e, "episodes");
    if (v < 1) invalid(e->line, "episodes must be at least 1");
    cfg.episodes = static_cast<std::size_t>(v);
  }
  if (auto* e = find(exp, "seed")) cfg.seed = to_unsigned(*e, "seed");
  if (auto* e = find(exp, "betas")) {
    try {
      cfg.betas = parse_betas(e->value);
    } catch (const ConfigError& err) {
      throw ConfigError(err.kind(), e->line, err.what());
    }
  }
  if (auto* e = find(exp, "elimination")) {
    if (e->value == "fixed-reverse")
      cfg.elimination = EliminationStrategy::fixed_reverse;
    else if (e->value == "min-degree")
      cfg.elimination = EliminationStrategy::min_degree;
    else
      invalid(e->line, "elimination must be fixed-reverse or min-degree");
  }
  if (auto* e = find(exp, "output_dir")) cfg.output_dir = e->value;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(ConfigError::Kind::missing_file, 0,
                      "cannot open config file " + path.string());
  return parse_config(in);
}

std::size_t ExperimentConfig::resolved_episodes() const {
  if (episodes) return *episodes;
  std::size_t largest = 1;
  for (const auto& scope : interference_scopes(network)) {
    std::size_t size = 1;
    for (std::size_t k = 0; k < scope.size(); ++k) size *= network.n_power;
    largest = std::max(largest, size);
  }
  return 50 * largest;
}

LearningParams ExperimentConfig::resolved_learning(std::size_t n_episodes) const {
  LearningParams p = learning;
  if (!explicit_decay)
    p.epsilon_decay_episodes = static_cast<std::size_t>(
        std::llround(exploration_fraction * static_cast<double>(n_episodes)));
  return p;
}

RuntimeOptions ExperimentConfig::runtime_options() const {
  RuntimeOptions o;
  o.elimination = elimination;
  return o;
}

NetworkConfig with_beta(NetworkConfig cfg, double beta) {
  for (auto& links : cfg.interferers)
    for (auto& link : links) link.beta = beta;
  cfg.validate();
  return cfg;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

RunOutcome run_single(const ExperimentConfig& config) {
  const std::size_t episodes = config.resolved_episodes();
  RunOutcome out;
  out.training = train(config.network, config.resolved_learning(episodes), episodes,
                       config.seed, config.runtime_options());
  out.learned = make_allocation(out.training.grid.powers(out.training.greedy.action),
                                config.network, AllocationKind::learned);
  return out;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, int threads) {
  if (config.network.n_agents() != 2)
    throw std::invalid_argument("beta sweep compares against the two-user closed form");
  const std::vector<double> betas = config.betas.empty() ? parse_betas("0:1:0.05") : config.betas;
  std::vector<SweepRow> rows(betas.size());
  std::vector<std::exception_ptr> errors(betas.size());

#pragma omp parallel for schedule(dynamic) num_threads(std::max(threads, 1))
  for (std::size_t k = 0; k < betas.size(); ++k) {
    try {
      ExperimentConfig point = config;
      point.network = with_beta(config.network, betas[k]);
      point.seed = derive_seed(config.seed, k);
      const RunOutcome run = run_single(point);

      SweepRow& row = rows[k];
      row.beta = betas[k];
      row.qcopa_p1_mw = run.learned.powers_mw[0];
      row.qcopa_p2_mw = run.learned.powers_mw[1];
      row.qcopa_throughput = run.learned.sum_throughput;
      row.optimal_throughput = optimal_two_user(point.network).sum_throughput;
      row.greedy_throughput = greedy_allocation(point.network).sum_throughput;
      row.simultaneous_throughput = simultaneous_allocation(point.network).sum_throughput;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& os) {
  const auto old_precision = os.precision(10);
  os << "beta,qcopa_p1_mw,qcopa_p2_mw,qcopa_throughput,optimal_throughput,"
        "greedy_throughput,simultaneous_throughput\n";
  for (const auto& r : rows)
    os << r.beta << ',' << r.qcopa_p1_mw << ',' << r.qcopa_p2_mw << ','
       << r.qcopa_throughput << ',' << r.optimal_throughput << ','
       << r.greedy_throughput << ',' << r.simultaneous_throughput << '\n';
  os.precision(old_precision);
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty sweep file");
  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 7)
      throw std::runtime_error("sweep line " + std::to_string(line_no) +
                               ": expected 7 columns");
    std::vector<double> v;
    for (const auto& c : cells) v.push_back(to_double({c, line_no}, "sweep"));
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  return rows;
}

void export_q_surface(std::span<const Agent> agents, const ActionGrid& grid,
                      std::ostream& os) {
  if (agents.size() != 2 || grid.n_agents() != 2)
    throw std::invalid_argument("the Q surface is defined for two agents");
  const auto old_precision = os.precision(12);
  os << "p1_mw,p2_mw,global_q\n";
  JointAction joint(2);
  for (joint[0] = 0; joint[0] < grid.size(0); ++joint[0]) {
    for (joint[1] = 0; joint[1] < grid.size(1); ++joint[1]) {
      double q = 0.0;
      for (const auto& agent : agents) q += agent.q.table(0).at_joint(joint);
      os << grid.power(0, joint[0]) << ',' << grid.power(1, joint[1]) << ',' << q << '\n';
    }
  }
  os.precision(old_precision);
}

int threads_from_env(int fallback) {
  const char* raw = std::getenv("COOPA_THREADS");
  if (!raw) return fallback;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 1) return fallback;
  return static_cast<int>(v);
}

}  // namespace qcopa
