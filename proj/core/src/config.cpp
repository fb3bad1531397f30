#include "dlsgd/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "dlsgd/error.hpp"
#include "dlsgd/rng.hpp"
#include "dlsgd/schedule.hpp"
#include "dlsgd/topology.hpp"

namespace dlsgd {

namespace {

struct Entry {
  std::string value;
  std::size_t line;
};

using Entries = std::map<std::string, Entry>;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(const std::string& what, std::size_t line = 0) {
  throw ConfigError(line ? "config line " + std::to_string(line) + ": " + what : "config: " + what);
}

// Pulls keys out of the entry map so leftovers can be reported.
class Reader {
 public:
  explicit Reader(Entries entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<Entry> take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    Entry e = it->second;
    entries_.erase(it);
    return e;
  }

  Entry require(const std::string& key) {
    auto e = take(key);
    if (!e) fail("missing required key '" + key + "'");
    return *e;
  }

  void forbid(const std::string& key, const std::string& reason) {
    if (auto it = entries_.find(key); it != entries_.end()) {
      fail("key '" + key + "' " + reason, it->second.line);
    }
  }

  void finish() const {
    if (!entries_.empty()) {
      const auto& [key, e] = *entries_.begin();
      fail("unknown key '" + key + "'", e.line);
    }
  }

 private:
  Entries entries_;
};

template <typename T>
T parse_integer(const Entry& e, const std::string& key) {
  T value{};
  const auto& s = e.value;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    fail("key '" + key + "' expects a non-negative integer, got '" + s + "'", e.line);
  }
  return value;
}

double parse_real(const Entry& e, const std::string& key) {
  // Accept simple fractions such as 1/12.
  const auto slash = e.value.find('/');
  auto parse_part = [&](std::string_view s) {
    const auto first = s.find_first_not_of(' ');
    s = first == std::string_view::npos ? std::string_view() : s.substr(first);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
      fail("key '" + key + "' expects a real number, got '" + e.value + "'", e.line);
    }
    return value;
  };
  if (slash == std::string::npos) return parse_part(e.value);
  const double num = parse_part(std::string_view(e.value).substr(0, slash));
  const double den = parse_part(std::string_view(e.value).substr(slash + 1));
  if (den == 0.0) fail("key '" + key + "' divides by zero", e.line);
  return num / den;
}

Entries read_entries(std::istream& in) {
  Entries entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'", line_no);
    std::string key = trim(std::string_view(content).substr(0, eq));
    std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) fail("empty key", line_no);
    if (value.empty()) fail("key '" + key + "' has no value", line_no);
    if (entries.count(key)) fail("duplicate key '" + key + "'", line_no);
    entries.emplace(std::move(key), Entry{std::move(value), line_no});
  }
  return entries;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

void append(std::ostringstream& out, const char* key, double v) { out << key << '=' << v << ';'; }

}  // namespace

double TopologySpec::probability() const {
  if (p) return *p;
  if (delta) return er_probability_from_delta(n, *delta);
  throw ConfigError("config: Erdos-Renyi topology needs topology.p or topology.delta");
}

void ExperimentConfig::validate() const {
  if (topology.n == 0) fail("topology.n must be at least 1");
  if (horizon == 0) fail("run.T must be at least 1");
  if (repetitions == 0) fail("run.repetitions must be at least 1");
  if (beta && !(*beta > 0.0)) fail("run.beta must be positive");
  if (problem.kind == ProblemKind::kQuadratic) {
    if (problem.d == 0) fail("problem.d must be at least 1");
    if (!(problem.c1 >= 0.0) || !(problem.c2 >= 0.0)) fail("problem.c1 and problem.c2 must be non-negative");
  } else {
    if (!(problem.lambda > 0.0)) fail("problem.lambda must be positive");
    if (problem.batch == 0) fail("problem.batch must be at least 1");
    if (problem.dimension && *problem.dimension == 0) fail("problem.dimension must be positive");
    if (!std::filesystem::exists(problem.dataset)) {
      fail("dataset '" + problem.dataset.string() + "' does not exist");
    }
  }
  if (topology.kind == TopologyKind::kErdosRenyi) {
    if (topology.p.has_value() == topology.delta.has_value()) {
      fail("er topology needs exactly one of topology.p and topology.delta");
    }
    const double prob = topology.probability();
    if (topology.n > 1 && !(prob > 0.0 && prob <= 1.0)) fail("er edge probability must lie in (0, 1]");
  }
  try {
    (void)CommSchedule::parse(strategy, horizon);
  } catch (const InvalidParameter& e) {
    fail(std::string("schedule.strategy: ") + e.what());
  }
}

std::uint64_t ExperimentConfig::hash() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "problem.kind=" << static_cast<int>(problem.kind) << ';';
  if (problem.kind == ProblemKind::kQuadratic) {
    out << "problem.d=" << problem.d << ';';
    append(out, "problem.c1", problem.c1);
    append(out, "problem.c2", problem.c2);
  } else {
    out << "problem.dataset=" << problem.dataset.string() << ';';
    append(out, "problem.lambda", problem.lambda);
    out << "problem.dimension=" << (problem.dimension ? std::to_string(*problem.dimension) : "auto") << ';';
    out << "problem.batch=" << problem.batch << ';';
  }
  out << "topology.kind=" << static_cast<int>(topology.kind) << ";topology.n=" << topology.n << ';';
  if (topology.p) append(out, "topology.p", *topology.p);
  if (topology.delta) append(out, "topology.delta", *topology.delta);
  out << "topology.seed=" << topology.seed << ';';
  if (topology.weights != WeightRule::kMetropolisHastings) out << "topology.weights=max_degree;";
  out << "schedule.strategy=" << strategy << ";run.T=" << horizon << ';';
  if (beta) {
    append(out, "run.beta", *beta);
  } else {
    out << "run.beta=min;";
  }
  out << "run.repetitions=" << repetitions << ";run.seed=" << base_seed << ";run.record_every=" << record_every;
  const std::string text = out.str();
  Fnv1a h;
  h.update(text.data(), text.size());
  return h.digest();
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  Reader r(read_entries(in));
  ExperimentConfig cfg;

  const auto kind = r.require("problem.kind");
  if (kind.value == "quadratic") {
    cfg.problem.kind = ProblemKind::kQuadratic;
    cfg.problem.d = parse_integer<std::size_t>(r.require("problem.d"), "problem.d");
    cfg.problem.c1 = parse_real(r.require("problem.c1"), "problem.c1");
    cfg.problem.c2 = parse_real(r.require("problem.c2"), "problem.c2");
    for (const char* key : {"problem.dataset", "problem.lambda", "problem.dimension", "problem.batch",
                            "problem.reference_cache"}) {
      r.forbid(key, "does not apply to a quadratic problem");
    }
  } else if (kind.value == "logistic") {
    cfg.problem.kind = ProblemKind::kLogistic;
    cfg.problem.dataset = resolve(base_dir, r.require("problem.dataset").value);
    cfg.problem.lambda = parse_real(r.require("problem.lambda"), "problem.lambda");
    if (auto e = r.take("problem.dimension")) cfg.problem.dimension = parse_integer<std::size_t>(*e, "problem.dimension");
    if (auto e = r.take("problem.batch")) cfg.problem.batch = parse_integer<std::size_t>(*e, "problem.batch");
    if (auto e = r.take("problem.reference_cache")) cfg.problem.reference_cache = resolve(base_dir, e->value);
    for (const char* key : {"problem.d", "problem.c1", "problem.c2"}) {
      r.forbid(key, "does not apply to a logistic problem");
    }
  } else {
    fail("problem.kind must be quadratic or logistic, got '" + kind.value + "'", kind.line);
  }

  const auto topo = r.require("topology.kind");
  if (topo.value == "path") {
    cfg.topology.kind = TopologyKind::kPath;
  } else if (topo.value == "er") {
    cfg.topology.kind = TopologyKind::kErdosRenyi;
  } else if (topo.value == "complete") {
    cfg.topology.kind = TopologyKind::kComplete;
  } else {
    fail("topology.kind must be path, er or complete, got '" + topo.value + "'", topo.line);
  }
  cfg.topology.n = parse_integer<std::size_t>(r.require("topology.n"), "topology.n");
  if (cfg.topology.kind == TopologyKind::kErdosRenyi) {
    if (auto e = r.take("topology.p")) cfg.topology.p = parse_real(*e, "topology.p");
    if (auto e = r.take("topology.delta")) cfg.topology.delta = parse_real(*e, "topology.delta");
  } else {
    r.forbid("topology.p", "only applies to er topologies");
    r.forbid("topology.delta", "only applies to er topologies");
  }
  if (auto e = r.take("topology.seed")) cfg.topology.seed = parse_integer<std::uint64_t>(*e, "topology.seed");
  if (auto e = r.take("topology.weights")) {
    if (e->value == "metropolis") {
      cfg.topology.weights = WeightRule::kMetropolisHastings;
    } else if (e->value == "max_degree") {
      cfg.topology.weights = WeightRule::kMaxDegree;
    } else {
      fail("topology.weights must be metropolis or max_degree, got '" + e->value + "'", e->line);
    }
  }

  cfg.strategy = r.require("schedule.strategy").value;
  cfg.horizon = parse_integer<std::size_t>(r.require("run.T"), "run.T");
  const auto beta = r.require("run.beta");
  if (beta.value != "min") cfg.beta = parse_real(beta, "run.beta");
  if (auto e = r.take("run.repetitions")) cfg.repetitions = parse_integer<std::size_t>(*e, "run.repetitions");
  if (auto e = r.take("run.seed")) cfg.base_seed = parse_integer<std::uint64_t>(*e, "run.seed");
  if (auto e = r.take("run.record_every")) cfg.record_every = parse_integer<std::size_t>(*e, "run.record_every");
  if (auto e = r.take("run.output")) cfg.output = e->value;

  r.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

}  // namespace dlsgd
