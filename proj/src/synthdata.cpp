#include "stratlasso/synthdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "stratlasso/csv.hpp"
#include "stratlasso/errors.hpp"
#include "stratlasso/kernels.hpp"
#include "stratlasso/rng.hpp"

namespace stratlasso::synth {

void SynthConfig::validate() const {
  if (p < 1) throw InvalidConfig("feature count must be >= 1");
  if (groups.empty()) throw InvalidConfig("at least one group required");
  if (!(rho >= 0.0 && rho < 1.0)) throw InvalidConfig("rho must lie in [0, 1)");
  std::set<std::string> labels;
  for (const auto& g : groups) {
    if (g.label.empty()) throw InvalidConfig("empty group label");
    if (!labels.insert(g.label).second)
      throw InvalidConfig("duplicate group label: " + g.label);
    if (g.n < 1) throw InvalidConfig("group " + g.label + " needs n >= 1");
    for (const auto& [idx, coef] : g.effects) {
      (void)coef;
      if (idx < 0 || idx >= p) throw InvalidConfig("effect index out of range");
    }
  }
  for (const auto& [idx, coef] : shared_effects) {
    (void)coef;
    if (idx < 0 || idx >= p) throw InvalidConfig("shared effect index out of range");
  }
  for (const auto& it : interactions)
    if (it.i < 0 || it.i >= p || it.j < 0 || it.j >= p)
      throw InvalidConfig("interaction index out of range");
  for (int c : candidate_indices)
    if (c < 0 || c >= p) throw InvalidConfig("candidate index out of range");
}

SynthResult generate(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);

  Eigen::Index n = 0;
  for (const auto& g : config.groups) n += g.n;

  SynthResult out;
  out.data.X.resize(n, config.p);
  out.data.y.resize(n);
  out.data.group.resize(static_cast<std::size_t>(n));
  out.true_logit.resize(n);

  const std::set<int> candidates(config.candidate_indices.begin(),
                                 config.candidate_indices.end());
  for (int j = 0; j < config.p; ++j) {
    FeatureMeta f;
    f.name = "x" + std::to_string(j);
    f.kind = FeatureKind::Continuous;
    f.interaction_candidate = candidates.count(j) > 0;
    out.data.features.push_back(std::move(f));
  }

  const double carry = config.rho;
  const double fresh = std::sqrt(1.0 - config.rho * config.rho);
  Eigen::Index row = 0;
  for (const auto& g : config.groups) {
    for (int r = 0; r < g.n; ++r, ++row) {
      double prev = 0.0;
      for (int j = 0; j < config.p; ++j) {
        const double z = rng.normal();
        const double x = (j == 0 || carry == 0.0) ? z : carry * prev + fresh * z;
        out.data.X(row, j) = x;
        prev = x;
      }
      double logit = g.intercept;
      for (const auto& [idx, coef] : config.shared_effects)
        logit += coef * out.data.X(row, idx);
      for (const auto& [idx, coef] : g.effects) logit += coef * out.data.X(row, idx);
      for (const auto& it : config.interactions)
        logit += it.coef * out.data.X(row, it.i) * out.data.X(row, it.j);
      out.true_logit(row) = logit;
      out.data.y(row) = rng.bernoulli(kernels::sigmoid(logit)) ? 1.0 : 0.0;
      out.data.group[static_cast<std::size_t>(row)] = g.label;
    }
  }
  return out;
}

SynthConfig cohort_preset(const std::string& name) {
  SynthConfig c;
  if (name == "paperlike_small") {
    // five groups at the cohort's 54:1 majority-to-smallest ratio, rare-ish
    // positives, shared signal plus one private feature per group
    c.groups = {{"WB", 8100, -2.2, {{6, 0.3}}},
                {"NBE", 590, -2.4, {{10, 0.4}}},
                {"AD", 680, -2.3, {{9, 0.4}}},
                {"SA", 190, -1.8, {{7, 0.5}}},
                {"AF", 150, -2.0, {{8, 0.5}}}};
    c.p = 50;
    c.shared_effects = {{0, 0.8}, {1, -0.6}, {2, 0.5}, {3, 0.4}, {4, -0.4}, {5, 0.3}};
    c.candidate_indices = {0, 1, 2, 3};
    c.rho = 0.1;
    c.seed = 1;
    return c;
  }
  if (name == "transfer") {
    // identical signal in both groups; the minority alone is too small to
    // recover it reliably
    c.groups = {{"maj", 2000, 0.0, {}}, {"min", 60, 0.0, {}}};
    c.p = 20;
    c.shared_effects = {{0, 1.0}, {1, -0.8}, {2, 0.6}};
    c.candidate_indices = {0};
    c.rho = 0.0;
    c.seed = 7;
    return c;
  }
  if (name == "interaction") {
    c.groups = {{"g", 2000, 0.0, {}}};
    c.p = 10;
    c.shared_effects = {{0, 1.0}, {1, 1.0}};
    c.interactions = {{0, 1, 2.0}};
    c.candidate_indices = {0};
    c.rho = 0.0;
    c.seed = 11;
    return c;
  }
  if (name == "null") {
    c.groups = {{"a", 250, 0.0, {}}, {"b", 250, 0.0, {}}};
    c.p = 20;
    c.candidate_indices = {0};
    c.rho = 0.0;
    c.seed = 3;
    return c;
  }
  throw UnknownPreset(name);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidConfig("bad number: " + s);
  return v;
}

long long to_int(const std::string& s) {
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidConfig("bad integer: " + s);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<std::pair<int, double>> parse_effects(const std::string& s) {
  std::vector<std::pair<int, double>> out;
  if (trim(s).empty()) return out;
  for (const auto& item : split(s, ',')) {
    const auto parts = split(trim(item), ':');
    if (parts.size() != 2) throw InvalidConfig("effect needs index:coef, got " + item);
    out.emplace_back(static_cast<int>(to_int(trim(parts[0]))),
                     to_double(trim(parts[1])));
  }
  return out;
}

std::string render_effects(const std::vector<std::pair<int, double>>& effects) {
  std::string out;
  for (std::size_t k = 0; k < effects.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(effects[k].first) + ':' + format_double(effects[k].second);
  }
  return out;
}

}  // namespace

SynthConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("line " + std::to_string(lineno) + " is not key = value");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }

  SynthConfig c;
  if (!kv.count("synth.p")) throw InvalidConfig("missing synth.p");
  c.p = static_cast<int>(to_int(kv.at("synth.p")));
  if (kv.count("synth.rho")) c.rho = to_double(kv.at("synth.rho"));
  if (kv.count("synth.seed"))
    c.seed = static_cast<std::uint64_t>(to_int(kv.at("synth.seed")));
  if (kv.count("synth.candidates") && !kv.at("synth.candidates").empty())
    for (const auto& s : split(kv.at("synth.candidates"), ','))
      c.candidate_indices.push_back(static_cast<int>(to_int(trim(s))));
  if (kv.count("shared.effects")) c.shared_effects = parse_effects(kv.at("shared.effects"));

  for (int g = 0;; ++g) {
    const std::string prefix = "group." + std::to_string(g) + ".";
    if (!kv.count(prefix + "label")) break;
    GroupSpec spec;
    spec.label = kv.at(prefix + "label");
    if (!kv.count(prefix + "n")) throw InvalidConfig("missing " + prefix + "n");
    spec.n = static_cast<int>(to_int(kv.at(prefix + "n")));
    if (kv.count(prefix + "intercept"))
      spec.intercept = to_double(kv.at(prefix + "intercept"));
    if (kv.count(prefix + "effects"))
      spec.effects = parse_effects(kv.at(prefix + "effects"));
    c.groups.push_back(std::move(spec));
  }

  for (int t = 0;; ++t) {
    const std::string key = "interaction." + std::to_string(t);
    if (!kv.count(key)) break;
    const auto parts = split(kv.at(key), ':');
    if (parts.size() != 3) throw InvalidConfig(key + " needs i:j:coef");
    c.interactions.push_back(InteractionSpec{
        static_cast<int>(to_int(trim(parts[0]))),
        static_cast<int>(to_int(trim(parts[1]))), to_double(trim(parts[2]))});
  }

  c.validate();
  return c;
}

void write_config(const SynthConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidConfig("cannot open for writing: " + path);
  out << "synth.p = " << config.p << '\n';
  out << "synth.rho = " << format_double(config.rho) << '\n';
  out << "synth.seed = " << config.seed << '\n';
  out << "synth.candidates = ";
  for (std::size_t k = 0; k < config.candidate_indices.size(); ++k) {
    if (k) out << ',';
    out << config.candidate_indices[k];
  }
  out << '\n';
  if (!config.shared_effects.empty())
    out << "shared.effects = " << render_effects(config.shared_effects) << '\n';
  for (std::size_t g = 0; g < config.groups.size(); ++g) {
    const auto& spec = config.groups[g];
    const std::string prefix = "group." + std::to_string(g) + ".";
    out << prefix << "label = " << spec.label << '\n';
    out << prefix << "n = " << spec.n << '\n';
    out << prefix << "intercept = " << format_double(spec.intercept) << '\n';
    if (!spec.effects.empty())
      out << prefix << "effects = " << render_effects(spec.effects) << '\n';
  }
  for (std::size_t t = 0; t < config.interactions.size(); ++t) {
    const auto& it = config.interactions[t];
    out << "interaction." << t << " = " << it.i << ':' << it.j << ':'
        << format_double(it.coef) << '\n';
  }
}

void write_truth_csv(const SynthResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidConfig("cannot open for writing: " + path);
  out << "row,group,outcome,true_logit\n";
  for (Eigen::Index i = 0; i < result.true_logit.size(); ++i) {
    out << i << ',' << result.data.group[static_cast<std::size_t>(i)] << ','
        << static_cast<int>(result.data.y(i)) << ','
        << format_double(result.true_logit(i)) << '\n';
  }
}

}  // namespace stratlasso::synth
