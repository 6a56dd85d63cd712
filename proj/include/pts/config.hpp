#pragma once

// Scenario files: flat `key = value` lines grouped under typed sections.
//
//   [scenario]              answers, truth, agents_per_round, rounds, seed, rho,
//                           histogram_init | (histogram_prior, histogram_mass)
//   [payment]               kind, scale | scale_min_fraction, shift
//   [agent <name>]          count, strategy, update, belief, prior
//
// Unknown sections and keys are rejected.

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pts/agents.hpp"
#include "pts/mechanisms.hpp"
#include "pts/probability.hpp"
#include "pts/simulation.hpp"
#include "pts/text_io.hpp"

namespace pts {

namespace config_detail {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

struct Section {
  std::string kind;  // scenario, payment, agent
  std::string name;  // agent name
  std::size_t line = 0;
  std::map<std::string, Entry> entries;
};

inline std::vector<Section> tokenize(std::string_view text) {
  std::vector<Section> sections;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      auto words = split_ws(line.substr(1, line.size() - 2));
      if (words.empty()) throw ParseError(line_no, "empty section header");
      Section s;
      s.kind = std::string(words[0]);
      s.line = line_no;
      if (s.kind == "agent") {
        if (words.size() != 2) throw ParseError(line_no, "agent section needs exactly one name: [agent <name>]");
        s.name = std::string(words[1]);
      } else if (s.kind == "scenario" || s.kind == "payment") {
        if (words.size() != 1) throw ParseError(line_no, "[" + s.kind + "] takes no name");
      } else {
        throw ParseError(line_no, "unknown section [" + s.kind + "]");
      }
      for (const auto& prev : sections) {
        if (prev.kind == s.kind && prev.name == s.name) throw ParseError(line_no, "duplicate section [" + s.kind + "]");
      }
      sections.push_back(std::move(s));
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    if (sections.empty()) throw ParseError(line_no, "key outside of any section");
    const auto key = std::string(trim(line.substr(0, eq)));
    const auto value = std::string(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(line_no, "missing key");
    auto& entries = sections.back().entries;
    if (entries.count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
    entries[key] = Entry{value, line_no};
  }
  return sections;
}

class Reader {
 public:
  Reader(const Section& s, std::string field_prefix) : s_(s), prefix_(std::move(field_prefix)) {}

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, e] : s_.entries) {
      if (!ok.count(k)) throw ParseError(e.line, "unknown key '" + k + "' in " + prefix_);
    }
  }

  const Entry* find(const std::string& key) const {
    auto it = s_.entries.find(key);
    return it == s_.entries.end() ? nullptr : &it->second;
  }

  std::string field(const std::string& key) const { return prefix_ + "." + key; }

  std::vector<double> reals(const std::string& key) const {
    const auto* e = find(key);
    std::vector<double> out;
    for (auto tok : split_ws(e->value)) {
      auto v = parse_real(tok);
      if (!v) throw ParseError(e->line, field(key) + ": not a number: '" + std::string(tok) + "'");
      out.push_back(*v);
    }
    if (out.empty()) throw ParseError(e->line, field(key) + ": expected at least one number");
    return out;
  }

  double real(const std::string& key) const {
    auto v = reals(key);
    if (v.size() != 1) throw ParseError(find(key)->line, field(key) + ": expected a single number");
    return v[0];
  }

  std::uint64_t integer(const std::string& key) const {
    const auto* e = find(key);
    std::string_view s = e->value;
    if (!s.empty() && s.front() == '-') throw ConfigError(field(key) + ": must be nonnegative");
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ParseError(e->line, field(key) + ": not an integer: '" + e->value + "'");
    }
    return v;
  }

  std::vector<std::string_view> words(const std::string& key) const { return split_ws(find(key)->value); }

 private:
  const Section& s_;
  std::string prefix_;
};

inline Distribution distribution_field(const Reader& rd, const std::string& key, std::size_t n) {
  auto v = rd.reals(key);
  if (v.size() != n) throw ConfigError(rd.field(key) + ": expected " + std::to_string(n) + " entries");
  for (double p : v) {
    if (p < 0.0) throw ConfigError(rd.field(key) + ": probabilities must be nonnegative");
  }
  try {
    return Distribution::from_probabilities(v);
  } catch (const std::domain_error& e) {
    throw ConfigError(rd.field(key) + ": " + e.what());
  }
}

inline std::optional<double> word_real(std::string_view w) { return parse_real(w); }

inline std::vector<double> tail_reals(const std::vector<std::string_view>& words, std::size_t from, const std::string& field) {
  std::vector<double> out;
  for (std::size_t i = from; i < words.size(); ++i) {
    auto v = parse_real(words[i]);
    if (!v) throw ConfigError(field + ": not a number: '" + std::string(words[i]) + "'");
    out.push_back(*v);
  }
  return out;
}

inline AgentProfile parse_agent(const Section& s, const AnswerSpace& answers, double default_rho, std::size_t& count) {
  const std::string prefix = "agent." + s.name;
  Reader rd(s, prefix);
  rd.allow({"count", "strategy", "update", "belief", "prior"});
  const std::size_t n = answers.size();

  AgentProfile p;
  p.name = s.name;
  count = rd.find("count") ? static_cast<std::size_t>(rd.integer("count")) : 1;
  if (count == 0) throw ConfigError(rd.field("count") + ": must be at least 1");

  if (rd.find("strategy")) {
    auto w = rd.words("strategy");
    if (w.empty()) throw ConfigError(rd.field("strategy") + ": missing value");
    if (w[0] == "truthful" && w.size() == 1) {
      p.strategy = Truthful{};
    } else if (w[0] == "singleton" && w.size() == 2) {
      if (!answers.contains(std::string(w[1]))) throw ConfigError(rd.field("strategy") + ": unknown answer '" + std::string(w[1]) + "'");
      p.strategy = Singleton{answers.index_of(std::string(w[1]))};
    } else if (w[0] == "helpful" && w.size() <= 2) {
      double rho = default_rho;
      if (w.size() == 2) {
        auto v = parse_real(w[1]);
        if (!v) throw ConfigError(rd.field("strategy") + ": helpful rho is not a number");
        rho = *v;
      }
      if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError(rd.field("strategy") + ": rho must lie in [0, 1)");
      p.strategy = Helpful{rho};
    } else if (w[0] == "best_response" && w.size() == 1) {
      p.strategy = BestResponder{};
    } else {
      throw ConfigError(rd.field("strategy") + ": expected truthful | singleton <answer> | helpful [rho] | best_response");
    }
  }

  bool has_own_prior = false;
  if (rd.find("update")) {
    auto w = rd.words("update");
    const auto f = rd.field("update");
    if (w.empty()) throw ConfigError(f + ": missing value");
    if (w[0] == "convex_mix") {
      auto v = tail_reals(w, 1, f);
      if (v.size() != 1 || !(v[0] > 0.0 && v[0] < 1.0)) throw ConfigError(f + ": convex_mix needs one weight in (0, 1)");
      p.update = ConvexMixUpdate{v[0]};
    } else if (w[0] == "dirichlet") {
      auto v = tail_reals(w, 1, f);
      if (v.size() != n) throw ConfigError(f + ": dirichlet needs " + std::to_string(n) + " coefficients");
      try {
        p.update = DirichletUpdate{DirichletParams(v)};
      } catch (const std::domain_error& e) {
        throw ConfigError(f + ": " + e.what());
      }
      has_own_prior = true;
    } else if (w[0] == "table" && w.size() == 1) {
      if (!rd.find("belief")) throw ConfigError(rd.field("belief") + ": required by update = table");
      const auto* e = rd.find("belief");
      std::string rows = e->value;
      for (auto& c : rows) {
        if (c == '/') c = '\n';
      }
      try {
        auto b = parse_belief_table(rows);
        if (b.size() != n) throw ConfigError(rd.field("belief") + ": table size differs from the answer space");
        p.update = TableUpdate{std::move(b)};
      } catch (const ParseError& err) {
        throw ParseError(e->line, rd.field("belief") + ": " + err.what());
      } catch (const std::domain_error& err) {
        throw ConfigError(rd.field("belief") + ": " + err.what());
      }
      has_own_prior = true;
    } else {
      throw ConfigError(f + ": expected convex_mix <w> | dirichlet <a1..aN> | table");
    }
  }
  if (rd.find("belief") && !std::holds_alternative<TableUpdate>(p.update)) {
    throw ConfigError(rd.field("belief") + ": only valid with update = table");
  }

  p.prior = has_own_prior ? PriorModel{OwnPrior{}} : PriorModel{TruthPrior{}};
  if (rd.find("prior")) {
    auto w = rd.words("prior");
    const auto f = rd.field("prior");
    if (w.size() == 1 && w[0] == "truth") {
      p.prior = TruthPrior{};
    } else if (w.size() == 1 && w[0] == "public") {
      p.prior = PublicPrior{};
    } else if (w.size() == 1 && w[0] == "own") {
      if (!has_own_prior) throw ConfigError(f + ": 'own' needs a dirichlet or table update");
      p.prior = OwnPrior{};
    } else if (w.size() == 2 && w[0] == "mix") {
      auto v = parse_real(w[1]);
      if (!v || !(*v >= 0.0 && *v <= 1.0)) throw ConfigError(f + ": mix weight must lie in [0, 1]");
      p.prior = InformedMixPrior{*v};
    } else {
      p.prior = FixedPrior{distribution_field(rd, "prior", n)};
    }
    if (has_own_prior && !std::holds_alternative<OwnPrior>(p.prior)) {
      throw ConfigError(f + ": dirichlet and table updates carry their own prior; use 'own'");
    }
  }
  return p;
}

}  // namespace config_detail

/// Parses and validates a scenario document.
inline SimConfig parse_config(std::string_view text) {
  using namespace config_detail;
  const auto sections = tokenize(text);

  const Section* scenario = nullptr;
  const Section* payment = nullptr;
  std::vector<const Section*> agents;
  for (const auto& s : sections) {
    if (s.kind == "scenario") scenario = &s;
    else if (s.kind == "payment") payment = &s;
    else agents.push_back(&s);
  }
  if (!scenario) throw ConfigError("scenario: missing [scenario] section");

  SimConfig c;
  Reader sc(*scenario, "scenario");
  sc.allow({"answers", "truth", "agents_per_round", "rounds", "seed", "rho", "histogram_init", "histogram_prior", "histogram_mass"});
  if (!sc.find("answers")) throw ConfigError("scenario.answers: required");
  {
    std::vector<std::string> labels;
    for (auto w : sc.words("answers")) labels.emplace_back(w);
    try {
      c.answers = AnswerSpace(std::move(labels));
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("scenario.answers: ") + e.what());
    }
  }
  const std::size_t n = c.answers.size();
  if (!sc.find("truth")) throw ConfigError("scenario.truth: required");
  c.truth = distribution_field(sc, "truth", n);

  bool m_given = false;
  if (sc.find("agents_per_round")) {
    c.agents_per_round = static_cast<std::size_t>(sc.integer("agents_per_round"));
    m_given = true;
    if (c.agents_per_round < 2) throw ConfigError("scenario.agents_per_round: M > 1 agents are needed for peer comparison");
  }
  if (sc.find("rounds")) c.rounds = static_cast<std::size_t>(sc.integer("rounds"));
  if (sc.find("seed")) c.seed = sc.integer("seed");
  if (sc.find("rho")) c.rho = sc.real("rho");
  if (!(c.rho >= 0.0 && c.rho < 1.0)) throw ConfigError("scenario.rho: must lie in [0, 1)");

  if (sc.find("histogram_init") && (sc.find("histogram_prior") || sc.find("histogram_mass"))) {
    throw ConfigError("scenario.histogram_init: give either explicit counts or histogram_prior/histogram_mass");
  }
  if (sc.find("histogram_init")) {
    c.histogram_init = sc.reals("histogram_init");
    if (c.histogram_init.size() != n) throw ConfigError("scenario.histogram_init: expected " + std::to_string(n) + " counts");
    for (double v : c.histogram_init) {
      if (!(v > 0.0)) throw ConfigError("scenario.histogram_init: counts must be strictly positive");
    }
  } else if (sc.find("histogram_prior")) {
    const auto prior = distribution_field(sc, "histogram_prior", n);
    const double mass = sc.find("histogram_mass") ? sc.real("histogram_mass") : static_cast<double>(n);
    if (!(mass > 0.0)) throw ConfigError("scenario.histogram_mass: must be positive");
    for (double p : prior) c.histogram_init.push_back(p * mass);
  } else if (sc.find("histogram_mass")) {
    throw ConfigError("scenario.histogram_mass: needs histogram_prior");
  }

  if (payment) {
    Reader pr(*payment, "payment");
    pr.allow({"kind", "scale", "scale_min_fraction", "shift"});
    if (pr.find("kind")) {
      const auto k = pr.find("kind")->value;
      if (k == "pts") c.payment.kind = MechanismKind::pts;
      else if (k == "output_agreement") c.payment.kind = MechanismKind::output_agreement;
      else if (k == "pts_quadratic") c.payment.kind = MechanismKind::pts_quadratic;
      else throw ConfigError("payment.kind: expected pts | output_agreement | pts_quadratic");
    }
    if (pr.find("scale") && pr.find("scale_min_fraction")) throw ConfigError("payment.scale: give either scale or scale_min_fraction");
    if (pr.find("scale")) {
      const double v = pr.real("scale");
      if (!(v > 0.0)) throw ConfigError("payment.scale: C must be positive");
      c.payment.scale = FixedScale{v};
    } else if (pr.find("scale_min_fraction")) {
      const double v = pr.real("scale_min_fraction");
      if (!(v > 0.0)) throw ConfigError("payment.scale_min_fraction: alpha must be positive");
      c.payment.scale = MinProbabilityScale{v};
    }
    if (pr.find("shift")) {
      const auto& v = pr.find("shift")->value;
      if (v == "-C") {
        c.payment.shift = NegatedScaleShift{};
      } else {
        auto vals = pr.reals("shift");
        if (vals.size() == 1) c.payment.shift = ConstantShift{vals[0]};
        else if (vals.size() == n) c.payment.shift = TableShift{vals};
        else throw ConfigError("payment.shift: expected -C, one constant, or one value per answer");
      }
    }
  }

  std::size_t total = 0;
  for (const auto* a : agents) {
    std::size_t count = 1;
    auto profile = parse_agent(*a, c.answers, c.rho, count);
    total += count;
    c.population.push_back({std::move(profile), count});
  }
  if (!agents.empty()) {
    if (m_given && total != c.agents_per_round) {
      throw ConfigError("scenario.agents_per_round: agent counts add up to " + std::to_string(total));
    }
    c.agents_per_round = total;
  }
  c.validate();
  return c;
}

/// Writes a document that parse_config reads back to an equivalent config.
/// Contingent update types have no textual form and are rejected.
inline std::string emit_config(const SimConfig& c) {
  auto vec = [](std::span<const double> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_exact(v[i]);
    return s;
  };
  std::string out = "[scenario]\n";
  out += "answers = ";
  for (std::size_t i = 0; i < c.answers.size(); ++i) out += (i ? " " : "") + c.answers.label(i);
  out += "\ntruth = " + vec(c.truth.values()) + "\n";
  out += "agents_per_round = " + std::to_string(c.agents_per_round) + "\n";
  out += "rounds = " + std::to_string(c.rounds) + "\n";
  out += "seed = " + std::to_string(c.seed) + "\n";
  out += "rho = " + format_exact(c.rho) + "\n";
  out += "histogram_init = " + vec(c.initial_counts()) + "\n";

  out += "\n[payment]\nkind = " + std::string(to_string(c.payment.kind)) + "\n";
  if (const auto* f = std::get_if<FixedScale>(&c.payment.scale)) out += "scale = " + format_exact(f->value) + "\n";
  if (const auto* m = std::get_if<MinProbabilityScale>(&c.payment.scale)) out += "scale_min_fraction = " + format_exact(m->alpha) + "\n";
  if (const auto* s = std::get_if<ConstantShift>(&c.payment.shift)) out += "shift = " + format_exact(s->beta) + "\n";
  if (std::holds_alternative<NegatedScaleShift>(c.payment.shift)) out += "shift = -C\n";
  if (const auto* t = std::get_if<TableShift>(&c.payment.shift)) out += "shift = " + vec(t->values) + "\n";

  for (const auto& e : c.population) {
    const auto& p = e.profile;
    out += "\n[agent " + p.name + "]\ncount = " + std::to_string(e.count) + "\n";
    out += "strategy = ";
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Truthful>) out += "truthful";
          else if constexpr (std::is_same_v<S, Singleton>) out += "singleton " + c.answers.label(s.value);
          else if constexpr (std::is_same_v<S, Helpful>) out += "helpful " + format_exact(s.rho);
          else out += "best_response";
        },
        p.strategy);
    out += "\n";
    std::visit(
        [&](const auto& u) {
          using U = std::decay_t<decltype(u)>;
          if constexpr (std::is_same_v<U, ConvexMixUpdate>) {
            out += "update = convex_mix " + format_exact(u.weight) + "\n";
          } else if constexpr (std::is_same_v<U, DirichletUpdate>) {
            out += "update = dirichlet " + vec(u.params.alpha()) + "\n";
          } else if constexpr (std::is_same_v<U, TableUpdate>) {
            out += "update = table\nbelief = " + vec(u.belief.prior().values());
            for (const auto& row : u.belief.posteriors()) out += " / " + vec(row.values());
            out += "\n";
          } else {
            throw ConfigError("agent." + p.name + ".update: contingent update '" + u.name + "' cannot be written out");
          }
        },
        p.update);
    std::visit(
        [&](const auto& pr) {
          using P = std::decay_t<decltype(pr)>;
          if constexpr (std::is_same_v<P, OwnPrior>) out += "prior = own\n";
          else if constexpr (std::is_same_v<P, TruthPrior>) out += "prior = truth\n";
          else if constexpr (std::is_same_v<P, PublicPrior>) out += "prior = public\n";
          else if constexpr (std::is_same_v<P, InformedMixPrior>) out += "prior = mix " + format_exact(pr.weight) + "\n";
          else out += "prior = " + vec(pr.prior.values()) + "\n";
        },
        p.prior);
  }
  return out;
}

}  // namespace pts
