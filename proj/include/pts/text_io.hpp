#pragma once

// Plain-text formats: belief tables, payment tables, simulation traces and
// verification reports. Numbers are parsed and printed with <charconv>, so
// nothing here depends on the global locale.

#include <charconv>
#include <cstddef>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "pts/analysis.hpp"
#include "pts/mechanisms.hpp"
#include "pts/probability.hpp"
#include "pts/simulation.hpp"

namespace pts {

/// Parse failure with the 1-based line it occurred on.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// 12 significant digits, %g style.
inline std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

/// Shortest representation that reads back to the same double.
inline std::string format_exact(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ',') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

/// Whitespace-separated rows of reals; '#' starts a comment, blank lines are skipped.
inline std::vector<std::vector<double>> parse_matrix(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    for (auto tok : split_ws(line)) {
      auto v = parse_real(tok);
      if (!v) throw ParseError(line_no, "not a number: '" + std::string(tok) + "'");
      row.push_back(*v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw ParseError(line_no, "row length differs from the first row");
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Prior row first, then the posterior given each observation in answer order.
inline BeliefState parse_belief_table(std::string_view text) {
  auto rows = parse_matrix(text);
  if (rows.empty()) throw ParseError(1, "empty belief table");
  if (rows.size() != rows.front().size() + 1) {
    throw ParseError(1, "belief table needs a prior row plus one row per answer");
  }
  return BeliefState::from_rows(rows);
}

inline std::string emit_belief_table(const BeliefState& b) {
  std::string out = "# prior, then posterior given each observation\n";
  auto row = [&](const Distribution& d) {
    for (std::size_t i = 0; i < d.size(); ++i) out += (i ? " " : "") + format_exact(d[i]);
    out += "\n";
  };
  row(b.prior());
  for (const auto& p : b.posteriors()) row(p);
  return out;
}

/// Row = own report, column = reference report.
inline PaymentTable parse_payment_table(std::string_view text) {
  auto rows = parse_matrix(text);
  if (rows.empty() || rows.size() != rows.front().size()) throw ParseError(1, "payment table must be square");
  return PaymentTable(rows);
}

inline std::string emit_payment_table(const PaymentTable& t) {
  std::string out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    for (std::size_t c = 0; c < t.size(); ++c) out += (c ? " " : "") + format_exact(t(r, c));
    out += "\n";
  }
  return out;
}

/// t, R^t per answer, l1(R^t, Q), mean reward of the round.
inline void write_trace_csv(std::ostream& os, const SimTrace& trace) {
  os << "t";
  for (const auto& l : trace.answers.labels()) os << ",R_" << l;
  os << ",l1,mean_reward\n";
  for (const auto& rec : trace.rounds) {
    os << rec.t;
    for (double v : rec.public_dist) os << ',' << format_real(v);
    os << ',' << format_real(rec.l1) << ',' << format_real(rec.mean_reward()) << '\n';
  }
}

inline void write_summary(std::ostream& os, const SimTrace& trace) {
  const auto& s = trace.summary;
  os << "seed: " << trace.seed << '\n';
  os << "rounds: " << trace.rounds.size() << '\n';
  os << "reports: " << s.total_reports << '\n';
  for (std::size_t i = 0; i < trace.answers.size(); ++i) {
    os << "frequency." << trace.answers.label(i) << ": " << format_real(s.report_frequencies[i]) << '\n';
  }
  for (std::size_t i = 0; i < trace.answers.size(); ++i) {
    os << "final_R." << trace.answers.label(i) << ": " << format_real(s.final_public_dist[i]) << '\n';
  }
  os << "final_l1: " << format_real(s.final_l1) << '\n';
  for (const auto& [name, total] : s.reward_by_profile) os << "reward." << name << ": " << format_real(total) << '\n';
}

inline void write_report(std::ostream& os, const VerificationReport& r) {
  os << "claim: " << r.claim << '\n';
  os << "verdict: " << to_string(r.verdict) << '\n';
  os << "seed: " << r.seed << '\n';
  os << "samples: " << r.samples << '\n';
  os << "margin: " << format_real(r.margin) << '\n';
  if (!r.witness.empty()) os << "witness: " << r.witness << '\n';
  for (const auto& [k, v] : r.details) os << k << ": " << v << '\n';
  os << '\n';
}

}  // namespace pts
