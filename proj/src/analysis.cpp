#include "itrm/analysis.hpp"

#include <algorithm>

namespace itrm {

const char* auto_outcome_name(AutoOutcome o) {
  switch (o) {
    case AutoOutcome::Match:
      return "match";
    case AutoOutcome::Mismatch:
      return "mismatch";
    case AutoOutcome::NonBoolean:
      return "non-boolean";
    case AutoOutcome::Diverges:
      return "diverges";
    case AutoOutcome::Budget:
      return "budget";
  }
  return "?";
}

const char* probe_outcome_name(ProbeOutcome o) {
  switch (o) {
    case ProbeOutcome::Accepted:
      return "accepted";
    case ProbeOutcome::Rejected:
      return "rejected";
    case ProbeOutcome::NonBoolean:
      return "non-boolean";
    case ProbeOutcome::Diverges:
      return "diverges";
    case ProbeOutcome::Budget:
      return "budget";
  }
  return "?";
}

HaltingReport bounded_halting(std::uint64_t register_bound, const Oracle& x,
                              std::uint64_t max_index, const Budget& b) {
  if (register_bound < 1)
    throw std::invalid_argument("bounded_halting requires register_bound >= 1");
  HaltingReport report;
  report.register_bound = register_bound;
  report.oracle_spec = x.spec();
  report.budget = b;
  std::vector<Program> programs = enumerate_bounded(register_bound, max_index + 1);
  for (std::uint64_t i = 0; i <= max_index; ++i) {
    HaltingReport::Entry e;
    e.index = i;
    e.verdict = run(programs[i], x, b);
    report.entries.push_back(std::move(e));
  }
  return report;
}

JumpReport jump_approx(const Oracle& x, std::uint64_t max_index, const Budget& b) {
  JumpReport report;
  report.oracle_spec = x.spec();
  report.budget = b;
  for (std::uint64_t i = 0; i <= max_index; ++i) {
    JumpReport::Entry e;
    e.index = i;
    e.verdict = run(program_of(nat(i)), x, b);
    report.entries.push_back(std::move(e));
  }
  return report;
}

Oracle jump_oracle(const Oracle& x, const Budget& per_bit) {
  std::string spec = "jump:(" + x.spec() + ")";
  auto fn = [x, per_bit](const Nat& n) -> Oracle::BitResult {
    Verdict v = run(program_of(n), x, per_bit);
    switch (v.kind) {
      case Verdict::Kind::Halt:
        return Oracle::BitResult::bit(1);
      case Verdict::Kind::Diverge:
        return Oracle::BitResult::bit(0);
      case Verdict::Kind::BudgetExceeded:
        return Oracle::BitResult::fail(std::string("budget:") +
                                       budget_reason_name(v.reason));
    }
    return Oracle::BitResult::fail("internal");
  };
  return Oracle::computed(std::move(fn), std::move(spec));
}

namespace {

AutoreductionReport::Entry classify_autored(std::uint64_t n, const Oracle& x,
                                            const Program& p, const Oracle& deleted,
                                            const Budget& b) {
  AutoreductionReport::Entry e;
  e.n = n;
  Oracle::BitResult expected = x.bit(nat(n));
  if (!expected.ok) {
    e.outcome = AutoOutcome::Budget;
    return e;
  }
  e.expected = expected.value;
  e.verdict = run_on_input(p, deleted, nat(n), b);
  switch (e.verdict.kind) {
    case Verdict::Kind::Halt:
      if (e.verdict.output != 0 && e.verdict.output != 1)
        e.outcome = AutoOutcome::NonBoolean;
      else if (e.verdict.output == expected.value)
        e.outcome = AutoOutcome::Match;
      else
        e.outcome = AutoOutcome::Mismatch;
      break;
    case Verdict::Kind::Diverge:
      e.outcome = AutoOutcome::Diverges;
      break;
    case Verdict::Kind::BudgetExceeded:
      e.outcome = AutoOutcome::Budget;
      break;
  }
  return e;
}

}  // namespace

AutoreductionReport autoreduction_check(const Program& p, const Oracle& x,
                                        std::uint64_t n_bits, const Budget& b) {
  if (n_bits < 1) throw std::invalid_argument("autoreduction_check requires N >= 1");
  AutoreductionReport report;
  report.oracle_spec = x.spec();
  for (std::uint64_t n = 0; n < n_bits; ++n)
    report.entries.push_back(
        classify_autored(n, x, p, Oracle::delete_bit(x, nat(n)), b));
  return report;
}

AutoreductionReport strong_autoreduction_check(const Program& p, const Oracle& x,
                                               const std::vector<std::uint64_t>& s_set,
                                               const Budget& b) {
  if (s_set.empty())
    throw std::invalid_argument("strong_autoreduction_check requires a nonempty set");
  std::vector<std::uint64_t> sorted = s_set;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<Nat> positions;
  Nat set_code = 0;
  for (std::uint64_t k : sorted) {
    positions.push_back(nat(k));
    Nat bit;
    mpz_ui_pow_ui(bit.get_mpz_t(), 2, k);
    set_code += bit;
  }
  Oracle deleted = Oracle::delete_bits(x, positions);

  AutoreductionReport report;
  report.oracle_spec = x.spec();
  for (std::uint64_t s : sorted) {
    AutoreductionReport::Entry e;
    e.n = s;
    Oracle::BitResult expected = x.bit(nat(s));
    if (!expected.ok) {
      e.outcome = AutoOutcome::Budget;
      report.entries.push_back(std::move(e));
      continue;
    }
    e.expected = expected.value;
    e.verdict = run_on_input(p, deleted, cantor_pair(nat(s), set_code), b);
    switch (e.verdict.kind) {
      case Verdict::Kind::Halt:
        if (e.verdict.output != 0 && e.verdict.output != 1)
          e.outcome = AutoOutcome::NonBoolean;
        else if (e.verdict.output == expected.value)
          e.outcome = AutoOutcome::Match;
        else
          e.outcome = AutoOutcome::Mismatch;
        break;
      case Verdict::Kind::Diverge:
        e.outcome = AutoOutcome::Diverges;
        break;
      case Verdict::Kind::BudgetExceeded:
        e.outcome = AutoOutcome::Budget;
        break;
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

namespace {

ProbeOutcome classify_probe(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Halt:
      if (v.output == 1) return ProbeOutcome::Accepted;
      if (v.output == 0) return ProbeOutcome::Rejected;
      return ProbeOutcome::NonBoolean;
    case Verdict::Kind::Diverge:
      return ProbeOutcome::Diverges;
    case Verdict::Kind::BudgetExceeded:
      return ProbeOutcome::Budget;
  }
  return ProbeOutcome::Budget;
}

}  // namespace

RecognizabilityReport recognizability_probe(const Program& q,
                                            const std::vector<Oracle>& candidates,
                                            const Budget& b) {
  RecognizabilityReport report;
  for (const Oracle& y : candidates) {
    RecognizabilityReport::Entry e;
    e.oracle_spec = y.spec();
    e.verdict = run(q, y, b);
    e.outcome = classify_probe(e.verdict);
    report.entries.push_back(std::move(e));
  }
  return report;
}

DecidabilityReport decidability_probe(const Program& p,
                                      const std::vector<Oracle>& battery,
                                      const Budget& b) {
  DecidabilityReport report;
  report.deciding_on_sample = !battery.empty();
  for (const Oracle& y : battery) {
    DecidabilityReport::Entry e;
    e.oracle_spec = y.spec();
    Verdict v = run(p, y, b);
    e.outcome = classify_probe(v);
    if (e.outcome == ProbeOutcome::Accepted)
      report.in_set.push_back(e.oracle_spec);
    else if (e.outcome == ProbeOutcome::Rejected)
      report.out_set.push_back(e.oracle_spec);
    else
      report.deciding_on_sample = false;
    report.entries.push_back(std::move(e));
  }
  return report;
}

// --- line-delimited JSON -----------------------------------------------------

namespace {

std::string escape_json(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string report_line(std::uint64_t id, const std::string& verdict,
                        const std::optional<std::string>& time,
                        const std::string& detail) {
  std::string s = "{\"id\":" + std::to_string(id) + ",\"verdict\":\"" + verdict + "\"";
  if (time) s += ",\"time\":\"" + *time + "\"";
  if (!detail.empty()) s += ",\"detail\":\"" + escape_json(detail) + "\"";
  s += "}";
  return s;
}

namespace {

std::string verdict_word(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Halt:
      return "halt";
    case Verdict::Kind::Diverge:
      return "diverge";
    case Verdict::Kind::BudgetExceeded:
      return "budget";
  }
  return "?";
}

std::optional<std::string> verdict_time(const Verdict& v) {
  if (v.kind == Verdict::Kind::Halt) return print_cnf(v.time);
  return std::nullopt;
}

std::string engine_detail(const Verdict& v, const std::string& extra = {}) {
  std::string d;
  switch (v.kind) {
    case Verdict::Kind::Halt:
      d = "out=" + v.output.get_str();
      break;
    case Verdict::Kind::Diverge:
      d = "level=" + std::to_string(v.certificate ? v.certificate->level : 0);
      break;
    case Verdict::Kind::BudgetExceeded:
      d = std::string("reason=") + budget_reason_name(v.reason);
      break;
  }
  if (!extra.empty()) d += " " + extra;
  return d;
}

}  // namespace

std::vector<std::string> to_jsonl(const HaltingReport& r) {
  std::vector<std::string> lines;
  for (const auto& e : r.entries)
    lines.push_back(
        report_line(e.index, verdict_word(e.verdict), verdict_time(e.verdict),
                    engine_detail(e.verdict)));
  return lines;
}

std::vector<std::string> to_jsonl(const JumpReport& r) {
  std::vector<std::string> lines;
  for (const auto& e : r.entries) {
    std::string extra = e.bit() >= 0 ? "bit=" + std::to_string(e.bit()) : "";
    lines.push_back(
        report_line(e.index, verdict_word(e.verdict), verdict_time(e.verdict),
                    engine_detail(e.verdict, extra)));
  }
  return lines;
}

std::vector<std::string> to_jsonl(const AutoreductionReport& r) {
  std::vector<std::string> lines;
  for (const auto& e : r.entries) {
    std::string detail;
    switch (e.outcome) {
      case AutoOutcome::Match:
        detail = "bit=" + std::to_string(e.expected);
        break;
      case AutoOutcome::Mismatch:
        detail = "expected=" + std::to_string(e.expected) +
                 " got=" + e.verdict.output.get_str();
        break;
      case AutoOutcome::NonBoolean:
        detail = "out=" + e.verdict.output.get_str();
        break;
      case AutoOutcome::Diverges:
        detail = "level=" +
                 std::to_string(e.verdict.certificate ? e.verdict.certificate->level : 0);
        break;
      case AutoOutcome::Budget:
        detail = std::string("reason=") + budget_reason_name(e.verdict.reason);
        break;
    }
    std::optional<std::string> time;
    if (e.verdict.kind == Verdict::Kind::Halt) time = print_cnf(e.verdict.time);
    lines.push_back(report_line(e.n, auto_outcome_name(e.outcome), time, detail));
  }
  return lines;
}

std::vector<std::string> to_jsonl(const RecognizabilityReport& r) {
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const auto& e = r.entries[i];
    lines.push_back(report_line(i, probe_outcome_name(e.outcome),
                                verdict_time(e.verdict), "oracle=" + e.oracle_spec));
  }
  return lines;
}

std::vector<std::string> to_jsonl(const DecidabilityReport& r) {
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const auto& e = r.entries[i];
    lines.push_back(report_line(i, probe_outcome_name(e.outcome), std::nullopt,
                                "oracle=" + e.oracle_spec));
  }
  return lines;
}

}  // namespace itrm
