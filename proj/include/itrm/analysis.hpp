#pragma once

#include <optional>
#include <string>
#include <vector>

#include "itrm/engine.hpp"

namespace itrm {

// All analysis outputs are tri-state: halting/diverging entries are engine
// verdicts, budget entries are honest unknowns, never membership claims.

// Bounded halting approximation: runs P_{i,n}^x (the i-th program with at
// most n registers, register 0 starting at 0) for i <= max_index.
struct HaltingReport {
  std::uint64_t register_bound = 1;
  std::string oracle_spec;
  Budget budget;
  struct Entry {
    std::uint64_t index = 0;
    Verdict verdict;
  };
  std::vector<Entry> entries;
};

HaltingReport bounded_halting(std::uint64_t register_bound, const Oracle& x,
                              std::uint64_t max_index, const Budget& b);

// Jump approximation: for i <= max_index runs P_i^x (global numbering,
// input 0): 1 when it halts, 0 on a certified divergence, unknown on budget.
struct JumpReport {
  std::string oracle_spec;
  Budget budget;
  struct Entry {
    std::uint64_t index = 0;
    Verdict verdict;
    // 1 halts, 0 certified diverge, -1 unknown
    int bit() const {
      if (verdict.kind == Verdict::Kind::Halt) return 1;
      if (verdict.kind == Verdict::Kind::Diverge) return 0;
      return -1;
    }
  };
  std::vector<Entry> entries;
};

JumpReport jump_approx(const Oracle& x, std::uint64_t max_index, const Budget& b);

// The jump as an oracle: bit i resolves to whether P_i^x halts; budget
// failures are sticky, so iterates built on approximations never silently
// read unresolved bits as 0.
Oracle jump_oracle(const Oracle& x, const Budget& per_bit);

enum class AutoOutcome : std::uint8_t { Match, Mismatch, NonBoolean, Diverges, Budget };

const char* auto_outcome_name(AutoOutcome o);

// Autoreduction check: for each n < N runs p with oracle delete_bit(x, n)
// and input n; a match means the run halts with output bit(x, n).
struct AutoreductionReport {
  std::string oracle_spec;
  struct Entry {
    std::uint64_t n = 0;
    AutoOutcome outcome = AutoOutcome::Budget;
    int expected = 0;  // bit(x, n), when it resolved
    Verdict verdict;
  };
  std::vector<Entry> entries;

  bool all_match() const {
    for (const auto& e : entries)
      if (e.outcome != AutoOutcome::Match) return false;
    return !entries.empty();
  }
};

AutoreductionReport autoreduction_check(const Program& p, const Oracle& x,
                                        std::uint64_t n_bits, const Budget& b);

// Strong variant: all positions of S are deleted simultaneously and p gets
// input pair(s, code(S)) with code(S) the sum of 2^k over k in S; a match at
// s means output bit(x, s). S must be nonempty.
AutoreductionReport strong_autoreduction_check(const Program& p, const Oracle& x,
                                               const std::vector<std::uint64_t>& s_set,
                                               const Budget& b);

enum class ProbeOutcome : std::uint8_t {
  Accepted,
  Rejected,
  NonBoolean,
  Diverges,
  Budget
};

const char* probe_outcome_name(ProbeOutcome o);

// Runs q^y (input 0) for each candidate y. A program recognizes x within the
// battery iff it accepts x and rejects every other candidate; the report
// never claims more than battery-relative evidence.
struct RecognizabilityReport {
  struct Entry {
    std::string oracle_spec;
    ProbeOutcome outcome = ProbeOutcome::Budget;
    Verdict verdict;
  };
  std::vector<Entry> entries;
};

RecognizabilityReport recognizability_probe(const Program& q,
                                            const std::vector<Oracle>& candidates,
                                            const Budget& b);

// Checks that p halts with a boolean output on every battery oracle and
// classifies the battery into the induced partition.
struct DecidabilityReport {
  struct Entry {
    std::string oracle_spec;
    ProbeOutcome outcome = ProbeOutcome::Budget;
  };
  std::vector<Entry> entries;
  bool deciding_on_sample = false;
  std::vector<std::string> in_set;   // oracles with output 1
  std::vector<std::string> out_set;  // oracles with output 0
};

DecidabilityReport decidability_probe(const Program& p,
                                      const std::vector<Oracle>& battery,
                                      const Budget& b);

// Line-delimited JSON: one entry per index/candidate with fields id,
// verdict, time (CNF, when the run halted) and detail.
std::string report_line(std::uint64_t id, const std::string& verdict,
                        const std::optional<std::string>& time,
                        const std::string& detail);
std::vector<std::string> to_jsonl(const HaltingReport& r);
std::vector<std::string> to_jsonl(const JumpReport& r);
std::vector<std::string> to_jsonl(const AutoreductionReport& r);
std::vector<std::string> to_jsonl(const RecognizabilityReport& r);
std::vector<std::string> to_jsonl(const DecidabilityReport& r);

}  // namespace itrm
