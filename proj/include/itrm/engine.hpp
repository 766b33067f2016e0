#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "itrm/isa.hpp"
#include "itrm/nat.hpp"
#include "itrm/oracle.hpp"
#include "itrm/ordinal.hpp"

namespace itrm {

// Resource bounds standing in for transfinite running time. All >= 1.
struct Budget {
  std::uint64_t max_successor_steps = 1'000'000;
  std::uint64_t max_limit_events = 10'000;
  std::uint64_t max_nesting_level = 4;
  std::uint64_t max_period = 100'000;
};

struct Configuration {
  Ordinal clock;
  std::uint64_t line = 0;
  std::vector<Nat> registers;
};

enum class TestOutcome : std::int8_t { None = -1, NotEqual = 0, Equal = 1 };

// Finite witness that a run segment repeats forever with affine register
// growth. Level 0 certifies a lasso over successor steps; level k >= 1 a
// lasso over level-(k-1) limit events. start_line/start_registers anchor the
// configuration at `start` so the certificate can be re-verified by replay.
struct LoopCertificate {
  std::uint32_t level = 0;
  Ordinal start;
  Ordinal period;  // finite and positive at level 0
  std::uint64_t line_trace_digest = 0;
  std::vector<Nat> delta;
  std::vector<Nat> minimum;
  std::uint64_t min_line = 0;
  std::vector<LoopCertificate> children;  // level >= 1 only
  std::uint64_t start_line = 0;
  std::vector<Nat> start_registers;
};

enum class BudgetReason : std::uint8_t { Steps, LimitEvents, Nesting, PeriodSearch };

const char* budget_reason_name(BudgetReason r);

struct Verdict {
  enum class Kind : std::uint8_t { Halt, Diverge, BudgetExceeded };

  Kind kind = Kind::BudgetExceeded;
  // Halt
  Nat output;
  Ordinal time;
  // Diverge
  std::optional<LoopCertificate> certificate;
  // BudgetExceeded
  BudgetReason reason = BudgetReason::Steps;
  std::string detail;

  bool halted() const { return kind == Kind::Halt; }
  bool diverged() const { return kind == Kind::Diverge; }
};

// Called once per trace record with a complete JSON line (no newline).
using TraceFn = std::function<void(const std::string&)>;

// How many registers a run of p manipulates: register 0 always exists (it
// carries input and output).
inline std::uint64_t runtime_register_count(const Program& p) {
  return p.register_count > 0 ? p.register_count : 1;
}

// One successor step. Requires c.line < p.size() and a non-HALT instruction
// there. Throws OracleBitError when an ORACLE read does not resolve.
Configuration step(const Configuration& c, const Program& p, const Oracle& x);

// Configuration at the limit stage certified by cert: clock
// add(start, times_omega(period)), line = min_line, register r = 0 where
// delta[r] > 0 (the liminf is infinite) and minimum[r] otherwise.
Configuration apply_limit(const LoopCertificate& cert);

// Recent successor-step history for lasso detection: entries since the last
// limit event, starting at clock `base`.
struct StepTrace {
  struct Entry {
    std::uint64_t line = 0;
    TestOutcome outcome = TestOutcome::None;
    std::vector<Nat> registers;  // configuration at this stage
  };
  Ordinal base;
  std::vector<Entry> entries;
};

// Least start, then least period, among candidates with period <= max_period
// whose two consecutive periods match exactly in line/test-outcome sequence
// with a constant per-register shift, and whose future behaviour is forced
// (no JEQ outcome can flip under the affine drift, no ORACLE read address
// drifts). Nothing if no candidate qualifies.
std::optional<LoopCertificate> detect_lasso(const Program& p, const StepTrace& trace,
                                            const Budget& budget);

// Independent soundness checker: re-simulates two periods from cert.start
// using only step/apply_limit and confirms the recorded sequences, deltas,
// minima and min_line. Implemented separately from detect_lasso.
bool verify_certificate(const Program& p, const Oracle& x, const LoopCertificate& cert);

// Transfinite run: successor steps with certified limit jumps at every
// nesting level, Diverge on strong loops, BudgetExceeded otherwise. The
// trace, when requested, records every step and limit event.
Verdict run(const Program& p, const Oracle& x, const Budget& b, const TraceFn& trace = {});

// run with the trace collected into a string of JSONL lines.
std::pair<Verdict, std::string> run_traced(const Program& p, const Oracle& x,
                                           const Budget& b);

// run collecting every certificate a limit event was justified by, in the
// order the limits fired.
Verdict run_collect(const Program& p, const Oracle& x, const Budget& b,
                    std::vector<LoopCertificate>& certificates,
                    const TraceFn& trace = {});

// Independent reference engine: full configuration history, exhaustive
// (sigma, period) search without hashing, limits evaluated by direct liminf
// over the stored history. Intended for small budgets.
Verdict run_naive(const Program& p, const Oracle& x, const Budget& b,
                  const TraceFn& trace = {});

// Per-bit result of running P^x(i) for i < n_bits.
struct RealComputation {
  enum class Status : std::uint8_t { Bit0, Bit1, NonBoolean, Diverges, Budget };
  struct Entry {
    Status status;
    Nat output;          // for Bit0/Bit1/NonBoolean
    Ordinal time;        // halting ordinal when halted
    BudgetReason reason = BudgetReason::Steps;
  };
  std::vector<Entry> entries;

  // True when every queried position resolved to a bit.
  bool computes_real() const {
    for (const auto& e : entries)
      if (e.status != Status::Bit0 && e.status != Status::Bit1) return false;
    return true;
  }
};

RealComputation compute_real(const Program& p, const Oracle& x, std::uint64_t n_bits,
                             const Budget& b);

// Runs P^x(input): input preloaded into register 0, other registers 0.
Verdict run_on_input(const Program& p, const Oracle& x, const Nat& input,
                     const Budget& b, const TraceFn& trace = {});

// Oracle whose bit n is the output of P^base(n), memoized, with failures
// (divergence, non-boolean output, budget) sticky.
Oracle make_program_oracle(Program p, Oracle base, Budget per_bit);

// Incremental driver over the same engine; used by the debug REPL.
class Session {
 public:
  Session(Program p, Oracle x, Budget b, TraceFn trace = {});
  ~Session();
  Session(Session&&) noexcept;
  Session& operator=(Session&&) noexcept;

  enum class Event : std::uint8_t { Stepped, Limit, Finished };

  // Advances by one stage (one successor step, or one limit event when a
  // lasso completes). Returns Finished once a verdict exists.
  Event advance();
  bool finished() const;
  const Verdict& verdict() const;  // valid once finished
  Configuration current() const;
  std::uint64_t steps_taken() const;
  std::uint64_t limit_events() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace itrm
