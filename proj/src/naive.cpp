#include <algorithm>
#include <optional>
#include <vector>

#include "itrm/detail/stage_hash.hpp"
#include "itrm/engine.hpp"

// Reference engine: stores the full configuration history, searches all
// (sigma, period) pairs by direct comparison (no hashing, no incremental
// state) and evaluates every limit by recomputing the liminf from the stored
// history. Written separately from the main engine on purpose; the two are
// differential-tested against each other.

namespace itrm {

namespace {

struct HistStage {
  Ordinal clock;
  std::uint64_t line = 0;
  TestOutcome outcome = TestOutcome::None;
  std::vector<Nat> regs;
  int level = -1;  // -1 step, >= 0 limit stage
  std::uint64_t shape = 0;
  LoopCertificate cert;  // limit stages only
};

struct NaiveMachine {
  const Program& p;
  const Oracle& x;
  const Budget& b;
  const TraceFn& trace;
  std::uint64_t R;

  std::uint64_t line = 0;
  std::vector<Nat> regs;
  Ordinal clock;
  std::uint64_t steps = 0;
  std::uint64_t limits = 0;
  bool fresh_limit = false;

  std::vector<HistStage> hist;
  std::size_t seg_start = 0;                     // current successor segment
  std::vector<std::vector<std::size_t>> events;  // per level, stage indices
  std::size_t suppress_until = 0;
  std::optional<Verdict> verdict;

  NaiveMachine(const Program& prog, const Oracle& oracle, const Budget& budget,
               const TraceFn& t)
      : p(prog), x(oracle), b(budget), trace(t), R(runtime_register_count(prog)) {
    regs.assign(R, Nat(0));
    events.resize(b.max_nesting_level + 2);
  }

  void emit(const std::string& s) {
    if (trace) trace(s);
  }
  std::string regs_json() const {
    std::string s = "[";
    for (std::uint64_t r = 0; r < R; ++r) {
      if (r) s += ',';
      s += regs[r].get_str();
    }
    return s + "]";
  }

  void finish_halt() {
    Verdict v;
    v.kind = Verdict::Kind::Halt;
    v.output = regs[0];
    v.time = clock;
    emit("{\"ev\":\"halt\",\"out\":" + v.output.get_str() + ",\"t\":\"" +
         print_cnf(clock) + "\"}");
    verdict = std::move(v);
  }
  void finish_diverge(const LoopCertificate& c) {
    Verdict v;
    v.kind = Verdict::Kind::Diverge;
    v.certificate = c;
    emit("{\"ev\":\"diverge\",\"level\":" + std::to_string(c.level) + "}");
    verdict = std::move(v);
  }
  void finish_budget(BudgetReason r) {
    Verdict v;
    v.kind = Verdict::Kind::BudgetExceeded;
    v.reason = r;
    emit(std::string("{\"ev\":\"budget\",\"reason\":\"") + budget_reason_name(r) +
         "\"}");
    verdict = std::move(v);
  }

  bool halted_configuration() const {
    return line >= p.size() || p.instructions[line].op == Opcode::Halt;
  }

  // Direct window comparison: stages [a, a+span) vs [a+span, a+2span) must
  // agree in line/outcome/marker with a constant register shift, and the
  // shift must not be able to change any future JEQ outcome or ORACLE read.
  // On a pending outcome flip, *flip_at is set to the absolute index of the
  // first deviating stage.
  bool windows_match(std::size_t a, std::size_t span, std::size_t* flip_at) {
    std::size_t mid = a + span;
    for (std::size_t off = 0; off < span; ++off) {
      const HistStage& u = hist[a + off];
      const HistStage& v = hist[mid + off];
      if (u.line != v.line || u.outcome != v.outcome || u.level != v.level)
        return false;
      if (u.level >= 0 && u.shape != v.shape) return false;
      for (std::uint64_t r = 0; r < R; ++r) {
        if (v.regs[r] < u.regs[r]) return false;
        // the shift must match the one at the window start
        if (v.regs[r] - u.regs[r] != hist[mid].regs[r] - hist[a].regs[r])
          return false;
      }
    }
    for (std::size_t off = 0; off < span; ++off) {
      const HistStage& u = hist[a + off];
      const Instruction& ins = p.instructions[u.line];
      if (ins.op == Opcode::Jeq) {
        // value-driven: stages without a recorded outcome compare too
        const Nat& va = u.regs[ins.a];
        const Nat& vb = u.regs[ins.b];
        Nat da = hist[mid].regs[ins.a] - hist[a].regs[ins.a];
        Nat db = hist[mid].regs[ins.b] - hist[a].regs[ins.b];
        if (va == vb) {
          if (da != db) return false;
        } else {
          const Nat& dsm = va < vb ? da : db;
          const Nat& dlg = va < vb ? db : da;
          if (dsm > dlg) {
            Nat gap = va < vb ? vb - va : va - vb;
            Nat gain = dsm - dlg;
            if (gap % gain == 0) {
              if (flip_at) {
                Nat windows = gap / gain;
                std::size_t n = fits_u64(windows)
                                    ? static_cast<std::size_t>(to_u64(windows))
                                    : SIZE_MAX / 2;
                std::size_t target = a + off;
                if (n < (SIZE_MAX - target) / span)
                  target += n * span;
                else
                  target = SIZE_MAX;
                *flip_at = std::min(*flip_at, target);
              }
              return false;
            }
          }
        }
      }
      if (ins.op == Opcode::Oracle &&
          hist[mid].regs[ins.a] != hist[a].regs[ins.a])
        return false;
    }
    return true;
  }

  LoopCertificate build_certificate(std::size_t a, std::size_t span,
                                    std::uint32_t level, const Ordinal& period) {
    LoopCertificate c;
    c.level = level;
    c.start = hist[a].clock;
    c.period = period;
    c.min_line = hist[a].line;
    c.minimum = hist[a].regs;
    c.delta.assign(R, Nat(0));
    for (std::uint64_t r = 0; r < R; ++r)
      c.delta[r] = hist[a + span].regs[r] - hist[a].regs[r];
    std::uint64_t digest = 0;
    for (std::size_t off = 0; off < span; ++off) {
      const HistStage& s = hist[a + off];
      c.min_line = std::min(c.min_line, s.line);
      for (std::uint64_t r = 0; r < R; ++r)
        if (s.regs[r] < c.minimum[r]) c.minimum[r] = s.regs[r];
      std::uint64_t key = (off == 0 || s.level < 0)
                              ? detail::step_key(s.line, s.outcome)
                              : detail::limit_key(s.line, s.level, s.shape);
      digest = digest * detail::kHashMul + key;
    }
    c.line_trace_digest = digest;
    c.start_line = hist[a].line;
    c.start_registers = hist[a].regs;
    if (level >= 1) {
      // every limit event across both observed periods, in clock order
      for (std::size_t s = a + 1; s <= a + 2 * span && s < hist.size(); ++s)
        if (hist[s].level >= 0) c.children.push_back(hist[s].cert);
    }
    return c;
  }

  // Exhaustive level-0 search over the current segment: least sigma, then
  // least period.
  std::optional<LoopCertificate> search_level0() {
    if (hist.size() < suppress_until) return std::nullopt;
    std::size_t m = hist.size();
    std::size_t flip_at = SIZE_MAX;
    for (std::size_t j0 = seg_start; j0 + 2 <= m; ++j0) {
      std::size_t max_p = std::min<std::size_t>(b.max_period, (m - j0) / 2);
      for (std::size_t P = 1; P <= max_p; ++P) {
        if (windows_match(j0, P, &flip_at)) {
          return build_certificate(j0, P, 0, Ordinal::from_u64(P));
        }
      }
    }
    if (flip_at != SIZE_MAX)
      suppress_until = flip_at == SIZE_MAX ? flip_at : flip_at + 1;
    return std::nullopt;
  }

  std::optional<LoopCertificate> search_level(std::uint32_t level) {
    const auto& ev = events[level];
    std::size_t n = ev.size();
    for (std::size_t i0 = 0; i0 + 2 < n; ++i0) {
      for (std::size_t Q = 1; i0 + 2 * Q < n; ++Q) {
        if (Q > b.max_period) break;
        std::size_t s0 = ev[i0], s1 = ev[i0 + Q], s2 = ev[i0 + 2 * Q];
        if (s1 - s0 != s2 - s1) continue;
        Ordinal per1 = subtract_from(hist[s0].clock, hist[s1].clock);
        Ordinal per2 = subtract_from(hist[s1].clock, hist[s2].clock);
        if (!(per1 == per2)) continue;
        if (!windows_match(s0, s1 - s0, nullptr)) continue;
        return build_certificate(s0, s1 - s0, level, per1);
      }
    }
    return std::nullopt;
  }

  bool periodic_tail_evidence() {
    std::size_t m = hist.size();
    std::size_t seg_len = m - seg_start;
    std::size_t cap = std::min<std::size_t>(
        {static_cast<std::size_t>(b.max_period), seg_len / 2, 1024});
    for (std::size_t P = 1; P <= cap; ++P) {
      bool same = true;
      for (std::size_t off = 0; same && off < P; ++off) {
        const HistStage& u = hist[m - 2 * P + off];
        const HistStage& v = hist[m - P + off];
        if (u.line != v.line || u.outcome != v.outcome || u.level != v.level)
          same = false;
      }
      if (same) return true;
    }
    return false;
  }

  void apply_cascade(LoopCertificate cert) {
    while (true) {
      if (limits >= b.max_limit_events) {
        finish_budget(BudgetReason::LimitEvents);
        return;
      }
      Ordinal lambda;
      try {
        lambda = add(cert.start, times_omega(cert.period));
      } catch (const OrdinalDepthError&) {
        finish_budget(BudgetReason::Nesting);
        return;
      }
      // liminf over the stored window, recomputed directly
      clock = lambda;
      line = cert.min_line;
      for (std::uint64_t r = 0; r < R; ++r)
        regs[r] = sgn(cert.delta[r]) > 0 ? Nat(0) : cert.minimum[r];

      HistStage s;
      s.clock = clock;
      s.line = line;
      s.regs = regs;
      s.level = static_cast<int>(cert.level);
      s.cert = cert;
      s.shape = detail::certificate_shape_digest(cert);
      hist.push_back(std::move(s));
      emit("{\"t\":\"" + print_cnf(clock) + "\",\"ev\":\"limit\",\"level\":" +
           std::to_string(cert.level) + ",\"sigma\":\"" + print_cnf(cert.start) +
           "\",\"period\":\"" + print_cnf(cert.period) + "\",\"line\":" +
           std::to_string(line) + ",\"regs\":" + regs_json() + "}");
      ++limits;
      fresh_limit = true;
      seg_start = hist.size();
      suppress_until = 0;

      bool all_zero = true;
      for (const Nat& d : cert.delta)
        if (sgn(d) != 0) {
          all_zero = false;
          break;
        }
      if (all_zero && line == cert.start_line && regs == cert.start_registers) {
        finish_diverge(cert);
        return;
      }

      std::uint32_t next = cert.level + 1;
      for (std::uint32_t k = 1; k <= cert.level && k < events.size(); ++k)
        events[k].clear();
      if (next > b.max_nesting_level) return;
      events[next].push_back(hist.size() - 1);
      std::optional<LoopCertificate> up;
      try {
        up = search_level(next);
      } catch (const OrdinalDepthError&) {
        finish_budget(BudgetReason::Nesting);
        return;
      }
      if (!up) return;
      cert = std::move(*up);
    }
  }

  void advance() {
    if (halted_configuration()) {
      finish_halt();
      return;
    }
    if (steps >= b.max_successor_steps) {
      if (hist.size() < suppress_until)
        finish_budget(BudgetReason::Steps);
      else if (hist.size() - seg_start >= 2 && periodic_tail_evidence())
        finish_budget(BudgetReason::PeriodSearch);
      else
        finish_budget(BudgetReason::Steps);
      return;
    }

    const Instruction& ins = p.instructions[line];
    TestOutcome outcome = TestOutcome::None;
    int oracle_bit = 0;
    if (ins.op == Opcode::Oracle) {
      Oracle::BitResult r = x.bit(regs[ins.a]);
      if (!r.ok) {
        BudgetReason reason = BudgetReason::Steps;
        if (r.failure.rfind("budget:", 0) == 0) {
          std::string name = r.failure.substr(7);
          if (name == "limit_events") reason = BudgetReason::LimitEvents;
          else if (name == "nesting") reason = BudgetReason::Nesting;
          else if (name == "period_search") reason = BudgetReason::PeriodSearch;
        }
        finish_budget(reason);
        return;
      }
      oracle_bit = r.value;
    }
    if (ins.op == Opcode::Jeq)
      outcome = regs[ins.a] == regs[ins.b] ? TestOutcome::Equal : TestOutcome::NotEqual;

    bool appended = false;
    if (fresh_limit) {
      hist.back().outcome = outcome;
      fresh_limit = false;
    } else {
      HistStage s;
      s.clock = clock;
      s.line = line;
      s.outcome = outcome;
      s.regs = regs;
      hist.push_back(std::move(s));
      emit("{\"t\":\"" + print_cnf(clock) + "\",\"ev\":\"step\",\"line\":" +
           std::to_string(line) + ",\"regs\":" + regs_json() + "}");
      appended = true;
    }

    std::uint64_t next_line = line + 1;
    switch (ins.op) {
      case Opcode::Zero:
        regs[ins.a] = 0;
        break;
      case Opcode::Inc:
        regs[ins.a] += 1;
        break;
      case Opcode::Copy:
        regs[ins.b] = regs[ins.a];
        break;
      case Opcode::Jeq:
        if (outcome == TestOutcome::Equal) next_line = ins.c;
        break;
      case Opcode::Oracle:
        regs[ins.a] = oracle_bit;
        break;
      case Opcode::Halt:
        break;
    }
    line = next_line;
    clock = successor(clock);
    ++steps;

    if (appended) {
      std::optional<LoopCertificate> cert = search_level0();
      if (cert) apply_cascade(std::move(*cert));
    }
  }

  Verdict run() {
    while (!verdict) advance();
    return *verdict;
  }
};

}  // namespace

Verdict run_naive(const Program& p, const Oracle& x, const Budget& b,
                  const TraceFn& trace) {
  NaiveMachine m(p, x, b, trace);
  return m.run();
}

}  // namespace itrm
