#include "itrm/engine.hpp"

#include <algorithm>
#include <cassert>
#include <unordered_map>

#include "itrm/detail/stage_hash.hpp"

namespace itrm {

const char* budget_reason_name(BudgetReason r) {
  switch (r) {
    case BudgetReason::Steps:
      return "steps";
    case BudgetReason::LimitEvents:
      return "limit_events";
    case BudgetReason::Nesting:
      return "nesting";
    case BudgetReason::PeriodSearch:
      return "period_search";
  }
  return "?";
}

// --- single step ------------------------------------------------------------

Configuration step(const Configuration& c, const Program& p, const Oracle& x) {
  assert(c.line < p.size());
  const Instruction& ins = p.instructions[c.line];
  assert(ins.op != Opcode::Halt);
  Configuration next = c;
  next.clock = successor(c.clock);
  next.line = c.line + 1;
  switch (ins.op) {
    case Opcode::Zero:
      next.registers[ins.a] = 0;
      break;
    case Opcode::Inc:
      next.registers[ins.a] += 1;
      break;
    case Opcode::Copy:
      next.registers[ins.b] = next.registers[ins.a];
      break;
    case Opcode::Jeq:
      if (c.registers[ins.a] == c.registers[ins.b]) next.line = ins.c;
      break;
    case Opcode::Oracle:
      next.registers[ins.a] = x.require_bit(c.registers[ins.a]);
      break;
    case Opcode::Halt:
      break;
  }
  return next;
}

Configuration apply_limit(const LoopCertificate& cert) {
  Configuration c;
  c.clock = add(cert.start, times_omega(cert.period));
  c.line = cert.min_line;
  c.registers.reserve(cert.delta.size());
  for (std::size_t r = 0; r < cert.delta.size(); ++r)
    c.registers.push_back(sgn(cert.delta[r]) > 0 ? Nat(0) : cert.minimum[r]);
  return c;
}

// --- hashing ----------------------------------------------------------------

namespace {

using detail::certificate_shape_digest;
using detail::kHashMul;
using detail::limit_key;
using detail::step_key;

}  // namespace

// --- trace emission ----------------------------------------------------------

namespace {

std::string regs_json(const std::vector<Nat>& regs) {
  std::string s = "[";
  for (std::size_t i = 0; i < regs.size(); ++i) {
    if (i) s += ',';
    s += regs[i].get_str();
  }
  s += ']';
  return s;
}

}  // namespace

// --- the engine ---------------------------------------------------------------

namespace {

struct Machine {
  const Program p;
  const Oracle x;
  const Budget b;
  TraceFn trace;
  const std::uint64_t R;

  // current configuration
  std::uint64_t line = 0;
  std::vector<Nat> regs;
  std::uint64_t cur_seg = 0;
  std::uint64_t cur_off = 0;
  bool fresh_limit = false;  // stages.back() records the current configuration

  std::uint64_t steps = 0;
  std::uint64_t limits = 0;
  std::optional<Verdict> verdict;

  struct Stage {
    std::uint32_t line;
    TestOutcome outcome;
    std::int16_t level;  // -1 step, >= 0 limit
    std::uint32_t cert;
    std::uint64_t key;
    std::uint32_t seg;
    std::uint32_t seg_off;
  };
  std::vector<Stage> stages;
  std::vector<Nat> regs_arena;  // R entries per stage
  std::vector<Ordinal> seg_bases{Ordinal()};
  std::vector<std::string> seg_base_strs{"0"};
  std::vector<std::uint64_t> prefix_hash{0};
  std::vector<std::uint64_t> hash_pow{1};

  std::vector<LoopCertificate> certs;
  std::vector<std::uint64_t> cert_shapes;

  // level-0 detection state (current successor segment)
  std::uint64_t seg0_start = 0;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> key_positions;
  std::uint64_t suppress_until = 0;  // absolute stage index
  std::unordered_map<std::uint64_t, std::pair<std::uint32_t, std::uint32_t>> fail_probe;
  // throttle for segments that stay periodic without ever certifying: after
  // a long streak of failing deep checks, only the smallest periods are
  // probed each step, with full sweeps at geometrically spaced lengths
  std::uint64_t hot_streak = 0;
  std::uint64_t next_full_scan = 64;

  // event_lists[k] = stage indices of level-(k-1) limit stages, k >= 1
  std::vector<std::vector<std::uint32_t>> event_lists;

  Machine(Program prog, Oracle oracle, Budget budget, TraceFn t)
      : p(std::move(prog)),
        x(std::move(oracle)),
        b(budget),
        trace(std::move(t)),
        R(runtime_register_count(p)) {
    regs.assign(R, Nat(0));
    event_lists.resize(b.max_nesting_level + 2);
  }

  // -- clock helpers --

  Ordinal clock_at(const Stage& s) const {
    return add(seg_bases[s.seg], Ordinal::from_u64(s.seg_off));
  }
  Ordinal current_clock() const {
    return add(seg_bases[cur_seg], Ordinal::from_u64(cur_off));
  }
  std::string clock_str(std::uint64_t seg, std::uint64_t off) const {
    const std::string& base = seg_base_strs[seg];
    if (off == 0) return base;
    if (base == "0") return std::to_string(off);
    return base + "+" + std::to_string(off);
  }

  const Nat& stage_reg(std::uint64_t stage, std::uint64_t r) const {
    return regs_arena[stage * R + r];
  }

  // -- trace records --

  void emit_step_record(std::uint64_t seg, std::uint64_t off) {
    if (!trace) return;
    trace("{\"t\":\"" + clock_str(seg, off) + "\",\"ev\":\"step\",\"line\":" +
          std::to_string(line) + ",\"regs\":" + regs_json(regs) + "}");
  }
  void emit_limit_record(const LoopCertificate& c, const std::string& t_str) {
    if (!trace) return;
    trace("{\"t\":\"" + t_str + "\",\"ev\":\"limit\",\"level\":" +
          std::to_string(c.level) + ",\"sigma\":\"" + print_cnf(c.start) +
          "\",\"period\":\"" + print_cnf(c.period) + "\",\"line\":" +
          std::to_string(line) + ",\"regs\":" + regs_json(regs) + "}");
  }
  void finish_halt() {
    Verdict v;
    v.kind = Verdict::Kind::Halt;
    v.output = regs[0];
    v.time = current_clock();
    if (trace)
      trace("{\"ev\":\"halt\",\"out\":" + v.output.get_str() + ",\"t\":\"" +
            clock_str(cur_seg, cur_off) + "\"}");
    verdict = std::move(v);
  }
  void finish_diverge(const LoopCertificate& c) {
    Verdict v;
    v.kind = Verdict::Kind::Diverge;
    v.certificate = c;
    if (trace) trace("{\"ev\":\"diverge\",\"level\":" + std::to_string(c.level) + "}");
    verdict = std::move(v);
  }
  void finish_budget(BudgetReason r, std::string detail = {}) {
    Verdict v;
    v.kind = Verdict::Kind::BudgetExceeded;
    v.reason = r;
    v.detail = std::move(detail);
    if (trace)
      trace(std::string("{\"ev\":\"budget\",\"reason\":\"") + budget_reason_name(r) +
            "\"}");
    verdict = std::move(v);
  }

  // -- stage bookkeeping --

  void push_stage(Stage s) {
    stages.push_back(s);
    for (std::uint64_t r = 0; r < R; ++r) regs_arena.push_back(regs[r]);
    prefix_hash.push_back(prefix_hash.back() * kHashMul + s.key);
    hash_pow.push_back(hash_pow.back() * kHashMul);
  }

  std::uint64_t window_hash(std::uint64_t from, std::uint64_t to) const {
    return prefix_hash[to] - prefix_hash[from] * hash_pow[to - from];
  }

  // ------------------------------------------------------------------
  // level-0 lasso detection over the current successor segment
  // ------------------------------------------------------------------

  struct Deep {
    bool valid = false;
    bool flip_pending = false;
    std::uint64_t flip_stage = 0;  // absolute stage index of first flip
    LoopCertificate cert;
  };

  // Windows [j0, j0+span) and [j0+span, j0+2*span) of stages, at any level.
  // Checks lines, outcomes, limit markers, constant per-register shift,
  // and that no JEQ outcome can flip and no ORACLE address drifts under the
  // shift. `level` and `period`/`sigma`/children are filled by the caller.
  Deep deep_check(std::uint64_t j0, std::uint64_t span) {
    Deep d;
    std::uint64_t j1 = j0 + span;
    // per-register shift, from the window starts
    std::vector<Nat> delta(R);
    for (std::uint64_t r = 0; r < R; ++r) {
      if (stage_reg(j1, r) < stage_reg(j0, r)) return d;  // negative shift
      delta[r] = stage_reg(j1, r) - stage_reg(j0, r);
    }
    // cached probe: the offset/register that failed last time for this span
    if (auto it = fail_probe.find(span); it != fail_probe.end()) {
      auto [off, r] = it->second;
      if (off < span && r < R &&
          stage_reg(j1 + off, r) - stage_reg(j0 + off, r) != delta[r])
        return d;
    }
    for (std::uint64_t off = 0; off < span; ++off) {
      const Stage& a = stages[j0 + off];
      const Stage& bs = stages[j1 + off];
      if (a.line != bs.line || a.outcome != bs.outcome || a.level != bs.level) return d;
      if (a.level >= 0 && cert_shapes[a.cert] != cert_shapes[bs.cert]) return d;
      for (std::uint64_t r = 0; r < R; ++r) {
        if (stage_reg(j1 + off, r) < stage_reg(j0 + off, r) ||
            stage_reg(j1 + off, r) - stage_reg(j0 + off, r) != delta[r]) {
          fail_probe[span] = {static_cast<std::uint32_t>(off),
                              static_cast<std::uint32_t>(r)};
          return d;
        }
      }
      const Instruction& ins = p.instructions[a.line];
      if (ins.op == Opcode::Jeq) {
        // decided on register values, not recorded outcomes: a limit stage
        // superseded mid-cascade carries no outcome but still compares
        const Nat& va = stage_reg(j0 + off, ins.a);
        const Nat& vb = stage_reg(j0 + off, ins.b);
        if (va == vb) {
          // equality must persist under the drift
          if (delta[ins.a] != delta[ins.b]) return d;
        } else {
          // the smaller side must not catch up exactly
          const Nat& dsm = va < vb ? delta[ins.a] : delta[ins.b];
          const Nat& dlg = va < vb ? delta[ins.b] : delta[ins.a];
          if (dsm > dlg) {
            Nat gap = va < vb ? vb - va : va - vb;
            Nat gain = dsm - dlg;
            if (gap % gain == 0) {
              // outcome flips after gap/gain more windows
              Nat flips = gap / gain;
              d.flip_pending = true;
              std::uint64_t n = fits_u64(flips) ? to_u64(flips) : UINT64_MAX / 2;
              d.flip_stage = j0 + off;
              // saturating: j0 + n*span + off
              if (n < (UINT64_MAX - d.flip_stage) / span)
                d.flip_stage += n * span;
              else
                d.flip_stage = UINT64_MAX;
              return d;
            }
          }
        }
      }
      if (ins.op == Opcode::Oracle && sgn(delta[ins.a]) != 0) return d;
    }
    // valid: fill the level-independent fields
    d.valid = true;
    LoopCertificate& c = d.cert;
    // the digest treats the window start marker-free: its creating
    // certificate is not part of the tree handed to the verifier
    std::uint64_t digest = 0;
    for (std::uint64_t off = 0; off < span; ++off) {
      const Stage& s = stages[j0 + off];
      std::uint64_t key = off == 0 ? step_key(s.line, s.outcome) : s.key;
      digest = digest * kHashMul + key;
    }
    c.line_trace_digest = digest;
    c.delta = std::move(delta);
    c.min_line = stages[j0].line;
    c.minimum.assign(R, Nat(0));
    for (std::uint64_t r = 0; r < R; ++r) c.minimum[r] = stage_reg(j0, r);
    for (std::uint64_t off = 0; off < span; ++off) {
      c.min_line = std::min<std::uint64_t>(c.min_line, stages[j0 + off].line);
      for (std::uint64_t r = 0; r < R; ++r)
        if (stage_reg(j0 + off, r) < c.minimum[r]) c.minimum[r] = stage_reg(j0 + off, r);
    }
    c.start_line = stages[j0].line;
    c.start_registers.assign(R, Nat(0));
    for (std::uint64_t r = 0; r < R; ++r) c.start_registers[r] = stage_reg(j0, r);
    return d;
  }

  // Called after appending a step stage. Returns a certificate on the first
  // completed valid candidate (least sigma).
  std::optional<LoopCertificate> detect_level0() {
    std::uint64_t m_end = stages.size();
    std::uint64_t seg_len = m_end - seg0_start;
    std::optional<LoopCertificate> found;
    if (m_end >= suppress_until && seg_len >= 2) {
      bool full_sweep = seg_len >= next_full_scan;
      if (full_sweep) next_full_scan = seg_len * 2;
      const Stage& last = stages[m_end - 1];
      auto it = key_positions.find(last.key);
      std::uint64_t earliest_flip = UINT64_MAX;
      std::uint64_t deep_failures = 0;
      bool had_candidates = false;
      if (it != key_positions.end()) {
        const auto& positions = it->second;
        // positions ascend; P = (m_end-1) - pos, so only the tail with
        // P <= max_period and 2P <= seg_len is eligible
        std::uint64_t max_span = std::min<std::uint64_t>(b.max_period, seg_len / 2);
        std::uint64_t min_pos =
            max_span >= m_end ? 0 : (m_end - 1) - max_span;
        auto first = std::lower_bound(positions.begin(), positions.end(),
                                      static_cast<std::uint32_t>(min_pos));
        if (hot_streak > 64 && !full_sweep && positions.end() - first > 4)
          first = positions.end() - 4;
        for (auto pit = first; pit != positions.end(); ++pit) {
          std::uint64_t P = (m_end - 1) - *pit;
          if (P == 0) continue;
          std::uint64_t j0 = m_end - 2 * P;
          if (stages[j0].line != stages[j0 + P].line) continue;
          if (window_hash(j0, j0 + P) != window_hash(j0 + P, m_end)) continue;
          had_candidates = true;
          Deep d = deep_check(j0, P);
          if (d.valid) {
            d.cert.level = 0;
            d.cert.period = Ordinal::from_u64(P);
            d.cert.start = add(seg_bases[stages[j0].seg],
                               Ordinal::from_u64(stages[j0].seg_off));
            found = std::move(d.cert);
            break;
          }
          ++deep_failures;
          if (d.flip_pending) earliest_flip = std::min(earliest_flip, d.flip_stage);
        }
      }
      if (!found && earliest_flip != UINT64_MAX)
        suppress_until =
            earliest_flip == UINT64_MAX ? earliest_flip : earliest_flip + 1;
      if (had_candidates) hot_streak = deep_failures > 0 ? hot_streak + 1 : 0;
    }
    if (!found && !stages.empty())
      key_positions[stages[m_end - 1].key].push_back(
          static_cast<std::uint32_t>(m_end - 1));
    return found;
  }

  // ------------------------------------------------------------------
  // level-k detection over limit-event lists
  // ------------------------------------------------------------------

  std::optional<LoopCertificate> detect_level(std::uint32_t level) {
    const auto& ev = event_lists[level];
    std::uint64_t n = ev.size();
    if (n < 3) return std::nullopt;
    // largest Q first: least sigma
    for (std::uint64_t Q = (n - 1) / 2; Q >= 1; --Q) {
      if (Q > b.max_period) continue;
      std::uint64_t i0 = n - 1 - 2 * Q;
      std::uint64_t s0 = ev[i0], s1 = ev[i0 + Q], s2 = ev[i0 + 2 * Q];
      if (s1 - s0 != s2 - s1) continue;
      if (window_hash(s0, s1) != window_hash(s1, s2)) continue;
      Ordinal c0 = clock_at(stages[s0]);
      Ordinal c1 = clock_at(stages[s1]);
      Ordinal c2 = clock_at(stages[s2]);
      Ordinal period1 = subtract_from(c0, c1);
      Ordinal period2 = subtract_from(c1, c2);
      if (!(period1 == period2)) continue;
      Deep d = deep_check(s0, s1 - s0);
      if (!d.valid) continue;
      d.cert.level = level;
      d.cert.period = period1;
      d.cert.start = c0;
      // children: every limit event observed across both periods, in clock
      // order, so the certificate replays without reconstruction
      for (std::uint64_t s = s0 + 1; s <= s2; ++s)
        if (stages[s].level >= 0) d.cert.children.push_back(certs[stages[s].cert]);
      return d.cert;
    }
    return std::nullopt;
  }

  // ------------------------------------------------------------------
  // run loop
  // ------------------------------------------------------------------

  bool halted_configuration() const {
    return line >= p.size() || p.instructions[line].op == Opcode::Halt;
  }

  // Evidence scan at step exhaustion: does the segment tail look periodic
  // with some period within budget?
  bool periodic_tail_evidence() const {
    std::uint64_t m_end = stages.size();
    std::uint64_t seg_len = m_end - seg0_start;
    std::uint64_t cap = std::min<std::uint64_t>({b.max_period, seg_len / 2, 4096});
    for (std::uint64_t P = 1; P <= cap; ++P)
      if (window_hash(m_end - 2 * P, m_end - P) == window_hash(m_end - P, m_end))
        return true;
    return false;
  }

  void apply_limit_cascade(LoopCertificate cert) {
    while (true) {
      if (limits >= b.max_limit_events) {
        finish_budget(BudgetReason::LimitEvents);
        return;
      }
      Ordinal lambda;
      try {
        lambda = add(cert.start, times_omega(cert.period));
      } catch (const OrdinalDepthError& e) {
        finish_budget(BudgetReason::Nesting, e.what());
        return;
      }
      // new configuration per the liminf law
      line = cert.min_line;
      for (std::uint64_t r = 0; r < R; ++r)
        regs[r] = sgn(cert.delta[r]) > 0 ? Nat(0) : cert.minimum[r];
      cur_seg = seg_bases.size();
      cur_off = 0;
      seg_bases.push_back(lambda);
      seg_base_strs.push_back(print_cnf(lambda));

      std::uint32_t cert_idx = static_cast<std::uint32_t>(certs.size());
      certs.push_back(cert);
      cert_shapes.push_back(certificate_shape_digest(cert));

      Stage s;
      s.line = static_cast<std::uint32_t>(line);
      s.outcome = TestOutcome::None;
      s.level = static_cast<std::int16_t>(cert.level);
      s.cert = cert_idx;
      s.key = limit_key(line, cert.level, cert_shapes[cert_idx]);
      s.seg = static_cast<std::uint32_t>(cur_seg);
      s.seg_off = 0;
      push_stage(s);
      emit_limit_record(cert, seg_base_strs.back());
      ++limits;
      fresh_limit = true;

      // successor segment restarts after the limit stage
      seg0_start = stages.size();
      key_positions.clear();
      fail_probe.clear();
      suppress_until = 0;
      hot_streak = 0;
      next_full_scan = 64;

      // strong loop: the limit reproduces its own start configuration
      bool all_zero = true;
      for (const Nat& dl : cert.delta)
        if (sgn(dl) != 0) {
          all_zero = false;
          break;
        }
      if (all_zero && line == cert.start_line && regs == cert.start_registers) {
        finish_diverge(cert);
        return;
      }

      // cascade upward
      std::uint32_t next_level = cert.level + 1;
      for (std::uint32_t k = 1; k <= cert.level && k < event_lists.size(); ++k)
        event_lists[k].clear();
      if (next_level > b.max_nesting_level) return;
      event_lists[next_level].push_back(static_cast<std::uint32_t>(stages.size() - 1));
      std::optional<LoopCertificate> up;
      try {
        up = detect_level(next_level);
      } catch (const OrdinalDepthError& e) {
        finish_budget(BudgetReason::Nesting, e.what());
        return;
      }
      if (!up) return;
      cert = std::move(*up);
    }
  }

  // One stage: a successor step or a limit cascade. Sets verdict when done.
  void advance() {
    if (verdict) return;
    if (halted_configuration()) {
      finish_halt();
      return;
    }
    if (steps >= b.max_successor_steps) {
      if (suppress_until > stages.size()) {
        finish_budget(BudgetReason::Steps);
      } else if (stages.size() - seg0_start >= 2 && periodic_tail_evidence()) {
        finish_budget(BudgetReason::PeriodSearch);
      } else {
        finish_budget(BudgetReason::Steps);
      }
      return;
    }

    const Instruction& ins = p.instructions[line];
    TestOutcome outcome = TestOutcome::None;
    std::uint64_t next_line = line + 1;
    // resolve the oracle before recording the stage so a failed read aborts
    // the step entirely
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
        finish_budget(reason, "oracle bit unresolved: " + r.failure);
        return;
      }
      oracle_bit = r.value;
    }
    if (ins.op == Opcode::Jeq)
      outcome = regs[ins.a] == regs[ins.b] ? TestOutcome::Equal : TestOutcome::NotEqual;

    bool appended_step_stage = false;
    if (fresh_limit) {
      stages.back().outcome = outcome;
      fresh_limit = false;
    } else {
      Stage s;
      s.line = static_cast<std::uint32_t>(line);
      s.outcome = outcome;
      s.level = -1;
      s.cert = 0;
      s.key = step_key(line, outcome);
      s.seg = static_cast<std::uint32_t>(cur_seg);
      s.seg_off = static_cast<std::uint32_t>(cur_off);
      push_stage(s);
      emit_step_record(cur_seg, cur_off);
      appended_step_stage = true;
    }

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
    ++cur_off;
    ++steps;

    if (appended_step_stage) {
      std::optional<LoopCertificate> cert = detect_level0();
      if (cert) apply_limit_cascade(std::move(*cert));
    }
  }

  Verdict run_to_end() {
    while (!verdict) advance();
    return *verdict;
  }
};

}  // namespace

Verdict run(const Program& p, const Oracle& x, const Budget& b, const TraceFn& trace) {
  Machine m(p, x, b, trace);
  return m.run_to_end();
}

std::pair<Verdict, std::string> run_traced(const Program& p, const Oracle& x,
                                           const Budget& b) {
  std::string out;
  Verdict v = run(p, x, b, [&out](const std::string& rec) {
    out += rec;
    out += '\n';
  });
  return {std::move(v), std::move(out)};
}

Verdict run_collect(const Program& p, const Oracle& x, const Budget& b,
                    std::vector<LoopCertificate>& certificates, const TraceFn& trace) {
  Machine m(p, x, b, trace);
  Verdict v = m.run_to_end();
  certificates = std::move(m.certs);
  return v;
}

Verdict run_on_input(const Program& p, const Oracle& x, const Nat& input,
                     const Budget& b, const TraceFn& trace) {
  Machine m(p, x, b, trace);
  m.regs[0] = input;
  return m.run_to_end();
}

RealComputation compute_real(const Program& p, const Oracle& x, std::uint64_t n_bits,
                             const Budget& b) {
  if (n_bits < 1) throw std::invalid_argument("compute_real requires n_bits >= 1");
  RealComputation rc;
  rc.entries.reserve(n_bits);
  for (std::uint64_t i = 0; i < n_bits; ++i) {
    Verdict v = run_on_input(p, x, nat(i), b);
    RealComputation::Entry e;
    e.output = v.output;
    e.time = v.time;
    switch (v.kind) {
      case Verdict::Kind::Halt:
        if (v.output == 0)
          e.status = RealComputation::Status::Bit0;
        else if (v.output == 1)
          e.status = RealComputation::Status::Bit1;
        else
          e.status = RealComputation::Status::NonBoolean;
        break;
      case Verdict::Kind::Diverge:
        e.status = RealComputation::Status::Diverges;
        break;
      case Verdict::Kind::BudgetExceeded:
        e.status = RealComputation::Status::Budget;
        e.reason = v.reason;
        break;
    }
    rc.entries.push_back(std::move(e));
  }
  return rc;
}

Oracle make_program_oracle(Program p, Oracle base, Budget per_bit) {
  std::string spec = "program:[" + std::to_string(p.size()) + " lines]";
  // capture by value; the node owns its inputs
  auto fn = [p = std::move(p), base = std::move(base),
             per_bit](const Nat& n) -> Oracle::BitResult {
    Verdict v = run_on_input(p, base, n, per_bit);
    switch (v.kind) {
      case Verdict::Kind::Halt:
        if (v.output == 0) return Oracle::BitResult::bit(0);
        if (v.output == 1) return Oracle::BitResult::bit(1);
        return Oracle::BitResult::fail("non-boolean");
      case Verdict::Kind::Diverge:
        return Oracle::BitResult::fail("diverges");
      case Verdict::Kind::BudgetExceeded:
        return Oracle::BitResult::fail(std::string("budget:") +
                                       budget_reason_name(v.reason));
    }
    return Oracle::BitResult::fail("internal");
  };
  return Oracle::computed(std::move(fn), std::move(spec));
}

// --- public detect_lasso over a StepTrace -------------------------------------
//
// The contract form of the detector: full scan, least sigma then least
// period. The engine's incremental path above fires at the first completed
// candidate, which coincides with this on traces grown step by step.

std::optional<LoopCertificate> detect_lasso(const Program& p, const StepTrace& trace,
                                            const Budget& budget) {
  const auto& e = trace.entries;
  const std::uint64_t m = e.size();
  if (m < 2) return std::nullopt;
  const std::uint64_t R = e[0].registers.size();

  for (std::uint64_t j0 = 0; j0 + 2 <= m; ++j0) {
    std::uint64_t max_p = std::min(budget.max_period, (m - j0) / 2);
    for (std::uint64_t P = 1; P <= max_p; ++P) {
      bool ok = true;
      for (std::uint64_t off = 0; ok && off < P; ++off) {
        const auto& a = e[j0 + off];
        const auto& bb = e[j0 + P + off];
        if (a.line != bb.line || a.outcome != bb.outcome) ok = false;
      }
      if (!ok) continue;
      std::vector<Nat> delta(R);
      for (std::uint64_t r = 0; ok && r < R; ++r) {
        if (e[j0 + P].registers[r] < e[j0].registers[r]) {
          ok = false;
          break;
        }
        delta[r] = e[j0 + P].registers[r] - e[j0].registers[r];
      }
      for (std::uint64_t off = 0; ok && off < P; ++off)
        for (std::uint64_t r = 0; r < R; ++r) {
          if (e[j0 + P + off].registers[r] < e[j0 + off].registers[r] ||
              e[j0 + P + off].registers[r] - e[j0 + off].registers[r] != delta[r]) {
            ok = false;
            break;
          }
        }
      for (std::uint64_t off = 0; ok && off < P; ++off) {
        const auto& a = e[j0 + off];
        const Instruction& ins = p.instructions[a.line];
        if (ins.op == Opcode::Jeq) {
          const Nat& va = a.registers[ins.a];
          const Nat& vb = a.registers[ins.b];
          if (va == vb) {
            if (delta[ins.a] != delta[ins.b]) ok = false;
          } else {
            const Nat& dsm = va < vb ? delta[ins.a] : delta[ins.b];
            const Nat& dlg = va < vb ? delta[ins.b] : delta[ins.a];
            if (dsm > dlg) {
              Nat gap = va < vb ? vb - va : va - vb;
              if (gap % (dsm - dlg) == 0) ok = false;
            }
          }
        }
        if (ins.op == Opcode::Oracle && sgn(delta[ins.a]) != 0) ok = false;
      }
      if (!ok) continue;

      LoopCertificate c;
      c.level = 0;
      c.start = add(trace.base, Ordinal::from_u64(j0));
      c.period = Ordinal::from_u64(P);
      std::uint64_t h = 0;
      for (std::uint64_t off = 0; off < P; ++off)
        h = h * kHashMul + step_key(e[j0 + off].line, e[j0 + off].outcome);
      c.line_trace_digest = h;
      c.delta = std::move(delta);
      c.min_line = e[j0].line;
      c.minimum = e[j0].registers;
      for (std::uint64_t off = 0; off < P; ++off) {
        c.min_line = std::min(c.min_line, e[j0 + off].line);
        for (std::uint64_t r = 0; r < R; ++r)
          if (e[j0 + off].registers[r] < c.minimum[r])
            c.minimum[r] = e[j0 + off].registers[r];
      }
      c.start_line = e[j0].line;
      c.start_registers = e[j0].registers;
      return c;
    }
  }
  return std::nullopt;
}

// --- Session -------------------------------------------------------------------

struct Session::Impl {
  Machine machine;
  Impl(Program p, Oracle x, Budget b, TraceFn t)
      : machine(std::move(p), std::move(x), b, std::move(t)) {}
};

Session::Session(Program p, Oracle x, Budget b, TraceFn trace)
    : impl_(std::make_unique<Impl>(std::move(p), std::move(x), b, std::move(trace))) {}
Session::~Session() = default;
Session::Session(Session&&) noexcept = default;
Session& Session::operator=(Session&&) noexcept = default;

Session::Event Session::advance() {
  if (impl_->machine.verdict) return Event::Finished;
  std::uint64_t limits_before = impl_->machine.limits;
  impl_->machine.advance();
  if (impl_->machine.verdict) return Event::Finished;
  return impl_->machine.limits > limits_before ? Event::Limit : Event::Stepped;
}

bool Session::finished() const { return impl_->machine.verdict.has_value(); }

const Verdict& Session::verdict() const { return *impl_->machine.verdict; }

Configuration Session::current() const {
  Configuration c;
  c.clock = impl_->machine.current_clock();
  c.line = impl_->machine.line;
  c.registers = impl_->machine.regs;
  return c;
}

std::uint64_t Session::steps_taken() const { return impl_->machine.steps; }
std::uint64_t Session::limit_events() const { return impl_->machine.limits; }

}  // namespace itrm
