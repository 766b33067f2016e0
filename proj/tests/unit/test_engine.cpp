#include <doctest.h>

#include <random>
#include <thread>

#include "../common/helpers.hpp"
#include "../common/trace_check.hpp"
#include "itrm/engine.hpp"

using namespace itrm;
using testutil::record_steps;
using testutil::same_resolution;

namespace {

const char* kProgramA = "INC r0\nJEQ r0 r2 5\nINC r0\nJEQ r1 r1 1\nHALT\nHALT";
const char* kProgramB =
    "JEQ r2 r2 2\nJEQ r1 r3 8\nINC r1\nINC r0\nJEQ r0 r3 7\nINC r0\nJEQ r2 r2 "
    "4\nJEQ r2 r2 1\nHALT";
const char* kCountdown =
    "INC r1\nINC r1\nINC r1\nINC r0\nJEQ r0 r1 6\nJEQ r2 r2 3\nHALT";

Ordinal o(const char* text) { return parse_cnf(text); }

// A second, deliberately simple lasso scan used as the oracle for
// detect_lasso tests: structural two-window comparison only, no validity
// refinements beyond what soundness demands.
std::optional<std::tuple<std::uint64_t, std::uint64_t>> brute_scan(
    const Program& p, const StepTrace& t, std::uint64_t max_period) {
  const auto& e = t.entries;
  for (std::uint64_t j0 = 0; j0 + 2 <= e.size(); ++j0)
    for (std::uint64_t P = 1; P <= std::min(max_period, (e.size() - j0) / 2); ++P) {
      bool ok = true;
      std::size_t R = e[j0].registers.size();
      for (std::uint64_t off = 0; ok && off < P; ++off) {
        if (e[j0 + off].line != e[j0 + P + off].line ||
            e[j0 + off].outcome != e[j0 + P + off].outcome)
          ok = false;
        for (std::size_t r = 0; ok && r < R; ++r) {
          Nat lhs = e[j0 + P + off].registers[r];
          Nat rhs = e[j0 + off].registers[r];
          if (lhs < rhs) {
            ok = false;
            break;
          }
          if (lhs - rhs != e[j0 + P].registers[r] - e[j0].registers[r]) ok = false;
        }
      }
      for (std::uint64_t off = 0; ok && off < P; ++off) {
        const Instruction& ins = p.instructions[e[j0 + off].line];
        if (ins.op == Opcode::Jeq && e[j0 + off].outcome == TestOutcome::NotEqual) {
          const Nat& va = e[j0 + off].registers[ins.a];
          const Nat& vb = e[j0 + off].registers[ins.b];
          Nat da = e[j0 + P].registers[ins.a] - e[j0].registers[ins.a];
          Nat db = e[j0 + P].registers[ins.b] - e[j0].registers[ins.b];
          Nat dsm = va < vb ? da : db;
          Nat dlg = va < vb ? db : da;
          if (dsm > dlg && (va < vb ? vb - va : va - vb) % (dsm - dlg) == 0) ok = false;
        }
        if (ins.op == Opcode::Oracle &&
            e[j0 + P].registers[ins.a] != e[j0].registers[ins.a])
          ok = false;
      }
      if (ok) return std::make_tuple(j0, P);
    }
  return std::nullopt;
}

}  // namespace

TEST_CASE("single steps follow the successor semantics") {
  Program inc = parse_program("INC r0\nHALT");
  Configuration c{Ordinal(), 0, {Nat(5)}};
  Configuration next = step(c, inc, Oracle::zeros());
  CHECK(next.clock == o("1"));
  CHECK(next.line == 1);
  CHECK(next.registers[0] == 6);

  Program jeq = parse_program("JEQ r0 r1 7\nHALT\nHALT\nHALT\nHALT\nHALT\nHALT\nHALT");
  Configuration eq{Ordinal(), 0, {Nat(3), Nat(3)}};
  CHECK(step(eq, jeq, Oracle::zeros()).line == 7);
  Configuration ne{Ordinal(), 0, {Nat(3), Nat(4)}};
  CHECK(step(ne, jeq, Oracle::zeros()).line == 1);

  Program oracle = parse_program("ORACLE r0\nHALT");
  Configuration oc{Ordinal(), 0, {Nat(4)}};
  Configuration after = step(oc, oracle, Oracle::periodic({1, 0}));
  CHECK(after.registers[0] == 1);  // bit 4 of 10101... is 1
  CHECK(after.line == 1);
}

TEST_CASE("apply_limit evaluates the liminf from the certificate") {
  // drifting register resets, constant register keeps its minimum
  LoopCertificate cert;
  cert.level = 0;
  cert.start = o("3");
  cert.period = o("3");
  cert.min_line = 1;
  cert.delta = {Nat(1), Nat(0)};
  cert.minimum = {Nat(2), Nat(0)};
  Configuration c = apply_limit(cert);
  CHECK(c.clock == o("w*1"));
  CHECK(c.line == 1);
  CHECK(c.registers == std::vector<Nat>{Nat(0), Nat(0)});

  // all-constant single-line period reproduces its start configuration
  LoopCertificate constant;
  constant.start = o("5");
  constant.period = o("1");
  constant.min_line = 9;
  constant.delta = {Nat(0)};
  constant.minimum = {Nat(7)};
  constant.start_line = 9;
  constant.start_registers = {Nat(7)};
  Configuration cc = apply_limit(constant);
  CHECK(cc.clock == o("w*1"));
  CHECK(cc.line == constant.start_line);
  CHECK(cc.registers == constant.start_registers);

  // liminf of alternating 2,5,... is the window minimum 2
  LoopCertificate alt;
  alt.start = Ordinal();
  alt.period = o("2");
  alt.min_line = 4;
  alt.delta = {Nat(0)};
  alt.minimum = {Nat(2)};
  Configuration ca = apply_limit(alt);
  CHECK(ca.line == 4);
  CHECK(ca.registers[0] == 2);
}

TEST_CASE("detect_lasso on the self-loop") {
  Program p = parse_program("JEQ r0 r0 0");
  StepTrace t = record_steps(p, Oracle::zeros(), 8);
  auto cert = detect_lasso(p, t, Budget{});
  REQUIRE(cert.has_value());
  CHECK(cert->start == Ordinal());
  CHECK(cert->period == o("1"));
  CHECK(cert->delta == std::vector<Nat>{Nat(0)});
  CHECK(cert->min_line == 0);
}

TEST_CASE("detect_lasso finds the loop of program A where the brute scan does") {
  Program a = parse_program(kProgramA);
  StepTrace t = record_steps(a, Oracle::zeros(), 12);
  auto cert = detect_lasso(a, t, Budget{});
  REQUIRE(cert.has_value());
  CHECK(cert->start == o("1"));
  CHECK(cert->period == o("3"));
  CHECK(cert->delta[0] == 1);
  CHECK(cert->min_line == 1);
  auto brute = brute_scan(a, t, Budget{}.max_period);
  REQUIRE(brute.has_value());
  CHECK(std::get<0>(*brute) == 1);
  CHECK(std::get<1>(*brute) == 3);
}

TEST_CASE("detect_lasso agrees with the brute scan on random traces") {
  std::mt19937_64 rng(41);
  int found = 0;
  for (int i = 0; i < 400; ++i) {
    Program p = testutil::random_program(rng, 6, 2, false);
    StepTrace t = record_steps(p, Oracle::zeros(), 40);
    if (t.entries.size() < 2) continue;
    auto mine = detect_lasso(p, t, Budget{});
    auto brute = brute_scan(p, t, Budget{}.max_period);
    REQUIRE(mine.has_value() == brute.has_value());
    if (mine) {
      ++found;
      CHECK(mine->start == Ordinal::from_u64(std::get<0>(*brute)));
      CHECK(mine->period == Ordinal::from_u64(std::get<1>(*brute)));
    }
  }
  CHECK(found > 30);  // the generator must actually exercise loops
}

TEST_CASE("detect_lasso returns nothing on straight-line runs") {
  Program p = parse_program("INC r0\nINC r1\nZERO r0\nHALT");
  StepTrace t = record_steps(p, Oracle::zeros(), 10);
  CHECK(!detect_lasso(p, t, Budget{}).has_value());
}

TEST_CASE("run: program A halts at w+1 with output 0") {
  Program a = parse_program(kProgramA);
  Verdict v = run(a, Oracle::zeros(), Budget{});
  REQUIRE(v.kind == Verdict::Kind::Halt);
  CHECK(v.output == 0);
  CHECK(v.time == o("w*1+1"));
}

TEST_CASE("run: the self-loop diverges with the period-1 certificate") {
  Verdict v = run(parse_program("JEQ r0 r0 0"), Oracle::zeros(), Budget{});
  REQUIRE(v.kind == Verdict::Kind::Diverge);
  REQUIRE(v.certificate.has_value());
  CHECK(v.certificate->level == 0);
  CHECK(v.certificate->start == Ordinal());
  CHECK(v.certificate->period == o("1"));
}

TEST_CASE("run: bare HALT halts at time 0") {
  Verdict v = run(parse_program("HALT"), Oracle::zeros(), Budget{});
  REQUIRE(v.kind == Verdict::Kind::Halt);
  CHECK(v.output == 0);
  CHECK(v.time == Ordinal());
}

TEST_CASE("run: tiny step budget reports steps") {
  Budget b;
  b.max_successor_steps = 2;
  Verdict v = run(parse_program(kProgramA), Oracle::zeros(), b);
  REQUIRE(v.kind == Verdict::Kind::BudgetExceeded);
  CHECK(v.reason == BudgetReason::Steps);
}

TEST_CASE("run: program B halts just past w^2") {
  Verdict v = run(parse_program(kProgramB), Oracle::zeros(), Budget{});
  REQUIRE(v.kind == Verdict::Kind::Halt);
  CHECK(v.output == 0);
  CHECK(v.time == o("w^2*1+1"));

  Verdict nv = run_naive(parse_program(kProgramB), Oracle::zeros(), Budget{});
  REQUIRE(nv.kind == Verdict::Kind::Halt);
  CHECK(nv.time == o("w^2*1+1"));
}

TEST_CASE("run: three nested loops halt just past w^3") {
  const char* source =
      "JEQ r4 r4 2\nJEQ r2 r3 11\nINC r2\nJEQ r4 r4 5\nJEQ r1 r3 1\nINC r1\n"
      "INC r0\nJEQ r0 r3 10\nINC r0\nJEQ r4 r4 7\nJEQ r4 r4 4\nHALT";
  Program c = parse_program(source);
  Verdict v = run(c, Oracle::zeros(), Budget{});
  REQUIRE(v.kind == Verdict::Kind::Halt);
  CHECK(v.output == 0);
  CHECK(v.time == o("w^3*1+1"));
  Verdict nv = run_naive(c, Oracle::zeros(), Budget{});
  CHECK(same_resolution(v, nv));

  std::vector<LoopCertificate> certs;
  run_collect(c, Oracle::zeros(), Budget{}, certs);
  bool saw_level2 = false;
  for (const LoopCertificate& cert : certs) {
    CHECK(verify_certificate(c, Oracle::zeros(), cert));
    saw_level2 = saw_level2 || cert.level == 2;
  }
  CHECK(saw_level2);
}

TEST_CASE("run: a repeating w^2 pattern diverges at level 2") {
  Program d = parse_program(
      "INC r1\nINC r0\nJEQ r0 r3 5\nINC r0\nJEQ r2 r2 2\nJEQ r2 r2 0");
  Verdict v = run(d, Oracle::zeros(), Budget{});
  REQUIRE(v.kind == Verdict::Kind::Diverge);
  REQUIRE(v.certificate.has_value());
  CHECK(v.certificate->level == 2);
  CHECK(verify_certificate(d, Oracle::zeros(), *v.certificate));
  Verdict nv = run_naive(d, Oracle::zeros(), Budget{});
  REQUIRE(nv.kind == Verdict::Kind::Diverge);
  CHECK(nv.certificate->level == 2);
}

TEST_CASE("run: the countdown program halts despite its matching periods") {
  // the affine gap between r0 and r1 closes after two more passes; a naive
  // two-period rule would wrongly certify a limit here
  Verdict v = run(parse_program(kCountdown), Oracle::zeros(), Budget{});
  REQUIRE(v.kind == Verdict::Kind::Halt);
  CHECK(v.output == 3);
  CHECK(v.time == o("11"));
  Verdict nv = run_naive(parse_program(kCountdown), Oracle::zeros(), Budget{});
  CHECK(same_resolution(v, nv));
}

TEST_CASE("run_naive: program A resolves identically") {
  Verdict v = run_naive(parse_program(kProgramA), Oracle::zeros(), Budget{});
  REQUIRE(v.kind == Verdict::Kind::Halt);
  CHECK(v.output == 0);
  CHECK(v.time == o("w*1+1"));

  Verdict sl = run_naive(parse_program("JEQ r0 r0 0"), Oracle::zeros(), Budget{});
  CHECK(sl.kind == Verdict::Kind::Diverge);
}

TEST_CASE("engines agree on small random programs") {
  std::mt19937_64 rng(43);
  Budget b;
  b.max_successor_steps = 300;
  b.max_limit_events = 12;
  b.max_nesting_level = 3;
  b.max_period = 64;
  int resolved = 0;
  for (int i = 0; i < 500; ++i) {
    Program p = testutil::random_program(rng, 6, 2, false);
    Verdict fast = run(p, Oracle::zeros(), b);
    Verdict slow = run_naive(p, Oracle::zeros(), b);
    REQUIRE(fast.kind == slow.kind);
    if (fast.kind == Verdict::Kind::Halt) {
      REQUIRE(fast.output == slow.output);
      REQUIRE(fast.time == slow.time);
    }
    if (fast.kind != Verdict::Kind::BudgetExceeded) ++resolved;
  }
  CHECK(resolved > 200);
}

TEST_CASE("verify_certificate accepts emitted certificates and rejects tampering") {
  Program a = parse_program(kProgramA);
  std::vector<LoopCertificate> certs;
  run_collect(a, Oracle::zeros(), Budget{}, certs);
  REQUIRE(certs.size() == 1);
  const LoopCertificate& cert = certs[0];
  CHECK(verify_certificate(a, Oracle::zeros(), cert));

  LoopCertificate bad_delta = cert;
  bad_delta.delta[0] += 1;
  CHECK(!verify_certificate(a, Oracle::zeros(), bad_delta));

  LoopCertificate bad_min = cert;
  bad_min.minimum[0] += 1;
  CHECK(!verify_certificate(a, Oracle::zeros(), bad_min));

  LoopCertificate bad_line = cert;
  bad_line.min_line += 1;
  CHECK(!verify_certificate(a, Oracle::zeros(), bad_line));

  LoopCertificate bad_digest = cert;
  bad_digest.line_trace_digest ^= 1;
  CHECK(!verify_certificate(a, Oracle::zeros(), bad_digest));

  LoopCertificate bad_period = cert;
  bad_period.period = add(cert.period, Ordinal::from_u64(1));
  CHECK(!verify_certificate(a, Oracle::zeros(), bad_period));
}

TEST_CASE("verify_certificate handles nested certificates") {
  Program b = parse_program(kProgramB);
  std::vector<LoopCertificate> certs;
  run_collect(b, Oracle::zeros(), Budget{}, certs);
  bool saw_level1 = false;
  for (const LoopCertificate& c : certs) {
    CHECK(verify_certificate(b, Oracle::zeros(), c));
    if (c.level == 1) {
      saw_level1 = true;
      LoopCertificate bad = c;
      bad.children[0].delta[0] += 1;
      CHECK(!verify_certificate(b, Oracle::zeros(), bad));
    }
  }
  CHECK(saw_level1);
}

TEST_CASE("compute_real statuses follow the I/O convention") {
  RealComputation halt = compute_real(parse_program("HALT"), Oracle::zeros(), 3, Budget{});
  CHECK(halt.entries[0].status == RealComputation::Status::Bit0);
  CHECK(halt.entries[1].status == RealComputation::Status::Bit1);
  CHECK(halt.entries[2].status == RealComputation::Status::NonBoolean);
  CHECK(!halt.computes_real());

  RealComputation zero =
      compute_real(parse_program("ZERO r0\nHALT"), Oracle::zeros(), 8, Budget{});
  CHECK(zero.computes_real());
  for (const auto& e : zero.entries) CHECK(e.status == RealComputation::Status::Bit0);

  Oracle x = Oracle::periodic({1, 1, 0});
  RealComputation id =
      compute_real(parse_program("ORACLE r0\nHALT"), x, 12, Budget{});
  REQUIRE(id.computes_real());
  for (std::uint64_t i = 0; i < 12; ++i) {
    int bit = id.entries[i].status == RealComputation::Status::Bit1 ? 1 : 0;
    CHECK(bit == x.require_bit(nat(i)));
  }
}

TEST_CASE("traces are deterministic and satisfy the liminf law") {
  Program a = parse_program(kProgramA);
  auto [v1, t1] = run_traced(a, Oracle::zeros(), Budget{});
  auto [v2, t2] = run_traced(a, Oracle::zeros(), Budget{});
  CHECK(t1 == t2);
  CHECK(!t1.empty());
  CHECK(testutil::check_liminf_conformance(t1) == "");

  Program b = parse_program(kProgramB);
  auto [vb, tb] = run_traced(b, Oracle::zeros(), Budget{});
  CHECK(testutil::check_liminf_conformance(tb) == "");
}

TEST_CASE("trace format is bit-exact") {
  auto [v, trace] = run_traced(parse_program("INC r0\nHALT"), Oracle::zeros(), Budget{});
  CHECK(trace ==
        "{\"t\":\"0\",\"ev\":\"step\",\"line\":0,\"regs\":[0]}\n"
        "{\"ev\":\"halt\",\"out\":1,\"t\":\"1\"}\n");

  auto [vs, ts] = run_traced(parse_program("JEQ r0 r0 0"), Oracle::zeros(), Budget{});
  CHECK(ts ==
        "{\"t\":\"0\",\"ev\":\"step\",\"line\":0,\"regs\":[0]}\n"
        "{\"t\":\"1\",\"ev\":\"step\",\"line\":0,\"regs\":[0]}\n"
        "{\"t\":\"w*1\",\"ev\":\"limit\",\"level\":0,\"sigma\":\"0\",\"period\":\"1\","
        "\"line\":0,\"regs\":[0]}\n"
        "{\"ev\":\"diverge\",\"level\":0}\n");
}

TEST_CASE("oracle-free programs resolve identically under every oracle") {
  std::vector<Oracle> battery = {Oracle::zeros(), Oracle::ones(),
                                 Oracle::periodic({1, 0}), Oracle::periodic({0, 1, 1})};
  std::vector<const char*> sources = {kProgramA, kProgramB, kCountdown,
                                      "JEQ r0 r0 0", "ZERO r0\nHALT"};
  for (const char* src : sources) {
    Program p = parse_program(src);
    Verdict base = run(p, battery[0], Budget{});
    for (std::size_t i = 1; i < battery.size(); ++i)
      CHECK(same_resolution(base, run(p, battery[i], Budget{})));
  }
}

TEST_CASE("resolved verdicts survive budget doubling") {
  std::mt19937_64 rng(47);
  Budget base;
  base.max_successor_steps = 200;
  base.max_limit_events = 8;
  base.max_nesting_level = 2;
  base.max_period = 32;
  Budget doubled;
  doubled.max_successor_steps = 400;
  doubled.max_limit_events = 16;
  doubled.max_nesting_level = 4;
  doubled.max_period = 64;
  for (int i = 0; i < 200; ++i) {
    Program p = testutil::random_program(rng, 6, 2, false);
    Verdict small = run(p, Oracle::zeros(), base);
    if (small.kind == Verdict::Kind::BudgetExceeded) continue;
    Verdict big = run(p, Oracle::zeros(), doubled);
    REQUIRE(small.kind == big.kind);
    if (small.kind == Verdict::Kind::Halt) {
      REQUIRE(small.output == big.output);
      REQUIRE(small.time == big.time);
    }
  }
}

TEST_CASE("padding preserves behaviour up to a finite clock shift") {
  std::vector<Oracle> battery = {Oracle::zeros(), Oracle::ones(),
                                 Oracle::periodic({1, 0})};
  std::vector<const char*> sources = {kProgramA,
                                      kCountdown,
                                      "JEQ r0 r0 0",
                                      "ZERO r0\nHALT",
                                      kProgramB,
                                      "ORACLE r0\nHALT",
                                      "ORACLE r0\nJEQ r0 r2 4\nJEQ r1 r1 2\nHALT\nHALT"};
  Budget b;
  b.max_successor_steps = 5000;
  for (const char* src : sources) {
    Program p = parse_program(src);
    Program padded = pad_program(p);
    for (const Oracle& x : battery) {
      Verdict vp = run(p, x, b);
      Verdict vq = run(padded, x, b);
      REQUIRE(vp.kind == vq.kind);
      if (vp.kind == Verdict::Kind::Halt) {
        CHECK(vp.output == vq.output);
        CHECK(testutil::limit_part(vp.time) == testutil::limit_part(vq.time));
      }
    }
  }
}

TEST_CASE("a lasso may read the oracle at a fixed address") {
  // the loop re-reads bit 0 every pass through a constant register; the
  // read address never drifts, so the lasso certifies and the run diverges
  Program p = parse_program(
      "COPY r2 r1\nORACLE r1\nJEQ r1 r3 5\nINC r0\nJEQ r2 r2 0\nHALT");
  Verdict v = run(p, Oracle::ones(), Budget{});
  REQUIRE(v.kind == Verdict::Kind::Diverge);
  REQUIRE(v.certificate.has_value());
  CHECK(verify_certificate(p, Oracle::ones(), *v.certificate));
  Verdict nv = run_naive(p, Oracle::ones(), Budget{});
  CHECK(nv.kind == Verdict::Kind::Diverge);

  // with a 0 at address 0 the same scan halts immediately
  Verdict h = run(p, Oracle::zeros(), Budget{});
  REQUIRE(h.kind == Verdict::Kind::Halt);
  CHECK(h.time == o("3"));
}

TEST_CASE("oracle failures surface as budget verdicts, not bits") {
  Program selfloop = parse_program("JEQ r0 r0 0");
  Oracle broken = make_program_oracle(selfloop, Oracle::zeros(), Budget{});
  Program reader = parse_program("ORACLE r0\nHALT");
  Verdict v = run(reader, broken, Budget{});
  REQUIRE(v.kind == Verdict::Kind::BudgetExceeded);
  CHECK(v.detail.find("diverges") != std::string::npos);

  Budget tiny;
  tiny.max_successor_steps = 2;
  Oracle starved = make_program_oracle(parse_program(kProgramA), Oracle::zeros(), tiny);
  Verdict vs = run(reader, starved, Budget{});
  REQUIRE(vs.kind == Verdict::Kind::BudgetExceeded);
  CHECK(vs.reason == BudgetReason::Steps);
}

TEST_CASE("concurrent runs over a shared memoizing oracle are independent") {
  Program backing = parse_program("ORACLE r0\nHALT");  // identity over the base
  Oracle shared = make_program_oracle(backing, Oracle::periodic({1, 0, 1}), Budget{});
  Program scan = parse_program(
      "COPY r0 r1\nORACLE r1\nJEQ r1 r3 5\nINC r0\nJEQ r2 r2 0\nHALT");

  std::vector<std::string> traces(8);
  std::vector<std::thread> workers;
  for (int t = 0; t < 8; ++t)
    workers.emplace_back([&, t]() {
      std::string out;
      Verdict v = run_on_input(scan, shared, nat(t % 3), Budget{},
                               [&out](const std::string& rec) {
                                 out += rec;
                                 out += '\n';
                               });
      REQUIRE(v.kind == Verdict::Kind::Halt);
      traces[t] = std::move(out);
    });
  for (std::thread& w : workers) w.join();

  // same input, same bytes, regardless of interleaving; the memo resolved
  // each of the five distinct backing bits (racing threads may have
  // evaluated one more than once, the first stored result wins)
  for (int t = 3; t < 8; ++t) CHECK(traces[t] == traces[t - 3]);
  CHECK(shared.backing_runs() >= 5);
}

TEST_CASE("session stepping exposes the same run incrementally") {
  Session s(parse_program(kProgramA), Oracle::zeros(), Budget{});
  std::uint64_t steps = 0, limits = 0;
  while (!s.finished()) {
    Session::Event e = s.advance();
    if (e == Session::Event::Stepped) ++steps;
    if (e == Session::Event::Limit) ++limits;
  }
  CHECK(limits == 1);
  CHECK(s.verdict().kind == Verdict::Kind::Halt);
  CHECK(s.verdict().time == o("w*1+1"));
  CHECK(s.limit_events() == 1);
}
