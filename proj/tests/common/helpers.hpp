#pragma once

#include <random>
#include <vector>

#include "itrm/engine.hpp"

namespace itrm::testutil {

// Deterministic random program generator for differential and property
// suites. Jump targets may equal the program length (explicit fall-off).
inline Program random_program(std::mt19937_64& rng, std::uint64_t max_lines,
                              std::uint64_t max_registers, bool allow_oracle) {
  std::uniform_int_distribution<std::uint64_t> len_dist(1, max_lines);
  std::uint64_t length = len_dist(rng);
  std::uniform_int_distribution<std::uint64_t> reg(0, max_registers - 1);
  std::uniform_int_distribution<std::uint64_t> target(0, length);
  std::uniform_int_distribution<int> op(0, allow_oracle ? 9 : 8);
  std::vector<Instruction> instructions;
  for (std::uint64_t i = 0; i < length; ++i) {
    Instruction ins;
    switch (op(rng)) {
      case 0:
        ins = {Opcode::Zero, reg(rng), 0, 0};
        break;
      case 1:
      case 2:
      case 3:
        ins = {Opcode::Inc, reg(rng), 0, 0};
        break;
      case 4:
        ins = {Opcode::Copy, reg(rng), reg(rng), 0};
        break;
      case 5:
      case 6:
      case 7:
        ins = {Opcode::Jeq, reg(rng), reg(rng), target(rng)};
        break;
      case 8:
        ins = {Opcode::Halt, 0, 0, 0};
        break;
      default:
        ins = {Opcode::Oracle, reg(rng), 0, 0};
        break;
    }
    instructions.push_back(ins);
  }
  return make_program(std::move(instructions));
}

// Successor-step history built with the public step() only, for feeding the
// detector directly.
inline StepTrace record_steps(const Program& p, const Oracle& x,
                              std::uint64_t max_steps) {
  StepTrace trace;
  Configuration c;
  c.line = 0;
  c.registers.assign(runtime_register_count(p), Nat(0));
  for (std::uint64_t i = 0; i < max_steps; ++i) {
    if (c.line >= p.size() || p.instructions[c.line].op == Opcode::Halt) break;
    StepTrace::Entry e;
    e.line = c.line;
    const Instruction& ins = p.instructions[c.line];
    e.outcome = ins.op == Opcode::Jeq
                    ? (c.registers[ins.a] == c.registers[ins.b] ? TestOutcome::Equal
                                                                : TestOutcome::NotEqual)
                    : TestOutcome::None;
    e.registers = c.registers;
    trace.entries.push_back(std::move(e));
    c = step(c, p, x);
  }
  return trace;
}

inline bool same_resolution(const Verdict& a, const Verdict& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Verdict::Kind::Halt)
    return a.output == b.output && a.time == b.time;
  return true;
}

// The non-finite part of an ordinal (everything above the trailing finite
// term).
inline Ordinal limit_part(const Ordinal& a) {
  Ordinal r;
  for (const OrdinalTerm& t : a.terms()) {
    if (t.exponent.is_zero()) break;
    r = add(r, Ordinal::omega_power(t.exponent, t.coefficient));
  }
  return r;
}

}  // namespace itrm::testutil
