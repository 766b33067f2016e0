#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "itrm/nat.hpp"

namespace itrm {

enum class Opcode : std::uint8_t { Zero, Inc, Copy, Jeq, Oracle, Halt };

// ZERO r        a = register
// INC r         a = register
// COPY src dst  a = src, b = dst
// JEQ r1 r2 t   a, b = registers, c = target line (program length = fall off)
// ORACLE r      a = register; replaces the content v of r by oracle bit x(v)
// HALT
struct Instruction {
  Opcode op = Opcode::Halt;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;

  bool operator==(const Instruction&) const = default;
};

struct Program {
  std::vector<Instruction> instructions;
  // max referenced register index + 1; 0 for programs that reference none.
  std::uint64_t register_count = 0;

  std::size_t size() const { return instructions.size(); }
  bool operator==(const Program&) const = default;
};

class AsmError : public std::runtime_error {
 public:
  AsmError(std::size_t line, std::size_t column, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", col " +
                           std::to_string(column) + ": " + message),
        line(line),
        column(column) {}
  std::size_t line;
  std::size_t column;
};

// Builds a Program from raw instructions: computes register_count and
// validates jump targets (target <= length; == length is the explicit
// fall-off). Throws AsmError on violations.
Program make_program(std::vector<Instruction> instructions);

// Assembly text: one instruction per line, ';' starts a comment, optional
// 'label:' prefixes, JEQ target is a label or a line number. Throws AsmError
// with line/column on syntax errors, undefined labels and register overflow.
Program parse_program(std::string_view text);

// Canonical text: uppercase mnemonics, numeric targets, no labels, LF line
// endings. parse_program(print_program(p)) == p.
std::string print_program(const Program& p);

// Mutually inverse bijection between naturals and syntactically valid
// programs. index_of(empty) == 0.
Nat index_of(const Program& p);
Program program_of(const Nat& index);

// First `count` programs, in global numbering order, using at most
// max_registers registers. Requires max_registers >= 1.
std::vector<Program> enumerate_bounded(std::uint64_t max_registers, std::size_t count);

// Inserts a no-op (COPY r0 r0) at the front and shifts all jump targets;
// observationally equivalent to p, with a different index.
Program pad_program(const Program& p);

}  // namespace itrm
