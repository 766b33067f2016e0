#include "itrm/isa.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

namespace itrm {

namespace {

std::uint64_t max_register_reference(const Instruction& ins) {
  switch (ins.op) {
    case Opcode::Zero:
    case Opcode::Inc:
    case Opcode::Oracle:
      return ins.a + 1;
    case Opcode::Copy:
    case Opcode::Jeq:
      return std::max(ins.a, ins.b) + 1;
    case Opcode::Halt:
      return 0;
  }
  return 0;
}

}  // namespace

Program make_program(std::vector<Instruction> instructions) {
  Program p;
  p.instructions = std::move(instructions);
  for (std::size_t i = 0; i < p.instructions.size(); ++i) {
    const Instruction& ins = p.instructions[i];
    p.register_count = std::max(p.register_count, max_register_reference(ins));
    if (ins.op == Opcode::Jeq && ins.c > p.instructions.size())
      throw AsmError(i + 1, 1, "jump target out of range (max " +
                                   std::to_string(p.instructions.size()) + ")");
  }
  return p;
}

// --- assembler ------------------------------------------------------------

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line_no;

  void skip_ws() {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\r'))
      ++pos;
  }
  bool eol() {
    skip_ws();
    return pos >= text.size();
  }
  std::size_t column() const { return pos + 1; }

  std::string_view word() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
    return text.substr(start, pos - start);
  }
};

bool is_ident(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

std::string upper(std::string_view s) {
  std::string r(s);
  for (char& c : r) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return r;
}

std::uint64_t parse_u64(std::string_view digits, Cursor& cur, const char* what) {
  std::uint64_t v = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw AsmError(cur.line_no, cur.column(), std::string("bad ") + what);
    std::uint64_t d = static_cast<std::uint64_t>(c - '0');
    if (v > (UINT64_MAX - d) / 10)
      throw AsmError(cur.line_no, cur.column(), std::string(what) + " overflow");
    v = v * 10 + d;
  }
  return v;
}

std::uint64_t parse_register(Cursor& cur) {
  std::size_t col = cur.column();
  std::string_view w = cur.word();
  if (w.size() < 2 || (w[0] != 'r' && w[0] != 'R'))
    throw AsmError(cur.line_no, col, "expected register 'r<k>'");
  std::string_view digits = w.substr(1);
  for (char c : digits)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw AsmError(cur.line_no, col, "expected register 'r<k>'");
  // a dedicated message for the documented failure mode
  std::uint64_t v = 0;
  for (char c : digits) {
    std::uint64_t d = static_cast<std::uint64_t>(c - '0');
    if (v > (UINT64_MAX - d) / 10)
      throw AsmError(cur.line_no, col, "register index overflow");
    v = v * 10 + d;
  }
  return v;
}

}  // namespace

Program parse_program(std::string_view text) {
  struct PendingTarget {
    std::size_t instr_index;
    std::string label;
    std::size_t line_no;
    std::size_t column;
  };
  std::vector<Instruction> instructions;
  std::vector<std::size_t> source_lines;
  std::map<std::string, std::uint64_t> labels;
  std::vector<PendingTarget> pending;

  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    std::string_view raw =
        text.substr(begin, end == std::string_view::npos ? text.size() - begin : end - begin);
    begin = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    if (std::size_t sc = raw.find(';'); sc != std::string_view::npos)
      raw = raw.substr(0, sc);

    Cursor cur{raw, 0, line_no};
    // labels bind to the next instruction (or to fall-off at end of file)
    while (true) {
      cur.skip_ws();
      std::size_t save = cur.pos;
      std::size_t colon = raw.find(':', cur.pos);
      if (colon == std::string_view::npos) break;
      std::string_view candidate = raw.substr(cur.pos, colon - cur.pos);
      if (!is_ident(candidate)) break;
      std::string name(candidate);
      if (labels.count(name))
        throw AsmError(line_no, save + 1, "duplicate label '" + name + "'");
      labels[name] = instructions.size();
      cur.pos = colon + 1;
    }
    if (cur.eol()) continue;

    std::size_t mcol = cur.column();
    std::string mnem = upper(cur.word());
    Instruction ins;
    if (mnem == "ZERO") {
      ins.op = Opcode::Zero;
      ins.a = parse_register(cur);
    } else if (mnem == "INC") {
      ins.op = Opcode::Inc;
      ins.a = parse_register(cur);
    } else if (mnem == "COPY") {
      ins.op = Opcode::Copy;
      ins.a = parse_register(cur);
      ins.b = parse_register(cur);
    } else if (mnem == "JEQ") {
      ins.op = Opcode::Jeq;
      ins.a = parse_register(cur);
      ins.b = parse_register(cur);
      cur.skip_ws();
      std::size_t tcol = cur.column();
      std::string_view t = cur.word();
      if (t.empty()) throw AsmError(line_no, tcol, "expected jump target");
      if (std::isdigit(static_cast<unsigned char>(t[0]))) {
        ins.c = parse_u64(t, cur, "jump target");
      } else if (is_ident(t)) {
        pending.push_back({instructions.size(), std::string(t), line_no, tcol});
      } else {
        throw AsmError(line_no, tcol, "expected label or line number");
      }
    } else if (mnem == "ORACLE") {
      ins.op = Opcode::Oracle;
      ins.a = parse_register(cur);
    } else if (mnem == "HALT") {
      ins.op = Opcode::Halt;
    } else {
      throw AsmError(line_no, mcol, "unknown mnemonic '" + mnem + "'");
    }
    if (!cur.eol())
      throw AsmError(line_no, cur.column(), "trailing input after instruction");
    instructions.push_back(ins);
    source_lines.push_back(line_no);
  }

  for (const auto& p : pending) {
    auto it = labels.find(p.label);
    if (it == labels.end())
      throw AsmError(p.line_no, p.column, "undefined label '" + p.label + "'");
    instructions[p.instr_index].c = it->second;
  }

  for (std::size_t i = 0; i < instructions.size(); ++i) {
    if (instructions[i].op == Opcode::Jeq && instructions[i].c > instructions.size())
      throw AsmError(source_lines[i], 1,
                     "jump target out of range (max " +
                         std::to_string(instructions.size()) + ")");
  }
  return make_program(std::move(instructions));
}

std::string print_program(const Program& p) {
  std::string out;
  for (const Instruction& ins : p.instructions) {
    switch (ins.op) {
      case Opcode::Zero:
        out += "ZERO r" + std::to_string(ins.a);
        break;
      case Opcode::Inc:
        out += "INC r" + std::to_string(ins.a);
        break;
      case Opcode::Copy:
        out += "COPY r" + std::to_string(ins.a) + " r" + std::to_string(ins.b);
        break;
      case Opcode::Jeq:
        out += "JEQ r" + std::to_string(ins.a) + " r" + std::to_string(ins.b) + " " +
               std::to_string(ins.c);
        break;
      case Opcode::Oracle:
        out += "ORACLE r" + std::to_string(ins.a);
        break;
      case Opcode::Halt:
        out += "HALT";
        break;
    }
    out += '\n';
  }
  return out;
}

// --- numbering ------------------------------------------------------------
//
// Instructions of a length-L program are numbered by
//   0                 -> HALT
//   1 + 5q + 0        -> ZERO q
//   1 + 5q + 1        -> INC q
//   1 + 5q + 2        -> COPY (unpair q)
//   1 + 5q + 3        -> JEQ a b t with q = pair(a,b)*(L+1) + t
//   1 + 5q + 4        -> ORACLE q
// and a program is the sequence code: code([]) = 0,
// code(x:rest) = 1 + pair(code_L(x), code(rest)). Both maps are bijections,
// so every natural decodes to a syntactically valid program.

namespace {

Nat instruction_code(const Instruction& ins, std::uint64_t length) {
  switch (ins.op) {
    case Opcode::Halt:
      return 0;
    case Opcode::Zero:
      return 1 + 5 * nat(ins.a) + 0;
    case Opcode::Inc:
      return 1 + 5 * nat(ins.a) + 1;
    case Opcode::Copy:
      return 1 + 5 * cantor_pair(ins.a, ins.b) + 2;
    case Opcode::Jeq:
      return 1 + 5 * (cantor_pair(ins.a, ins.b) * nat(length + 1) + nat(ins.c)) + 3;
    case Opcode::Oracle:
      return 1 + 5 * nat(ins.a) + 4;
  }
  return 0;
}

Instruction instruction_of(const Nat& code, std::uint64_t length) {
  Instruction ins;
  if (sgn(code) == 0) {
    ins.op = Opcode::Halt;
    return ins;
  }
  Nat c = code - 1;
  std::uint64_t op = to_u64(Nat(c % 5));
  Nat q = c / 5;
  switch (op) {
    case 0:
      ins.op = Opcode::Zero;
      ins.a = to_u64(q);
      break;
    case 1:
      ins.op = Opcode::Inc;
      ins.a = to_u64(q);
      break;
    case 2: {
      ins.op = Opcode::Copy;
      auto [s, d] = cantor_unpair(q);
      ins.a = to_u64(s);
      ins.b = to_u64(d);
      break;
    }
    case 3: {
      ins.op = Opcode::Jeq;
      Nat t = q % nat(length + 1);
      Nat m = q / nat(length + 1);
      auto [a, b] = cantor_unpair(m);
      ins.a = to_u64(a);
      ins.b = to_u64(b);
      ins.c = to_u64(t);
      break;
    }
    case 4:
      ins.op = Opcode::Oracle;
      ins.a = to_u64(q);
      break;
  }
  return ins;
}

}  // namespace

Nat index_of(const Program& p) {
  Nat code = 0;
  const std::uint64_t length = p.instructions.size();
  for (auto it = p.instructions.rbegin(); it != p.instructions.rend(); ++it)
    code = 1 + cantor_pair(instruction_code(*it, length), code);
  return code;
}

Program program_of(const Nat& index) {
  if (sgn(index) < 0) throw std::invalid_argument("program index must be >= 0");
  std::vector<Nat> codes;
  Nat rest = index;
  while (sgn(rest) != 0) {
    auto [head, tail] = cantor_unpair(rest - 1);
    codes.push_back(head);
    rest = tail;
  }
  std::vector<Instruction> instructions;
  instructions.reserve(codes.size());
  for (const Nat& c : codes)
    instructions.push_back(instruction_of(c, codes.size()));
  return make_program(std::move(instructions));
}

std::vector<Program> enumerate_bounded(std::uint64_t max_registers, std::size_t count) {
  if (max_registers < 1)
    throw std::invalid_argument("enumerate_bounded requires max_registers >= 1");
  std::vector<Program> out;
  out.reserve(count);
  for (Nat k = 0; out.size() < count; ++k) {
    Program p = program_of(k);
    if (p.register_count <= max_registers) out.push_back(std::move(p));
  }
  return out;
}

Program pad_program(const Program& p) {
  std::vector<Instruction> instructions;
  instructions.reserve(p.instructions.size() + 1);
  instructions.push_back({Opcode::Copy, 0, 0, 0});
  for (Instruction ins : p.instructions) {
    if (ins.op == Opcode::Jeq) ins.c += 1;
    instructions.push_back(ins);
  }
  return make_program(std::move(instructions));
}

}  // namespace itrm
