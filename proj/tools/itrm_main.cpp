#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "itrm/analysis.hpp"
#include "itrm/corpus.hpp"
#include "itrm/engine.hpp"

using namespace itrm;

namespace {

Budget default_budget() {
  Budget b;
  if (const char* env = std::getenv("ITRM_DEFAULT_BUDGET_STEPS")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v >= 1) b.max_successor_steps = v;
  }
  return b;
}

void add_budget_flags(CLI::App* cmd, Budget& b) {
  cmd->add_option("--budget-steps", b.max_successor_steps, "successor step budget")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--budget-limits", b.max_limit_events, "limit event budget")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--budget-nesting", b.max_nesting_level, "lasso nesting budget")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--budget-period", b.max_period, "period search budget")
      ->check(CLI::PositiveNumber);
}

std::string verdict_line(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Halt:
      return "HALT out=" + v.output.get_str() + " t=" + print_cnf(v.time);
    case Verdict::Kind::Diverge:
      return "DIVERGE level=" +
             std::to_string(v.certificate ? v.certificate->level : 0);
    case Verdict::Kind::BudgetExceeded:
      return std::string("BUDGET reason=") + budget_reason_name(v.reason);
  }
  return "?";
}

int cmd_asm(const std::string& path) {
  Program p = load_program_file(path);
  std::cout << print_program(p);
  std::cout << "index=" << index_of(p).get_str() << "\n";
  return 0;
}

int cmd_run(const std::string& path, const std::string& oracle_spec, const Budget& b,
            const std::string& trace_path, const std::string& input) {
  Program p = load_program_file(path);
  Oracle x = oracle_from_spec(oracle_spec);
  TraceFn sink;
  std::ofstream trace_file;
  if (!trace_path.empty()) {
    trace_file.open(trace_path);
    if (!trace_file) {
      std::cerr << "cannot open trace file '" << trace_path << "'\n";
      return 2;
    }
    sink = [&trace_file](const std::string& rec) { trace_file << rec << "\n"; };
  }
  Verdict v = run_on_input(p, x, Nat(input, 10), b, sink);
  std::cout << verdict_line(v) << "\n";
  return v.kind == Verdict::Kind::BudgetExceeded ? 3 : 0;
}

int cmd_debug(const std::string& path, const std::string& oracle_spec, const Budget& b) {
  Program p = load_program_file(path);
  Oracle x = oracle_from_spec(oracle_spec);
  Session session(p, x, b);
  std::cerr << "itrm debug: step [n] | next-limit | until <cnf> | regs | show | run | quit\n";
  auto show = [&session]() {
    Configuration c = session.current();
    std::cout << "t=" << print_cnf(c.clock) << " line=" << c.line << " regs=[";
    for (std::size_t i = 0; i < c.registers.size(); ++i)
      std::cout << (i ? "," : "") << c.registers[i].get_str();
    std::cout << "]\n";
  };
  std::string input;
  while (true) {
    if (session.finished()) {
      std::cout << verdict_line(session.verdict()) << "\n";
      return 0;
    }
    std::cerr << "> ";
    if (!std::getline(std::cin, input)) return 0;
    std::istringstream words(input);
    std::string cmd;
    words >> cmd;
    if (cmd.empty()) continue;
    if (cmd == "quit" || cmd == "q") return 0;
    if (cmd == "regs" || cmd == "show") {
      show();
    } else if (cmd == "step") {
      std::uint64_t n = 1;
      words >> n;
      for (std::uint64_t i = 0; i < n && !session.finished(); ++i) session.advance();
      if (!session.finished()) show();
    } else if (cmd == "next-limit") {
      while (!session.finished() && session.advance() == Session::Event::Stepped) {
      }
      if (!session.finished()) show();
    } else if (cmd == "until") {
      std::string cnf;
      words >> cnf;
      try {
        Ordinal target = parse_cnf(cnf);
        while (!session.finished() && session.current().clock < target)
          session.advance();
      } catch (const OrdinalError& e) {
        std::cerr << e.what() << "\n";
        continue;
      }
      if (!session.finished()) show();
    } else if (cmd == "run") {
      while (!session.finished()) session.advance();
    } else {
      std::cerr << "unknown command '" << cmd << "'\n";
    }
  }
}

std::vector<std::uint64_t> parse_set(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoull(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transfinite register machine workbench"};
  app.require_subcommand(1);

  Budget budget = default_budget();

  std::string asm_file;
  CLI::App* c_asm = app.add_subcommand("asm", "assemble and print canonical form + index");
  c_asm->add_option("file", asm_file, "program file")->required();

  std::string run_file, run_oracle = "zeros", run_trace, run_input = "0";
  CLI::App* c_run = app.add_subcommand("run", "run a program to its verdict");
  c_run->add_option("file", run_file, "program file")->required();
  c_run->add_option("--oracle", run_oracle, "oracle spec");
  c_run->add_option("--trace", run_trace, "write a JSONL trace to this file");
  c_run->add_option("--input", run_input, "input preloaded into register 0");
  add_budget_flags(c_run, budget);

  std::uint64_t h_registers = 1, h_max_index = 20;
  std::string h_oracle = "zeros";
  CLI::App* c_halting = app.add_subcommand("halting", "bounded halting report");
  c_halting->add_option("--registers", h_registers, "register bound n")
      ->check(CLI::PositiveNumber);
  c_halting->add_option("--max-index", h_max_index, "largest index to run");
  c_halting->add_option("--oracle", h_oracle, "oracle spec");
  add_budget_flags(c_halting, budget);

  std::uint64_t j_max_index = 20;
  std::string j_oracle = "zeros";
  CLI::App* c_jump = app.add_subcommand("jump", "jump approximation report");
  c_jump->add_option("--max-index", j_max_index, "largest index to run");
  c_jump->add_option("--oracle", j_oracle, "oracle spec");
  add_budget_flags(c_jump, budget);

  std::string a_file, a_oracle = "zeros", a_set;
  std::uint64_t a_bits = 16;
  CLI::App* c_autored = app.add_subcommand("autored", "autoreduction report");
  c_autored->add_option("file", a_file, "program file")->required();
  c_autored->add_option("--oracle", a_oracle, "oracle spec");
  c_autored->add_option("--bits", a_bits, "check bits 0..N-1");
  c_autored->add_option("--set", a_set, "strong check: comma-separated positions");
  add_budget_flags(c_autored, budget);

  std::string corpus_dir = "corpus";
  bool corpus_verify = false;
  CLI::App* c_corpus = app.add_subcommand("corpus", "list or verify the shipped corpus");
  c_corpus->add_option("--dir", corpus_dir, "corpus directory");
  c_corpus->add_flag("--verify", corpus_verify, "run every entry and compare");

  std::string d_file, d_oracle = "zeros";
  CLI::App* c_debug = app.add_subcommand("debug", "interactive stepping");
  c_debug->add_option("file", d_file, "program file")->required();
  c_debug->add_option("--oracle", d_oracle, "oracle spec");
  add_budget_flags(c_debug, budget);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (c_asm->parsed()) return cmd_asm(asm_file);
    if (c_run->parsed())
      return cmd_run(run_file, run_oracle, budget, run_trace, run_input);
    if (c_halting->parsed()) {
      HaltingReport r =
          bounded_halting(h_registers, oracle_from_spec(h_oracle), h_max_index, budget);
      for (const std::string& line : to_jsonl(r)) std::cout << line << "\n";
      return 0;
    }
    if (c_jump->parsed()) {
      JumpReport r = jump_approx(oracle_from_spec(j_oracle), j_max_index, budget);
      for (const std::string& line : to_jsonl(r)) std::cout << line << "\n";
      return 0;
    }
    if (c_autored->parsed()) {
      Program p = load_program_file(a_file);
      Oracle x = oracle_from_spec(a_oracle);
      AutoreductionReport r;
      if (!a_set.empty())
        r = strong_autoreduction_check(p, x, parse_set(a_set), budget);
      else
        r = autoreduction_check(p, x, a_bits, budget);
      for (const std::string& line : to_jsonl(r)) std::cout << line << "\n";
      std::cerr << (r.all_match() ? "all match\n" : "not an autoreduction on this sample\n");
      return 0;
    }
    if (c_corpus->parsed()) {
      if (!corpus_verify) {
        for (const CorpusEntry& e : load_corpus(corpus_dir + "/manifest.json"))
          std::cout << e.name << " " << e.file << " oracle=" << e.oracle_spec
                    << " expect=" << e.expect_kind << "\n";
        return 0;
      }
      bool all_pass = true;
      std::uint64_t id = 0;
      for (const CorpusCheck& c : verify_corpus(corpus_dir)) {
        std::cout << report_line(id++, c.pass ? "pass" : "fail", std::nullopt,
                                 c.pass ? c.name : c.name + ": " + c.message)
                  << "\n";
        all_pass = all_pass && c.pass;
      }
      std::cerr << (all_pass ? "corpus ok\n" : "corpus FAILED\n");
      return all_pass ? 0 : 1;
    }
    if (c_debug->parsed()) return cmd_debug(d_file, d_oracle, budget);
  } catch (const AsmError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const OracleSpecError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const CnfParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
