#include "itrm/corpus.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace itrm {

Program load_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read program file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_program(buf.str());
}

std::vector<CorpusEntry> load_corpus(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot read corpus manifest '" + manifest_path + "'");
  nlohmann::json doc = nlohmann::json::parse(in);
  std::vector<CorpusEntry> entries;
  for (const auto& j : doc.at("entries")) {
    CorpusEntry e;
    e.name = j.at("name").get<std::string>();
    e.file = j.at("file").get<std::string>();
    e.oracle_spec = j.value("oracle", std::string("zeros"));
    const auto& ex = j.at("expect");
    e.expect_kind = ex.at("kind").get<std::string>();
    if (ex.contains("out")) e.expect_output = Nat(ex.at("out").get<std::string>(), 10);
    if (ex.contains("time")) e.expect_time = ex.at("time").get<std::string>();
    if (ex.contains("level")) e.expect_level = ex.at("level").get<std::uint32_t>();
    if (ex.contains("reason")) e.expect_reason = ex.at("reason").get<std::string>();
    if (j.contains("budget")) {
      const auto& bj = j.at("budget");
      if (bj.contains("steps")) e.budget.max_successor_steps = bj.at("steps").get<std::uint64_t>();
      if (bj.contains("limits")) e.budget.max_limit_events = bj.at("limits").get<std::uint64_t>();
      if (bj.contains("nesting")) e.budget.max_nesting_level = bj.at("nesting").get<std::uint64_t>();
      if (bj.contains("period")) e.budget.max_period = bj.at("period").get<std::uint64_t>();
    }
    e.note = j.value("note", std::string());
    entries.push_back(std::move(e));
  }
  return entries;
}

CorpusCheck verify_corpus_entry(const CorpusEntry& entry, const std::string& base_dir) {
  CorpusCheck check;
  check.name = entry.name;
  Program p;
  Oracle x;
  try {
    p = load_program_file(base_dir + "/" + entry.file);
    x = oracle_from_spec(entry.oracle_spec);
  } catch (const std::exception& e) {
    check.message = e.what();
    return check;
  }
  Verdict v = run(p, x, entry.budget);

  auto mismatch = [&check](const std::string& what) {
    check.message = what;
    return check;
  };

  if (entry.expect_kind == "halt") {
    if (v.kind != Verdict::Kind::Halt)
      return mismatch("expected halt, got " +
                      std::string(v.kind == Verdict::Kind::Diverge ? "diverge" : "budget"));
    if (entry.expect_output && v.output != *entry.expect_output)
      return mismatch("output " + v.output.get_str() + " != expected " +
                      entry.expect_output->get_str());
    if (entry.expect_time && print_cnf(v.time) != *entry.expect_time)
      return mismatch("time " + print_cnf(v.time) + " != expected " + *entry.expect_time);
  } else if (entry.expect_kind == "diverge") {
    if (v.kind != Verdict::Kind::Diverge)
      return mismatch("expected diverge, got " +
                      std::string(v.kind == Verdict::Kind::Halt ? "halt" : "budget"));
    if (entry.expect_level && v.certificate &&
        v.certificate->level != *entry.expect_level)
      return mismatch("diverge level " + std::to_string(v.certificate->level) +
                      " != expected " + std::to_string(*entry.expect_level));
  } else if (entry.expect_kind == "budget") {
    if (v.kind != Verdict::Kind::BudgetExceeded)
      return mismatch("expected budget, got " +
                      std::string(v.kind == Verdict::Kind::Halt ? "halt" : "diverge"));
    if (entry.expect_reason && budget_reason_name(v.reason) != *entry.expect_reason)
      return mismatch(std::string("budget reason ") + budget_reason_name(v.reason) +
                      " != expected " + *entry.expect_reason);
  } else {
    return mismatch("manifest: unknown expect kind '" + entry.expect_kind + "'");
  }
  check.pass = true;
  return check;
}

std::vector<CorpusCheck> verify_corpus(const std::string& base_dir) {
  std::vector<CorpusCheck> out;
  for (const CorpusEntry& e : load_corpus(base_dir + "/manifest.json"))
    out.push_back(verify_corpus_entry(e, base_dir));
  return out;
}

}  // namespace itrm
