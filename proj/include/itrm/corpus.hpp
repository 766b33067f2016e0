#pragma once

#include <optional>
#include <string>
#include <vector>

#include "itrm/engine.hpp"

namespace itrm {

// One shipped corpus program with its expected verdict and the provenance of
// that expectation (hand trace and/or reference-engine run).
struct CorpusEntry {
  std::string name;
  std::string file;  // relative to the manifest directory
  std::string oracle_spec;
  std::string expect_kind;               // "halt" | "diverge" | "budget"
  std::optional<Nat> expect_output;      // halt
  std::optional<std::string> expect_time;  // halt, CNF text
  std::optional<std::uint32_t> expect_level;  // diverge
  std::optional<std::string> expect_reason;   // budget
  Budget budget;  // defaults unless the manifest overrides
  std::string note;
};

struct CorpusCheck {
  std::string name;
  bool pass = false;
  std::string message;  // mismatch description, empty on pass
};

std::vector<CorpusEntry> load_corpus(const std::string& manifest_path);

// Loads the entry's program relative to base_dir, runs it and compares the
// verdict against the expectation.
CorpusCheck verify_corpus_entry(const CorpusEntry& entry, const std::string& base_dir);

// Convenience: base_dir/manifest.json, verify all.
std::vector<CorpusCheck> verify_corpus(const std::string& base_dir);

Program load_program_file(const std::string& path);

}  // namespace itrm
