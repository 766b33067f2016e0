#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "itrm/nat.hpp"

namespace itrm {

// A real, i.e. an element of 2^omega, queried bit by bit. Oracles are
// immutable values; computed oracles memoize bits behind an internal lock so
// they can be shared across concurrent runs.
//
// Bits of computed oracles can fail to resolve (the backing run diverges or
// exceeds its budget). Failures are sticky and propagate to the querying
// run; they are never silently read as 0.
class Oracle {
 public:
  struct BitResult {
    bool ok = false;
    int value = 0;
    std::string failure;  // "budget:steps", "diverges", "non-boolean", ...

    static BitResult bit(int v) { return {true, v, {}}; }
    static BitResult fail(std::string why) { return {false, 0, std::move(why)}; }
  };

  Oracle();  // zeros

  static Oracle zeros();
  static Oracle ones();
  // The given bits, then zeros.
  static Oracle finite(std::vector<int> bits);
  // The given nonempty pattern repeated forever.
  static Oracle periodic(std::vector<int> bits);
  static Oracle join(Oracle x, Oracle y);
  static Oracle flip(Oracle x, Nat i);
  static Oracle delete_bit(Oracle x, Nat n);
  // Deletes every position in `positions` simultaneously: bit k of the
  // result is the bit of x at the k-th index not in the set.
  static Oracle delete_bits(Oracle x, std::vector<Nat> positions);
  // The product coding {pair(i,j) : i in a, j in b}. Not information
  // preserving (see join for the interleaving coding).
  static Oracle product_code(Oracle a, Oracle b);
  // Bit function with memoization and run counting; `spec` is the printable
  // description used in reports.
  static Oracle computed(std::function<BitResult(const Nat&)> fn, std::string spec);

  std::pair<Oracle, Oracle> split() const;

  BitResult bit(const Nat& n) const;
  BitResult bit(std::uint64_t n) const { return bit(nat(n)); }

  // Bit with failures raised as OracleBitError.
  int require_bit(const Nat& n) const;

  const std::string& spec() const;

  // How many times computed nodes anywhere in this oracle evaluated their
  // function (memo hits excluded). Instrumentation for tests.
  std::uint64_t backing_runs() const;

 private:
  struct Node;
  explicit Oracle(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

class OracleBitError : public std::runtime_error {
 public:
  explicit OracleBitError(const std::string& failure)
      : std::runtime_error("unresolved oracle bit: " + failure), failure(failure) {}
  std::string failure;
};

class OracleSpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses the oracle spec mini-language:
//   zeros | ones | finite:<bitstring> | periodic:<bitstring>
//   | program:<path>[@steps=<n>] | join:<spec>,<spec>
//   | flip:<spec>@<i> | del:<spec>@<n>
// Nested specs are parenthesized. Defined in oracle_spec.cpp (program-backed
// oracles run the engine).
Oracle oracle_from_spec(std::string_view spec);

}  // namespace itrm
