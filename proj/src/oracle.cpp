#include "itrm/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>

namespace itrm {

struct Oracle::Node {
  enum class Kind {
    Zeros,
    Ones,
    Finite,
    Periodic,
    Join,
    Flip,
    Delete,
    DeleteSet,
    EvenPart,
    OddPart,
    Product,
    Computed,
  };

  Kind kind;
  std::string spec;
  std::vector<int> bits;              // Finite, Periodic
  Nat position;                       // Flip, Delete
  std::vector<Nat> positions;         // DeleteSet (sorted, unique)
  std::shared_ptr<const Node> left;   // child oracles
  std::shared_ptr<const Node> right;
  std::function<BitResult(const Nat&)> fn;  // Computed

  mutable std::mutex memo_mutex;
  mutable std::map<Nat, BitResult> memo;
  mutable std::atomic<std::uint64_t> runs{0};

  BitResult bit_at(const Nat& pos) const;
  std::uint64_t total_runs() const;
};

namespace {

std::string bits_to_string(const std::vector<int>& bits) {
  std::string s;
  for (int b : bits) s += b ? '1' : '0';
  return s;
}

}  // namespace

Oracle::Oracle() : Oracle(zeros()) {}

Oracle Oracle::zeros() {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Zeros;
  n->spec = "zeros";
  return Oracle(std::move(n));
}

Oracle Oracle::ones() {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Ones;
  n->spec = "ones";
  return Oracle(std::move(n));
}

Oracle Oracle::finite(std::vector<int> bits) {
  for (int b : bits)
    if (b != 0 && b != 1) throw OracleSpecError("finite oracle bits must be 0 or 1");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Finite;
  n->spec = "finite:" + bits_to_string(bits);
  n->bits = std::move(bits);
  return Oracle(std::move(n));
}

Oracle Oracle::periodic(std::vector<int> bits) {
  if (bits.empty()) throw OracleSpecError("periodic oracle needs a nonempty pattern");
  for (int b : bits)
    if (b != 0 && b != 1) throw OracleSpecError("periodic oracle bits must be 0 or 1");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Periodic;
  n->spec = "periodic:" + bits_to_string(bits);
  n->bits = std::move(bits);
  return Oracle(std::move(n));
}

Oracle Oracle::join(Oracle x, Oracle y) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Join;
  n->spec = "join:(" + x.spec() + "),(" + y.spec() + ")";
  n->left = x.node_;
  n->right = y.node_;
  return Oracle(std::move(n));
}

Oracle Oracle::flip(Oracle x, Nat i) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Flip;
  n->spec = "flip:(" + x.spec() + ")@" + i.get_str();
  n->left = x.node_;
  n->position = std::move(i);
  return Oracle(std::move(n));
}

Oracle Oracle::delete_bit(Oracle x, Nat pos) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Delete;
  n->spec = "del:(" + x.spec() + ")@" + pos.get_str();
  n->left = x.node_;
  n->position = std::move(pos);
  return Oracle(std::move(n));
}

Oracle Oracle::delete_bits(Oracle x, std::vector<Nat> positions) {
  if (positions.empty())
    throw OracleSpecError("delete_bits needs a nonempty position set");
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::DeleteSet;
  std::string s = "delset:(" + x.spec() + ")@";
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (i) s += ',';
    s += positions[i].get_str();
  }
  n->spec = std::move(s);
  n->left = x.node_;
  n->positions = std::move(positions);
  return Oracle(std::move(n));
}

Oracle Oracle::product_code(Oracle a, Oracle b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Product;
  n->spec = "product:(" + a.spec() + "),(" + b.spec() + ")";
  n->left = a.node_;
  n->right = b.node_;
  return Oracle(std::move(n));
}

Oracle Oracle::computed(std::function<BitResult(const Nat&)> fn, std::string spec) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Computed;
  n->spec = std::move(spec);
  n->fn = std::move(fn);
  return Oracle(std::move(n));
}

std::pair<Oracle, Oracle> Oracle::split() const {
  auto even = std::make_shared<Node>();
  even->kind = Node::Kind::EvenPart;
  even->spec = "even:(" + spec() + ")";
  even->left = node_;
  auto odd = std::make_shared<Node>();
  odd->kind = Node::Kind::OddPart;
  odd->spec = "odd:(" + spec() + ")";
  odd->left = node_;
  return {Oracle(std::move(even)), Oracle(std::move(odd))};
}

const std::string& Oracle::spec() const { return node_->spec; }

Oracle::BitResult Oracle::Node::bit_at(const Nat& pos) const {
  const Node& n = *this;
  auto child_bit = [](const std::shared_ptr<const Node>& c, const Nat& q) {
    return c->bit_at(q);
  };
  using K = Node::Kind;
  using R = Oracle::BitResult;
  switch (n.kind) {
    case K::Zeros:
      return R::bit(0);
    case K::Ones:
      return R::bit(1);
    case K::Finite: {
      if (pos < nat(n.bits.size())) return R::bit(n.bits[to_u64(pos)]);
      return R::bit(0);
    }
    case K::Periodic: {
      Nat idx = pos % nat(n.bits.size());
      return R::bit(n.bits[to_u64(idx)]);
    }
    case K::Join: {
      if (pos % 2 == 0) return child_bit(n.left, pos / 2);
      return child_bit(n.right, (pos - 1) / 2);
    }
    case K::Flip: {
      R r = child_bit(n.left, pos);
      if (r.ok && pos == n.position) r.value = 1 - r.value;
      return r;
    }
    case K::Delete: {
      if (pos < n.position) return child_bit(n.left, pos);
      return child_bit(n.left, pos + 1);
    }
    case K::DeleteSet: {
      Nat shifted = pos;
      for (const Nat& s : n.positions)
        if (s <= shifted) shifted += 1;
      return child_bit(n.left, shifted);
    }
    case K::EvenPart:
      return child_bit(n.left, 2 * pos);
    case K::OddPart:
      return child_bit(n.left, 2 * pos + 1);
    case K::Product: {
      auto [i, j] = cantor_unpair(pos);
      R a = child_bit(n.left, i);
      if (!a.ok) return a;
      R b = child_bit(n.right, j);
      if (!b.ok) return b;
      return R::bit(a.value & b.value);
    }
    case K::Computed: {
      {
        std::lock_guard<std::mutex> lock(n.memo_mutex);
        auto it = n.memo.find(pos);
        if (it != n.memo.end()) return it->second;
      }
      R r = n.fn(pos);
      n.runs.fetch_add(1);
      std::lock_guard<std::mutex> lock(n.memo_mutex);
      auto [it, inserted] = n.memo.emplace(pos, r);
      return it->second;  // first result wins if two threads raced
    }
  }
  return R::fail("internal: unknown oracle node");
}

std::uint64_t Oracle::Node::total_runs() const {
  std::uint64_t total = runs.load();
  if (left) total += left->total_runs();
  if (right) total += right->total_runs();
  return total;
}

Oracle::BitResult Oracle::bit(const Nat& n) const {
  if (sgn(n) < 0) throw std::invalid_argument("oracle bit position must be >= 0");
  return node_->bit_at(n);
}

int Oracle::require_bit(const Nat& n) const {
  BitResult r = bit(n);
  if (!r.ok) throw OracleBitError(r.failure);
  return r.value;
}

std::uint64_t Oracle::backing_runs() const { return node_->total_runs(); }

}  // namespace itrm
