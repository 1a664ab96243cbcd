#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rescueplan/kb.hpp"

namespace rescueplan {

// 64-bit digest of one ground atom's canonical encoding. Stable across
// processes and platforms.
std::uint64_t atom_digest(const Atom& a);

// Ordered set of ground atoms in canonical order (predicate, arity, printed
// arguments). Atoms sharing a predicate key are contiguous.
//
// The set digest is an order-independent combination of atom digests, kept
// up to date on every mutation, so equal sets hash equal no matter how they
// were built.
class FactSet {
 public:
  FactSet() = default;
  // Sorts and deduplicates. Throws Error(invalid_argument) on non-ground atoms.
  explicit FactSet(std::vector<Atom> atoms);

  bool insert(Atom a);  // true when the set changed
  bool erase(const Atom& a);
  bool contains(const Atom& a) const;

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::span<const Atom> range(const PredicateKey& key) const;
  auto begin() const noexcept { return atoms_.begin(); }
  auto end() const noexcept { return atoms_.end(); }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  std::uint64_t hash() const noexcept;

  friend bool operator==(const FactSet& a, const FactSet& b) {
    return a.sum_ == b.sum_ && a.atoms_ == b.atoms_;
  }

 private:
  std::vector<Atom> atoms_;
  std::uint64_t sum_ = 0;
};

FactSet merge(const FactSet& a, const FactSet& b);

struct FactSetHasher {
  std::size_t operator()(const FactSet& s) const noexcept {
    return static_cast<std::size_t>(s.hash());
  }
};

std::string hash_hex(std::uint64_t h);

}  // namespace rescueplan
