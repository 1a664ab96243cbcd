#include "rescueplan/fact_set.hpp"

#include <algorithm>
#include <cstdio>

namespace rescueplan {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv(std::uint64_t& h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
}

// splitmix64 finalizer; spreads FNV output before summation.
std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

std::uint64_t atom_digest(const Atom& a) {
  std::uint64_t h = kFnvOffset;
  fnv(h, a.predicate);
  fnv(h, "/");
  fnv(h, std::to_string(a.args.size()));
  for (const Term& t : a.args) {
    fnv(h, "\x1f");
    fnv(h, t.repr());
  }
  return mix(h);
}

FactSet::FactSet(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (const Atom& a : atoms_) {
    if (!a.is_ground()) {
      throw Error(ErrorKind::invalid_argument, "fact set atoms must be ground: " + to_string(a));
    }
  }
  std::sort(atoms_.begin(), atoms_.end());
  atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
  for (const Atom& a : atoms_) sum_ += atom_digest(a);
}

bool FactSet::insert(Atom a) {
  if (!a.is_ground()) {
    throw Error(ErrorKind::invalid_argument, "fact set atoms must be ground: " + to_string(a));
  }
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
  if (it != atoms_.end() && *it == a) return false;
  sum_ += atom_digest(a);
  atoms_.insert(it, std::move(a));
  return true;
}

bool FactSet::erase(const Atom& a) {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
  if (it == atoms_.end() || *it != a) return false;
  sum_ -= atom_digest(*it);
  atoms_.erase(it);
  return true;
}

bool FactSet::contains(const Atom& a) const {
  return std::binary_search(atoms_.begin(), atoms_.end(), a);
}

namespace {

int compare_key(const Atom& a, const PredicateKey& k) {
  if (int c = a.predicate.compare(k.name); c != 0) return c;
  if (a.args.size() != k.arity) return a.args.size() < k.arity ? -1 : 1;
  return 0;
}

}  // namespace

std::span<const Atom> FactSet::range(const PredicateKey& key) const {
  auto lo = std::lower_bound(atoms_.begin(), atoms_.end(), key,
                             [](const Atom& a, const PredicateKey& k) { return compare_key(a, k) < 0; });
  auto hi = std::upper_bound(lo, atoms_.end(), key,
                             [](const PredicateKey& k, const Atom& a) { return compare_key(a, k) > 0; });
  return {lo, hi};
}

std::uint64_t FactSet::hash() const noexcept {
  return mix(sum_ ^ (static_cast<std::uint64_t>(atoms_.size()) * 0x9e3779b97f4a7c15ULL));
}

FactSet merge(const FactSet& a, const FactSet& b) {
  std::vector<Atom> all;
  all.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(all));
  return FactSet(std::move(all));
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rescueplan
