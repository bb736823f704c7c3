// Order-sorted message algebra: sorted terms, canonical forms,
// substitutions, matching, and the carried-by relation.

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sas {

/// Sorts of the message algebra plus the sort of strand indices (Nat).
/// Subsort order: Akey < Mesg, Skey < Mesg, Data < Mesg; Nat is unrelated
/// to the message sorts.
enum class Sort { Mesg, Akey, Skey, Data, Nat };

std::string_view sort_name(Sort s);
std::optional<Sort> sort_from_name(std::string_view name);

bool sort_le(Sort a, Sort b);
bool is_atomic_sort(Sort s);   // Akey, Skey, Data
bool is_key_sort(Sort s);      // Akey, Skey
bool is_message_sort(Sort s);  // everything except Nat

struct SortError : std::runtime_error {
  explicit SortError(const std::string& what) : std::runtime_error(what) {}
};

/// A named variable with its unique sort.
struct Variable {
  std::string name;
  Sort sort = Sort::Mesg;

  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

/// An immutable term of the message algebra, extended with natural-number
/// literals for use in formulas.  Terms are cheap to copy (shared nodes).
///
/// Construction is permissive: ill-sorted structures such as invk of a
/// data term can be built, so that canonicalize can report them.  Whether
/// a term is well sorted and canonical is computed once at construction.
class Term {
 public:
  enum class Kind { Var, Nat, Pair, Enc, Invk };

  static Term variable(std::string name, Sort sort);
  static Term variable(const Variable& v);
  static Term nat(std::uint64_t value);
  static Term pair(Term left, Term right);
  static Term enc(Term body, Term key);
  static Term invk(Term key);

  Kind kind() const;
  const Variable& var() const;       // Kind::Var
  std::uint64_t nat_value() const;   // Kind::Nat
  const Term& left() const;          // Kind::Pair
  const Term& right() const;         // Kind::Pair
  const Term& body() const;          // Kind::Enc
  const Term& key() const;           // Kind::Enc
  const Term& inv_arg() const;       // Kind::Invk

  bool is_var() const { return kind() == Kind::Var; }

  /// True when every node is well sorted.
  bool well_sorted() const;
  /// True when well sorted and free of reducible invk applications.
  bool canonical() const;
  std::size_t depth() const;
  std::size_t hash() const;

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
  /// Total structural order; used for deterministic sets and printing.
  static std::strong_ordering compare(const Term& a, const Term& b);
  friend bool operator<(const Term& a, const Term& b) {
    return compare(a, b) == std::strong_ordering::less;
  }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Term create(Kind kind, Variable var, std::uint64_t nat,
                     std::vector<Term> children);
  std::shared_ptr<const Node> node_;
};

/// Unique least sort of a well-formed term.  Throws SortError otherwise.
Sort sort_of(const Term& t);

/// Canonical representative of t's equivalence class under the key-inverse
/// equations.  Throws SortError on ill-sorted input.  Idempotent.
Term canonicalize(const Term& t);

/// Sort-preserving map from variables to canonical terms.
class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<Variable, Term>> bindings);

  /// Binds x to canonicalize(t).  Throws SortError unless sort(t) <= sort(x).
  /// Rebinding a variable to a different term is an error.
  void bind(const Variable& x, const Term& t);
  const Term* lookup(const Variable& x) const;
  bool contains(const Variable& x) const { return lookup(x) != nullptr; }

  bool empty() const { return bindings_.size() == 0; }
  std::size_t size() const { return bindings_.size(); }
  auto begin() const { return bindings_.begin(); }
  auto end() const { return bindings_.end(); }

  friend bool operator==(const Substitution&, const Substitution&);
  static std::strong_ordering compare(const Substitution& a,
                                      const Substitution& b);

 private:
  std::map<Variable, Term> bindings_;
};

/// Homomorphic application followed by canonicalization.  Variables outside
/// the substitution's domain are left unchanged.
Term apply(const Substitution& s, const Term& t);

/// compose(outer, inner) applies as: apply(result, t) ==
/// apply(outer, apply(inner, t)).
Substitution compose(const Substitution& outer, const Substitution& inner);

/// All substitutions extending `partial` with apply(result, pattern) ==
/// target.  Both terms must be canonical.  For this signature the result
/// has at most one element; the set form keeps the contract stable if the
/// signature grows non-unitary matching.
std::vector<Substitution> match(const Term& pattern, const Term& target,
                                const Substitution& partial = {});

/// t0 is recoverable from t1 by projections of pairs and decryption of
/// encryption bodies.  Both terms must be canonical and message sorted.
bool carried_by(const Term& t0, const Term& t1);

/// Maximal subterms of atomic sort, in first-occurrence order, deduplicated.
std::vector<Term> atoms_of(const Term& t);

/// All distinct subterms in first-occurrence (pre-order) order.
std::vector<Term> subterms(const Term& t);

/// An ordered set of variables with unique names.  Declaration order is
/// preserved and significant for printing and formula extraction.
class VariableSet {
 public:
  VariableSet() = default;
  VariableSet(std::initializer_list<Variable> vars);

  /// Throws std::invalid_argument when the name is already declared.
  void declare(const Variable& v);
  bool contains_name(std::string_view name) const;
  bool contains(const Variable& v) const;
  std::optional<Variable> find(std::string_view name) const;

  const std::vector<Variable>& variables() const { return vars_; }
  std::size_t size() const { return vars_.size(); }
  bool empty() const { return vars_.empty(); }
  auto begin() const { return vars_.begin(); }
  auto end() const { return vars_.end(); }

  friend bool operator==(const VariableSet&, const VariableSet&) = default;

 private:
  std::vector<Variable> vars_;
};

}  // namespace sas
