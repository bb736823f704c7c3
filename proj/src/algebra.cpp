#include "sas/algebra.hpp"

#include <algorithm>
#include <set>

namespace sas {

std::string_view sort_name(Sort s) {
  switch (s) {
    case Sort::Mesg: return "mesg";
    case Sort::Akey: return "akey";
    case Sort::Skey: return "skey";
    case Sort::Data: return "data";
    case Sort::Nat: return "strd";
  }
  return "?";
}

std::optional<Sort> sort_from_name(std::string_view name) {
  if (name == "mesg") return Sort::Mesg;
  if (name == "akey") return Sort::Akey;
  if (name == "skey") return Sort::Skey;
  if (name == "data") return Sort::Data;
  if (name == "strd") return Sort::Nat;
  return std::nullopt;
}

bool sort_le(Sort a, Sort b) {
  if (a == b) return true;
  return b == Sort::Mesg && is_atomic_sort(a);
}

bool is_atomic_sort(Sort s) {
  return s == Sort::Akey || s == Sort::Skey || s == Sort::Data;
}

bool is_key_sort(Sort s) { return s == Sort::Akey || s == Sort::Skey; }

bool is_message_sort(Sort s) { return s != Sort::Nat; }

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

struct Term::Node {
  Kind kind;
  Variable var;                 // Kind::Var
  std::uint64_t nat = 0;        // Kind::Nat
  std::vector<Term> children;   // Pair: left,right; Enc: body,key; Invk: arg
  std::optional<Sort> sort;     // nullopt when ill sorted
  bool canonical = false;
  std::size_t hash = 0;
  std::size_t depth = 1;
};

namespace {

std::optional<Sort> node_sort(Term::Kind kind, const std::vector<Term>& kids,
                              const Variable& var) {
  auto msg = [](const Term& t) {
    return t.well_sorted() && is_message_sort(sort_of(t));
  };
  switch (kind) {
    case Term::Kind::Var:
      return var.sort;
    case Term::Kind::Nat:
      return Sort::Nat;
    case Term::Kind::Pair:
      if (msg(kids[0]) && msg(kids[1])) return Sort::Mesg;
      return std::nullopt;
    case Term::Kind::Enc:
      if (msg(kids[0]) && kids[1].well_sorted() &&
          is_key_sort(sort_of(kids[1])))
        return Sort::Mesg;
      return std::nullopt;
    case Term::Kind::Invk:
      if (kids[0].well_sorted() && is_key_sort(sort_of(kids[0])))
        return sort_of(kids[0]);
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

Term Term::create(Kind kind, Variable var, std::uint64_t nat,
                  std::vector<Term> children) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->var = std::move(var);
  node->nat = nat;
  node->children = std::move(children);
  node->sort = node_sort(kind, node->children, node->var);

  std::size_t h = hash_combine(0x5a17, static_cast<std::size_t>(kind));
  std::size_t d = 1;
  bool kids_canonical = true;
  for (const Term& c : node->children) {
    h = hash_combine(h, c.hash());
    d = std::max(d, c.depth() + 1);
    kids_canonical = kids_canonical && c.canonical();
  }
  if (kind == Kind::Var) {
    h = hash_combine(h, std::hash<std::string>{}(node->var.name));
    h = hash_combine(h, static_cast<std::size_t>(node->var.sort));
  }
  if (kind == Kind::Nat) h = hash_combine(h, node->nat);
  node->hash = h;
  node->depth = d;

  bool reducible_invk =
      kind == Kind::Invk &&
      (node->children[0].kind() == Kind::Invk ||
       (node->children[0].well_sorted() &&
        sort_of(node->children[0]) == Sort::Skey));
  node->canonical = kids_canonical && node->sort.has_value() && !reducible_invk;
  return Term(std::move(node));
}

Term Term::variable(std::string name, Sort sort) {
  return create(Kind::Var, Variable{std::move(name), sort}, 0, {});
}

Term Term::variable(const Variable& v) { return create(Kind::Var, v, 0, {}); }

Term Term::nat(std::uint64_t value) { return create(Kind::Nat, {}, value, {}); }

Term Term::pair(Term left, Term right) {
  return create(Kind::Pair, {}, 0, {std::move(left), std::move(right)});
}

Term Term::enc(Term body, Term key) {
  return create(Kind::Enc, {}, 0, {std::move(body), std::move(key)});
}

Term Term::invk(Term key) {
  return create(Kind::Invk, {}, 0, {std::move(key)});
}

Term::Kind Term::kind() const { return node_->kind; }

const Variable& Term::var() const {
  if (kind() != Kind::Var) throw std::invalid_argument("Term::var: not a variable");
  return node_->var;
}

std::uint64_t Term::nat_value() const {
  if (kind() != Kind::Nat) throw std::invalid_argument("Term::nat_value: not a numeral");
  return node_->nat;
}

const Term& Term::left() const {
  if (kind() != Kind::Pair) throw std::invalid_argument("Term::left: not a pair");
  return node_->children[0];
}

const Term& Term::right() const {
  if (kind() != Kind::Pair) throw std::invalid_argument("Term::right: not a pair");
  return node_->children[1];
}

const Term& Term::body() const {
  if (kind() != Kind::Enc) throw std::invalid_argument("Term::body: not an encryption");
  return node_->children[0];
}

const Term& Term::key() const {
  if (kind() != Kind::Enc) throw std::invalid_argument("Term::key: not an encryption");
  return node_->children[1];
}

const Term& Term::inv_arg() const {
  if (kind() != Kind::Invk) throw std::invalid_argument("Term::inv_arg: not an inverse");
  return node_->children[0];
}

bool Term::well_sorted() const { return node_->sort.has_value(); }
bool Term::canonical() const { return node_->canonical; }
std::size_t Term::depth() const { return node_->depth; }
std::size_t Term::hash() const { return node_->hash; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash) return false;
  return Term::compare(a, b) == std::strong_ordering::equal;
}

std::strong_ordering Term::compare(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case Kind::Var:
      return a.node_->var <=> b.node_->var;
    case Kind::Nat:
      return a.node_->nat <=> b.node_->nat;
    default: {
      const auto& xs = a.node_->children;
      const auto& ys = b.node_->children;
      for (std::size_t i = 0; i < xs.size(); ++i)
        if (auto c = compare(xs[i], ys[i]); c != 0) return c;
      return std::strong_ordering::equal;
    }
  }
}

Sort sort_of(const Term& t) {
  if (!t.well_sorted()) {
    throw SortError("ill-sorted term: " +
                    std::string(t.kind() == Term::Kind::Invk
                                    ? "invk applied to a non-key"
                                    : "numeral or non-message under a message operation"));
  }
  switch (t.kind()) {
    case Term::Kind::Var: return t.var().sort;
    case Term::Kind::Nat: return Sort::Nat;
    case Term::Kind::Pair: return Sort::Mesg;
    case Term::Kind::Enc: return Sort::Mesg;
    case Term::Kind::Invk: return sort_of(t.inv_arg());
  }
  throw SortError("unreachable");
}

Term canonicalize(const Term& t) {
  if (t.canonical()) return t;
  switch (t.kind()) {
    case Term::Kind::Var:
    case Term::Kind::Nat:
      return t;
    case Term::Kind::Pair:
      return Term::pair(canonicalize(t.left()), canonicalize(t.right()));
    case Term::Kind::Enc: {
      Term r = Term::enc(canonicalize(t.body()), canonicalize(t.key()));
      if (!r.well_sorted()) sort_of(r);  // throws with a message
      return r;
    }
    case Term::Kind::Invk: {
      Term arg = canonicalize(t.inv_arg());
      Sort s = sort_of(arg);  // throws when the argument is ill sorted
      if (!is_key_sort(s)) throw SortError("invk applied to a non-key term");
      if (s == Sort::Skey) return arg;              // y^-1 = y for symmetric keys
      if (arg.kind() == Term::Kind::Invk) return arg.inv_arg();  // double inverse
      return Term::invk(arg);
    }
  }
  throw SortError("unreachable");
}

Substitution::Substitution(
    std::initializer_list<std::pair<Variable, Term>> bindings) {
  for (const auto& [x, t] : bindings) bind(x, t);
}

void Substitution::bind(const Variable& x, const Term& t) {
  Term value = canonicalize(t);
  if (!sort_le(sort_of(value), x.sort)) {
    throw SortError("binding for " + x.name + " has sort " +
                    std::string(sort_name(sort_of(value))) +
                    ", not a subsort of " + std::string(sort_name(x.sort)));
  }
  auto [it, inserted] = bindings_.emplace(x, value);
  if (!inserted && !(it->second == value))
    throw std::invalid_argument("variable " + x.name + " already bound");
}

const Term* Substitution::lookup(const Variable& x) const {
  auto it = bindings_.find(x);
  return it == bindings_.end() ? nullptr : &it->second;
}

bool operator==(const Substitution& a, const Substitution& b) {
  return Substitution::compare(a, b) == std::strong_ordering::equal;
}

std::strong_ordering Substitution::compare(const Substitution& a,
                                           const Substitution& b) {
  auto i = a.bindings_.begin(), j = b.bindings_.begin();
  for (; i != a.bindings_.end() && j != b.bindings_.end(); ++i, ++j) {
    if (auto c = i->first <=> j->first; c != 0) return c;
    if (auto c = Term::compare(i->second, j->second); c != 0) return c;
  }
  if (i != a.bindings_.end()) return std::strong_ordering::greater;
  if (j != b.bindings_.end()) return std::strong_ordering::less;
  return std::strong_ordering::equal;
}

Term apply(const Substitution& s, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      const Term* bound = s.lookup(t.var());
      return bound ? *bound : t;
    }
    case Term::Kind::Nat:
      return t;
    case Term::Kind::Pair:
      return Term::pair(apply(s, t.left()), apply(s, t.right()));
    case Term::Kind::Enc:
      return Term::enc(apply(s, t.body()), apply(s, t.key()));
    case Term::Kind::Invk:
      return canonicalize(Term::invk(apply(s, t.inv_arg())));
  }
  throw SortError("unreachable");
}

Substitution compose(const Substitution& outer, const Substitution& inner) {
  Substitution result;
  for (const auto& [x, t] : inner) result.bind(x, apply(outer, t));
  for (const auto& [x, t] : outer)
    if (!result.contains(x)) result.bind(x, t);
  return result;
}

namespace {

bool match_into(const Term& p, const Term& t, Substitution& s) {
  switch (p.kind()) {
    case Term::Kind::Var: {
      if (const Term* bound = s.lookup(p.var())) return *bound == t;
      if (!sort_le(sort_of(t), p.var().sort)) return false;
      s.bind(p.var(), t);
      return true;
    }
    case Term::Kind::Nat:
      return t.kind() == Term::Kind::Nat && p.nat_value() == t.nat_value();
    case Term::Kind::Pair:
      return t.kind() == Term::Kind::Pair && match_into(p.left(), t.left(), s) &&
             match_into(p.right(), t.right(), s);
    case Term::Kind::Enc:
      return t.kind() == Term::Kind::Enc && match_into(p.body(), t.body(), s) &&
             match_into(p.key(), t.key(), s);
    case Term::Kind::Invk: {
      // invk(v) matches t exactly when v matches the canonical inverse of t.
      if (!is_key_sort(sort_of(t))) return false;
      return match_into(p.inv_arg(), canonicalize(Term::invk(t)), s);
    }
  }
  return false;
}

}  // namespace

std::vector<Substitution> match(const Term& pattern, const Term& target,
                                const Substitution& partial) {
  if (!pattern.canonical())
    throw std::invalid_argument("match: pattern is not canonical");
  if (!target.canonical())
    throw std::invalid_argument("match: target is not canonical");
  Substitution s = partial;
  if (match_into(pattern, target, s)) return {std::move(s)};
  return {};
}

bool carried_by(const Term& t0, const Term& t1) {
  if (!t0.canonical() || !t1.canonical())
    throw std::invalid_argument("carried_by: terms must be canonical");
  if (!is_message_sort(sort_of(t0)) || !is_message_sort(sort_of(t1)))
    throw std::invalid_argument("carried_by: terms must be message sorted");
  if (t0 == t1) return true;
  switch (t1.kind()) {
    case Term::Kind::Pair:
      return carried_by(t0, t1.left()) || carried_by(t0, t1.right());
    case Term::Kind::Enc:
      return carried_by(t0, t1.body());
    default:
      return false;
  }
}

namespace {

void collect_atoms(const Term& t, std::set<Term>& seen,
                   std::vector<Term>& out) {
  Sort s = sort_of(t);
  if (is_atomic_sort(s)) {
    if (seen.insert(t).second) out.push_back(t);
    return;
  }
  switch (t.kind()) {
    case Term::Kind::Pair:
      collect_atoms(t.left(), seen, out);
      collect_atoms(t.right(), seen, out);
      break;
    case Term::Kind::Enc:
      collect_atoms(t.body(), seen, out);
      collect_atoms(t.key(), seen, out);
      break;
    default:
      break;  // Mesg-sorted variables and numerals are not atoms
  }
}

void collect_subterms(const Term& t, std::set<Term>& seen,
                      std::vector<Term>& out) {
  if (seen.insert(t).second) out.push_back(t);
  switch (t.kind()) {
    case Term::Kind::Pair:
      collect_subterms(t.left(), seen, out);
      collect_subterms(t.right(), seen, out);
      break;
    case Term::Kind::Enc:
      collect_subterms(t.body(), seen, out);
      collect_subterms(t.key(), seen, out);
      break;
    case Term::Kind::Invk:
      collect_subterms(t.inv_arg(), seen, out);
      break;
    default:
      break;
  }
}

}  // namespace

std::vector<Term> atoms_of(const Term& t) {
  std::set<Term> seen;
  std::vector<Term> out;
  collect_atoms(t, seen, out);
  return out;
}

std::vector<Term> subterms(const Term& t) {
  std::set<Term> seen;
  std::vector<Term> out;
  collect_subterms(t, seen, out);
  return out;
}

VariableSet::VariableSet(std::initializer_list<Variable> vars) {
  for (const Variable& v : vars) declare(v);
}

void VariableSet::declare(const Variable& v) {
  if (contains_name(v.name))
    throw std::invalid_argument("variable " + v.name + " declared twice");
  vars_.push_back(v);
}

bool VariableSet::contains_name(std::string_view name) const {
  return find(name).has_value();
}

bool VariableSet::contains(const Variable& v) const {
  auto found = find(v.name);
  return found && found->sort == v.sort;
}

std::optional<Variable> VariableSet::find(std::string_view name) const {
  for (const Variable& v : vars_)
    if (v.name == name) return v;
  return std::nullopt;
}

}  // namespace sas
