#include "sas/skeleton.hpp"

#include <algorithm>
#include <sstream>

namespace sas {

Event apply(const Substitution& s, const Event& e) {
  return Event{e.dir, apply(s, e.msg)};
}

namespace {

void collect_term_vars(const Term& t, std::vector<Variable>& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      out.push_back(t.var());
      break;
    case Term::Kind::Pair:
      collect_term_vars(t.left(), out);
      collect_term_vars(t.right(), out);
      break;
    case Term::Kind::Enc:
      collect_term_vars(t.body(), out);
      collect_term_vars(t.key(), out);
      break;
    case Term::Kind::Invk:
      collect_term_vars(t.inv_arg(), out);
      break;
    default:
      break;
  }
}

}  // namespace

Role Role::make(std::string name, VariableSet vars, Trace trace) {
  if (trace.empty())
    throw std::invalid_argument("role " + name + " has an empty trace");
  Role r;
  r.name_ = std::move(name);
  r.vars_ = std::move(vars);
  r.trace_ = std::move(trace);
  for (Event& e : r.trace_) {
    e.msg = canonicalize(e.msg);
    if (!is_message_sort(sort_of(e.msg)))
      throw SortError("role " + r.name_ + ": event message is not message sorted");
    std::vector<Variable> vs;
    collect_term_vars(e.msg, vs);
    for (const Variable& v : vs)
      if (!r.vars_.contains(v))
        throw std::invalid_argument("role " + r.name_ + ": variable " + v.name +
                                    " is not declared");
  }
  return r;
}

std::vector<Variable> Role::prefix_variables(std::size_t h) const {
  if (h > trace_.size())
    throw std::invalid_argument("role " + name_ + ": height out of range");
  std::vector<Variable> occurring;
  for (std::size_t i = 0; i < h; ++i) collect_term_vars(trace_[i].msg, occurring);
  std::vector<Variable> out;
  for (const Variable& v : vars_.variables())
    if (std::find(occurring.begin(), occurring.end(), v) != occurring.end())
      out.push_back(v);
  return out;
}

Protocol Protocol::make(std::string name, std::vector<Role> roles) {
  Protocol p;
  p.name_ = std::move(name);
  p.roles_ = std::move(roles);
  for (std::size_t i = 0; i < p.roles_.size(); ++i)
    for (std::size_t j = i + 1; j < p.roles_.size(); ++j)
      if (p.roles_[i].name() == p.roles_[j].name())
        throw std::invalid_argument("protocol " + p.name_ + ": duplicate role " +
                                    p.roles_[i].name());
  return p;
}

const Role* Protocol::find_role(std::string_view name) const {
  for (const Role& r : roles_)
    if (r.name() == name) return &r;
  return nullptr;
}

std::optional<std::size_t> Protocol::role_index(std::string_view name) const {
  for (std::size_t i = 0; i < roles_.size(); ++i)
    if (roles_[i].name() == name) return i;
  return std::nullopt;
}

Trace instance_trace(const Protocol& protocol, const Instance& inst) {
  if (inst.role_index >= protocol.roles().size())
    throw std::invalid_argument("instance role index out of range");
  const Role& r = protocol.roles()[inst.role_index];
  if (inst.height < 1 || inst.height > r.trace().size())
    throw std::invalid_argument("instance height out of range for role " +
                                r.name());
  Trace out;
  out.reserve(inst.height);
  for (std::size_t i = 0; i < inst.height; ++i)
    out.push_back(apply(inst.subst, r.trace()[i]));
  return out;
}

Skeleton Skeleton::make(ProtocolPtr protocol, VariableSet vars,
                        std::vector<Instance> instances,
                        std::set<std::pair<Node, Node>> orderings,
                        std::vector<Term> non_orig,
                        std::vector<Term> uniq_orig) {
  if (!protocol) throw std::invalid_argument("skeleton without a protocol");
  if (instances.empty())
    throw std::invalid_argument("skeleton must have at least one strand");
  for (const Variable& v : vars.variables())
    if (!is_message_sort(v.sort))
      throw SortError("skeleton variable " + v.name + " is not message sorted");

  Skeleton k;
  k.protocol_ = std::move(protocol);
  k.vars_ = std::move(vars);
  k.instances_ = std::move(instances);
  k.orderings_ = std::move(orderings);

  auto check_skeleton_term = [&k](const Term& t, const char* what) {
    std::vector<Variable> vs;
    collect_term_vars(t, vs);
    for (const Variable& v : vs)
      if (!k.vars_.contains(v))
        throw std::invalid_argument(std::string(what) + ": variable " + v.name +
                                    " is not declared in the skeleton");
  };

  for (const Instance& inst : k.instances_) {
    if (inst.role_index >= k.protocol_->roles().size())
      throw std::invalid_argument("instance role index out of range");
    const Role& r = k.protocol_->roles()[inst.role_index];
    if (inst.height < 1 || inst.height > r.trace().size())
      throw std::invalid_argument("instance height out of range for role " +
                                  r.name());
    std::vector<Variable> prefix_vars = r.prefix_variables(inst.height);
    for (const auto& [x, t] : inst.subst) {
      if (std::find(prefix_vars.begin(), prefix_vars.end(), x) ==
          prefix_vars.end())
        throw std::invalid_argument("instance of " + r.name() + " binds " +
                                    x.name +
                                    ", which does not occur in the prefix");
      check_skeleton_term(t, "instance substitution");
    }
    k.traces_.push_back(instance_trace(*k.protocol_, inst));
  }

  for (const auto& [a, b] : k.orderings_) {
    if (!k.valid_node(a) || !k.valid_node(b))
      throw std::invalid_argument("ordering edge references a missing node");
    if (a.strand == b.strand)
      throw std::invalid_argument(
          "ordering edge " + node_to_string(a) + " " + node_to_string(b) +
          " is intra-strand; strand succession is implicit");
  }

  auto add_atom_set = [&](std::vector<Term> in, std::vector<Term>& out,
                          const char* what) {
    for (Term& t : in) {
      t = canonicalize(t);
      check_skeleton_term(t, what);
      if (std::find(out.begin(), out.end(), t) == out.end())
        out.push_back(t);
    }
  };
  add_atom_set(std::move(non_orig), k.non_orig_, "non-orig");
  add_atom_set(std::move(uniq_orig), k.uniq_orig_, "uniq-orig");
  return k;
}

const Role& Skeleton::role(std::size_t strand) const {
  return protocol_->roles()[instances_.at(strand).role_index];
}

bool Skeleton::valid_node(Node n) const {
  return n.strand < traces_.size() && n.index < traces_[n.strand].size();
}

const Event& Skeleton::event(Node n) const {
  if (!valid_node(n))
    throw std::invalid_argument("node " + node_to_string(n) + " out of range");
  return traces_[n.strand][n.index];
}

std::vector<Node> Skeleton::nodes() const {
  std::vector<Node> out;
  for (std::size_t s = 0; s < traces_.size(); ++s)
    for (std::size_t i = 0; i < traces_[s].size(); ++i) out.push_back({s, i});
  return out;
}

bool operator==(const Skeleton& a, const Skeleton& b) {
  return *a.protocol_ == *b.protocol_ && a.vars_ == b.vars_ &&
         a.instances_ == b.instances_ && a.orderings_ == b.orderings_ &&
         a.non_orig_ == b.non_orig_ && a.uniq_orig_ == b.uniq_orig_;
}

std::optional<std::size_t> originates_in(const Term& t, const Trace& tr) {
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (carried_by(t, tr[i].msg))
      return tr[i].dir == Direction::Send ? std::optional(i) : std::nullopt;
  }
  return std::nullopt;
}

std::vector<Node> origination_nodes(const Skeleton& k, const Term& t) {
  std::vector<Node> out;
  for (std::size_t s = 0; s < k.strand_count(); ++s)
    if (auto i = originates_in(t, k.trace(s))) out.push_back({s, *i});
  return out;
}

namespace {

// Closure computation shared by the throwing and non-throwing entry points.
// Returns nullopt when the relation is cyclic.
std::optional<NodeOrder> compute_order(const Skeleton& k) {
  std::vector<Node> nodes = k.nodes();
  std::size_t n = nodes.size();
  auto id = [&](Node v) {
    return std::find(nodes.begin(), nodes.end(), v) - nodes.begin();
  };
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : k.orderings()) reach[id(a)][id(b)] = true;
  for (std::size_t s = 0; s < k.strand_count(); ++s)
    for (std::size_t i = 0; i + 1 < k.trace(s).size(); ++i)
      reach[id({s, i})][id({s, i + 1})] = true;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][m])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[m][j]) reach[i][j] = true;
  for (std::size_t i = 0; i < n; ++i)
    if (reach[i][i]) return std::nullopt;
  NodeOrder order;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (reach[i][j]) order.pairs_.insert({nodes[i], nodes[j]});
  return order;
}

}  // namespace

NodeOrder effective_order(const Skeleton& k) {
  auto order = compute_order(k);
  if (!order)
    throw WellformednessError("node ordering has a cycle");
  return *order;
}

std::optional<NodeOrder> effective_order_nothrow(const Skeleton& k) {
  return compute_order(k);
}

std::string WfReport::to_string() const {
  if (ok()) return "well-formed";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].clause << ": " << violations[i].detail;
  }
  return os.str();
}

namespace {

std::string term_brief(const Term& t);

std::string term_brief(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: return t.var().name;
    case Term::Kind::Nat: return std::to_string(t.nat_value());
    case Term::Kind::Pair:
      return "(cat " + term_brief(t.left()) + " " + term_brief(t.right()) + ")";
    case Term::Kind::Enc:
      return "(enc " + term_brief(t.body()) + " " + term_brief(t.key()) + ")";
    case Term::Kind::Invk:
      return "(invk " + term_brief(t.inv_arg()) + ")";
  }
  return "?";
}

}  // namespace

WfReport check_wellformed(const Skeleton& k) {
  WfReport report;

  auto atomic = [](const Term& t) { return is_atomic_sort(sort_of(t)); };
  for (const Term& t : k.non_orig())
    if (!atomic(t))
      report.violations.push_back(
          {"atoms-only", "non-orig term " + term_brief(t) + " is not an atom"});
  for (const Term& t : k.uniq_orig())
    if (!atomic(t))
      report.violations.push_back(
          {"atoms-only", "uniq-orig term " + term_brief(t) + " is not an atom"});

  auto order = effective_order_nothrow(k);
  if (!order)
    report.violations.push_back(
        {"acyclic", "node ordering relation has a cycle"});

  for (const Term& t : k.non_orig()) {
    for (Node n : origination_nodes(k, t))
      report.violations.push_back(
          {"non-origination", "non-orig term " + term_brief(t) +
                                  " originates at " + node_to_string(n)});
  }

  for (const Term& t : k.uniq_orig()) {
    std::vector<Node> origins = origination_nodes(k, t);
    if (origins.size() > 1)
      report.violations.push_back(
          {"unique-origination",
           "uniq-orig term " + term_brief(t) + " originates at " +
               node_to_string(origins[0]) + " and " +
               node_to_string(origins[1])});
    if (origins.size() == 1 && order) {
      Node n0 = origins[0];
      for (Node n : k.nodes()) {
        if (n == n0 || !carried_by(t, k.event(n).msg)) continue;
        if (!order->precedes(n0, n))
          report.violations.push_back(
              {"freshness-order",
               "uniq-orig term " + term_brief(t) + " is carried at " +
                   node_to_string(n) + " which is not after its origination " +
                   node_to_string(n0)});
      }
    }
  }
  return report;
}

std::vector<Substitution> elaboration_check(const Trace& tr, const Role& r) {
  if (tr.empty() || tr.size() > r.trace().size()) return {};
  Substitution s;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (tr[i].dir != r.trace()[i].dir) return {};
    auto results = match(r.trace()[i].msg, tr[i].msg, s);
    if (results.empty()) return {};
    s = std::move(results.front());
  }
  return {std::move(s)};
}

std::string node_to_string(Node n) {
  return "(" + std::to_string(n.strand) + " " + std::to_string(n.index) + ")";
}

}  // namespace sas
