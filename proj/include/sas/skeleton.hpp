// Strand spaces: protocols, roles, instances, skeletons, origination
// bookkeeping, and well-formedness checking.

#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sas/algebra.hpp"

namespace sas {

enum class Direction { Send, Recv };

struct Event {
  Direction dir;
  Term msg;
  friend bool operator==(const Event&, const Event&) = default;
};

/// A non-empty sequence of messaging events.
using Trace = std::vector<Event>;

Event apply(const Substitution& s, const Event& e);

/// A parametric trace of a protocol.  Every variable occurring in the trace
/// must be declared, messages are canonical, and sorts are message sorts.
class Role {
 public:
  static Role make(std::string name, VariableSet vars, Trace trace);

  const std::string& name() const { return name_; }
  const VariableSet& vars() const { return vars_; }
  const Trace& trace() const { return trace_; }

  /// Variables occurring in the length-h prefix, in declaration order.
  std::vector<Variable> prefix_variables(std::size_t h) const;

  friend bool operator==(const Role&, const Role&) = default;

 private:
  std::string name_;
  VariableSet vars_;
  Trace trace_;
};

class Protocol {
 public:
  static Protocol make(std::string name, std::vector<Role> roles);

  const std::string& name() const { return name_; }
  const std::vector<Role>& roles() const { return roles_; }
  const Role* find_role(std::string_view name) const;
  std::optional<std::size_t> role_index(std::string_view name) const;

  friend bool operator==(const Protocol&, const Protocol&) = default;

 private:
  std::string name_;
  std::vector<Role> roles_;
};

using ProtocolPtr = std::shared_ptr<const Protocol>;

/// A role prefix of a given height together with the substitution that
/// instantiates it.  dom(subst) is restricted to variables occurring in the
/// prefix; the substitution maps role variables to skeleton terms.
struct Instance {
  std::size_t role_index = 0;
  std::size_t height = 0;
  Substitution subst;

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct Node {
  std::size_t strand = 0;
  std::size_t index = 0;

  friend bool operator==(const Node&, const Node&) = default;
  friend auto operator<=>(const Node&, const Node&) = default;
};

/// The trace of an instance: the role prefix with the substitution applied
/// and all messages canonicalized.  Throws on out-of-range height.
Trace instance_trace(const Protocol& protocol, const Instance& inst);

struct WellformednessError : std::runtime_error {
  explicit WellformednessError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A skeleton: instances over a protocol, stored inter-strand ordering
/// edges, and the non-origination / unique-origination assumptions.
///
/// Construction validates structure (indices, heights, declared variables,
/// sort preservation).  Semantic conditions — acyclic ordering, origination
/// of the assumption sets — are data, reported by check_wellformed.
class Skeleton {
 public:
  static Skeleton make(ProtocolPtr protocol, VariableSet vars,
                       std::vector<Instance> instances,
                       std::set<std::pair<Node, Node>> orderings,
                       std::vector<Term> non_orig, std::vector<Term> uniq_orig);

  const ProtocolPtr& protocol() const { return protocol_; }
  const VariableSet& vars() const { return vars_; }
  const std::vector<Instance>& instances() const { return instances_; }
  const std::set<std::pair<Node, Node>>& orderings() const {
    return orderings_;
  }
  const std::vector<Term>& non_orig() const { return non_orig_; }
  const std::vector<Term>& uniq_orig() const { return uniq_orig_; }

  std::size_t strand_count() const { return instances_.size(); }
  const Trace& trace(std::size_t strand) const { return traces_.at(strand); }
  const Role& role(std::size_t strand) const;
  bool valid_node(Node n) const;
  const Event& event(Node n) const;
  std::vector<Node> nodes() const;

  friend bool operator==(const Skeleton&, const Skeleton&);

 private:
  ProtocolPtr protocol_;
  VariableSet vars_;
  std::vector<Instance> instances_;
  std::set<std::pair<Node, Node>> orderings_;
  std::vector<Term> non_orig_;
  std::vector<Term> uniq_orig_;
  std::vector<Trace> traces_;
};

using SkeletonPtr = std::shared_ptr<const Skeleton>;

/// Index of the first event of tr that carries t, provided that event is a
/// transmission; empty otherwise.
std::optional<std::size_t> originates_in(const Term& t, const Trace& tr);

/// All nodes of k at which t originates.
std::vector<Node> origination_nodes(const Skeleton& k, const Term& t);

/// Transitive closure of the stored orderings plus intra-strand succession.
class NodeOrder {
 public:
  bool precedes(Node a, Node b) const { return pairs_.count({a, b}) > 0; }
  const std::set<std::pair<Node, Node>>& pairs() const { return pairs_; }

 private:
  friend NodeOrder effective_order(const Skeleton&);
  friend std::optional<NodeOrder> effective_order_nothrow(const Skeleton&);
  std::set<std::pair<Node, Node>> pairs_;
};

/// Throws WellformednessError when the relation has a cycle.
NodeOrder effective_order(const Skeleton& k);
std::optional<NodeOrder> effective_order_nothrow(const Skeleton& k);

struct Violation {
  std::string clause;
  std::string detail;
};

struct WfReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Verifies every semantic skeleton invariant; an empty report means the
/// skeleton is well formed.
WfReport check_wellformed(const Skeleton& k);

/// All substitutions s with apply(s, prefix of r to |tr|) equal to tr,
/// direction for direction and message for message.  Empty when tr is not
/// an elaboration of r.
std::vector<Substitution> elaboration_check(const Trace& tr, const Role& r);

std::string node_to_string(Node n);

}  // namespace sas
