#include "napa/constraints.hpp"

namespace napa {

std::optional<Quantity> interpret_term(const Framework& fw, const Term& t,
                                       const QuantityMap& q) {
  switch (t.kind) {
    case Term::Kind::literal:
      return t.value;
    case Term::Kind::arg_ref:
      return quantity_of(q, t.ref);
    case Term::Kind::triple_ref: {
      const auto& amount = fw.amount(t.ref);
      if (!amount) return std::nullopt;
      // Amounts are literals or argument references; one indirection exactly.
      switch (amount->kind) {
        case Term::Kind::literal:
          return amount->value;
        case Term::Kind::arg_ref:
          return quantity_of(q, amount->ref);
        case Term::Kind::triple_ref:
          return std::nullopt;   // unreachable for validated frameworks
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<GroundConstraint> interpret_constraint(const Framework& fw, const Constraint& c,
                                                     const QuantityMap& q) {
  GroundConstraint out;
  out.reserve(c.size());
  for (const auto& cmp : c) {
    auto l = interpret_term(fw, cmp.lhs, q);
    auto r = interpret_term(fw, cmp.rhs, q);
    if (!l || !r) return std::nullopt;
    out.push_back({*l, cmp.op, *r});
  }
  return out;
}

bool sat(const GroundConstraint& g) {
  for (const auto& cmp : g) {
    switch (cmp.op) {
      case CmpOp::less:
        if (!(cmp.lhs < cmp.rhs)) return false;
        break;
      case CmpOp::equal:
        if (cmp.lhs != cmp.rhs) return false;
        break;
    }
  }
  return true;
}

bool sat(const Framework& fw, const Constraint& c, const QuantityMap& q) {
  auto ground = interpret_constraint(fw, c, q);
  return ground && sat(*ground);
}

}  // namespace napa
