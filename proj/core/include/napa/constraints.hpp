#pragma once

#include <optional>

#include "napa/framework.hpp"

namespace napa {

struct GroundComparison {
  Quantity lhs = 0;
  CmpOp op = CmpOp::less;
  Quantity rhs = 0;
  friend bool operator==(const GroundComparison&, const GroundComparison&) = default;
};

/// A constraint with every term already a number.
using GroundConstraint = std::vector<GroundComparison>;

/// Evaluates one term against a quantity map. A reference to an argument with
/// no quantity, or to a persuasion without a defined amount, is undefined.
/// Amount references resolve through exactly one indirection: the amount of a
/// conversion is a literal or the quantity of a named argument.
std::optional<Quantity> interpret_term(const Framework& fw, const Term& t,
                                       const QuantityMap& q);

/// Replaces every term; undefined iff any single term is undefined.
std::optional<GroundConstraint> interpret_constraint(const Framework& fw,
                                                     const Constraint& c,
                                                     const QuantityMap& q);

bool sat(const GroundConstraint& g);

/// True iff interpretation is defined and every comparison holds. An undefined
/// interpretation yields false (fail-closed), disabling the guarded relation.
bool sat(const Framework& fw, const Constraint& c, const QuantityMap& q);

}  // namespace napa
