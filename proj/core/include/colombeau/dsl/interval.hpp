#pragma once

#include <optional>
#include <span>

#include "colombeau/box.hpp"
#include "colombeau/dsl/expr.hpp"
#include "colombeau/function_net.hpp"

namespace colombeau::dsl {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Enclosure of e over the box `vars` for fixed eps. Returns the whole line
/// when no finite enclosure is known.
Interval eval_interval(const Expr& e, std::span<const Interval> vars, double eps);

}  // namespace colombeau::dsl

namespace colombeau {

/// Upper bound of sup_K |f_eps| (max over components) by interval arithmetic
/// on a subdivision of K. Only for nets written in the expression language;
/// nullopt otherwise or when some piece has no finite enclosure.
std::optional<double> interval_sup_bound(const FunctionNet& f, const Box& K, double eps);

}  // namespace colombeau
