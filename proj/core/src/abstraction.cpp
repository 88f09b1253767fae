#include "nmrl/abstraction.hpp"

namespace nmrl {

std::optional<AbstractState> PartialAbstraction::next(AbstractState /*from*/, HistoryView history,
                                                      const StepSymbol& symbol) const {
  History extended(history.begin(), history.end());
  extended.push_back(symbol);
  return lookup(extended);
}

std::optional<AbstractState> FunctionAbstraction::lookup(HistoryView history) const {
  return AbstractState{static_cast<std::uint32_t>(abstraction_.map(history)), NodeKind::Safe};
}

AbstractedHistory apply_abstraction_star(const PartialAbstraction& abstraction, HistoryView history) {
  AbstractedHistory out;
  out.initial = abstraction.lookup(HistoryView{});
  if (!out.initial) {
    out.undefined_at = 0;
    return out;
  }
  out.steps.reserve(history.size());
  AbstractState current = *out.initial;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto next = abstraction.next(current, history.first(i), history[i]);
    if (!next) {
      out.undefined_at = i;
      return out;
    }
    out.steps.push_back(AbstractStep{history[i].action, *next, history[i].reward});
    current = *next;
  }
  return out;
}

HistoryPolicy epsilon_optimal_lift(MarkovPolicy policy, const PartialAbstraction& abstraction) {
  return [policy = std::move(policy), &abstraction](HistoryView h) -> std::optional<ActionId> {
    const auto state = abstraction.lookup(h);
    if (!state) return std::nullopt;
    return policy(*state);
  };
}

}  // namespace nmrl
