#pragma once

#include <stdexcept>
#include <string>

namespace nmrl {

/// Two histories mapped to the same abstract state disagree on a dynamics row.
class NotMarkovError : public std::runtime_error {
 public:
  explicit NotMarkovError(const std::string& what) : std::runtime_error(what) {}
};

/// An exhaustive enumeration would exceed its configured table budget.
class BudgetExceededError : public std::runtime_error {
 public:
  explicit BudgetExceededError(const std::string& what) : std::runtime_error(what) {}
};

class UndefinedTransitionError : public std::runtime_error {
 public:
  explicit UndefinedTransitionError(const std::string& what) : std::runtime_error(what) {}
};

class ZeroProbabilityHistoryError : public std::runtime_error {
 public:
  explicit ZeroProbabilityHistoryError(const std::string& what) : std::runtime_error(what) {}
};

class SteppedAfterDoneError : public std::logic_error {
 public:
  explicit SteppedAfterDoneError(const std::string& what) : std::logic_error(what) {}
};

/// A promotion would exceed the learner's bound on safe states.
class StateBudgetExhaustedError : public std::runtime_error {
 public:
  explicit StateBudgetExhaustedError(const std::string& what) : std::runtime_error(what) {}
};

class UnknownStateError : public std::out_of_range {
 public:
  explicit UnknownStateError(const std::string& what) : std::out_of_range(what) {}
};

class NonConvergenceError : public std::runtime_error {
 public:
  explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nmrl
