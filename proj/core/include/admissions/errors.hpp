#pragma once

#include <stdexcept>
#include <string>

namespace admissions {

/// Malformed or inconsistent input data (files, schemas, observations).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numeric failure: degeneracy, knife-edge derivative, infeasible target,
/// or an internal consistency check that did not hold.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// The preferability recursion hit a nonpositive weight or vanishing
/// denominator. Carries the index of the offending school.
class DegeneracyError : public NumericError {
 public:
  DegeneracyError(const std::string& what, std::size_t school)
      : NumericError(what), school_(school) {}
  std::size_t school() const { return school_; }

 private:
  std::size_t school_;
};

/// An equilibrium derivative was requested at a point where it is undefined
/// (a school's unclipped cutoff sits at zero).
class KnifeEdgeError : public NumericError {
 public:
  KnifeEdgeError(const std::string& what, std::size_t school)
      : NumericError(what), school_(school) {}
  std::size_t school() const { return school_; }

 private:
  std::size_t school_;
};

/// A target demand exceeds what the school can reach even at cutoff zero.
/// Carries the achievable bound.
class InfeasibleTargetError : public NumericError {
 public:
  InfeasibleTargetError(const std::string& what, double max_demand)
      : NumericError(what), max_demand_(max_demand) {}
  double max_demand() const { return max_demand_; }

 private:
  double max_demand_;
};

}  // namespace admissions
