#pragma once

#include <stdexcept>
#include <string>

namespace spectra {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input lies outside the region where an operation is defined (wrong gap,
/// indefinite Gram, broken hypothesis).  The CLI maps this family to exit 3.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Internal breakdown that signals a defect rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  explicit NotHermitian(double defect)
      : Error("matrix is not Hermitian (relative defect " + std::to_string(defect) + ")"),
        defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

class SingularFactor : public DomainError {
 public:
  SingularFactor() : DomainError("factorization has a zero pivot block") {}
};

class NotPositiveDefinite : public DomainError {
 public:
  explicit NotPositiveDefinite(long index)
      : DomainError("matrix is not positive definite (pivot " + std::to_string(index) + ")"),
        index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

class NoConvergence : public InternalError {
 public:
  using InternalError::InternalError;
};

class InsideT22Spectrum : public DomainError {
 public:
  InsideT22Spectrum(double lambda, double nearest)
      : DomainError("lambda = " + std::to_string(lambda) +
                    " is inside the guard band of the lower-right block eigenvalue " +
                    std::to_string(nearest)),
        lambda_(lambda),
        nearest_(nearest) {}
  double lambda() const noexcept { return lambda_; }
  double nearest() const noexcept { return nearest_; }

 private:
  double lambda_;
  double nearest_;
};

class IllConditioned : public DomainError {
 public:
  IllConditioned(double lambda, double ratio)
      : DomainError("lower-right block is ill-conditioned at lambda = " + std::to_string(lambda) +
                    " (pivot ratio " + std::to_string(ratio) + ")"),
        lambda_(lambda) {}
  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
};

class GapMismatch : public DomainError {
 public:
  GapMismatch(double lo, double hi)
      : DomainError("endpoints " + std::to_string(lo) + " and " + std::to_string(hi) +
                    " do not lie in one spectral gap") {}
};

class NegativityViolated : public DomainError {
 public:
  explicit NegativityViolated(double lambda)
      : DomainError("lower-right block is not uniformly negative at lambda = " +
                    std::to_string(lambda)),
        lambda_(lambda) {}
  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
};

class TypeViolation : public DomainError {
 public:
  TypeViolation(double lambda, const std::string& why)
      : DomainError("negative-type hypothesis fails near lambda = " + std::to_string(lambda) +
                    ": " + why),
        lambda_(lambda) {}
  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
};

class IncompatibleForm : public DomainError {
 public:
  using DomainError::DomainError;
};

class StepTooCoarse : public Error {
 public:
  using Error::Error;
};

}  // namespace spectra
