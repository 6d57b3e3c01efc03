#pragma once

#include <stdexcept>
#include <string>

namespace nehari {

// Exit-code family each error maps to at the CLI boundary.
enum class ErrorKind {
  kValidation,      // exit 2
  kNonConvergence,  // exit 3
  kHypothesis,      // exit 4
  kNumerical,       // exit 3
  kIo,              // exit 1
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct OverflowError : Error {
  explicit OverflowError(const std::string& w) : Error(ErrorKind::kNumerical, w) {}
};

struct InvalidExponentsError : Error {
  explicit InvalidExponentsError(const std::string& w) : Error(ErrorKind::kValidation, w) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorKind::kValidation, w) {}
};

struct ParseError : Error {
  ParseError(const std::string& w, int line)
      : Error(ErrorKind::kValidation, "line " + std::to_string(line) + ": " + w), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::kIo, w) {}
};

struct EvaluationError : Error {
  explicit EvaluationError(const std::string& w) : Error(ErrorKind::kNumerical, w) {}
};

/// Raised by the hypothesis verifier; `hypothesis()` names the violated one ("E1", "H", ...).
struct HypothesisViolation : Error {
  HypothesisViolation(std::string hypothesis, const std::string& w)
      : Error(ErrorKind::kHypothesis, "hypothesis (" + hypothesis + ") violated: " + w),
        hypothesis_(std::move(hypothesis)) {}
  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

struct NonConvergenceError : Error {
  explicit NonConvergenceError(const std::string& w) : Error(ErrorKind::kNonConvergence, w) {}
};

// Fiber along the requested ray has no critical point (case III).
struct NoProjectionError : Error {
  explicit NoProjectionError(const std::string& w) : Error(ErrorKind::kNumerical, w) {}
};

// Fiber along the requested ray is degenerate (case II).
struct DegenerateDirectionError : Error {
  explicit DegenerateDirectionError(const std::string& w) : Error(ErrorKind::kNumerical, w) {}
};

struct EmptyBranchError : Error {
  explicit EmptyBranchError(const std::string& w) : Error(ErrorKind::kNonConvergence, w) {}
};

struct VerificationFailure : Error {
  VerificationFailure(std::string check, const std::string& w)
      : Error(ErrorKind::kNonConvergence, "verification '" + check + "' failed: " + w),
        check_(std::move(check)) {}
  const std::string& check() const noexcept { return check_; }

 private:
  std::string check_;
};

struct ContinuationFailure : Error {
  explicit ContinuationFailure(const std::string& w) : Error(ErrorKind::kNonConvergence, w) {}
};

struct DependencyError : Error {
  explicit DependencyError(const std::string& w) : Error(ErrorKind::kValidation, w) {}
};

}  // namespace nehari
