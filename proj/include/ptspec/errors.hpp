#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptspec {

// Base of every error thrown by the library. Subclasses fall into two
// families: operational failures (bad input, non-convergence, I/O) and
// hypothesis violations (the mathematics refused). The CLI maps the former
// to exit code 1 and the latter to exit code 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OperationalError : Error {
  using Error::Error;
};

struct HypothesisError : Error {
  using Error::Error;
};

struct LexError : OperationalError {
  std::size_t position;
  char character;
  LexError(std::size_t pos, char c)
      : OperationalError("lex error at position " + std::to_string(pos) +
                         ": unexpected character '" + std::string(1, c) + "'"),
        position(pos), character(c) {}
};

struct ParseError : OperationalError {
  std::size_t position;
  std::string expected;
  ParseError(std::size_t pos, std::string what_expected)
      : OperationalError("parse error at position " + std::to_string(pos) +
                         ": expected " + what_expected),
        position(pos), expected(std::move(what_expected)) {}
};

struct EvalError : OperationalError {
  EvalError(const std::string& reason)
      : OperationalError("evaluation error: " + reason) {}
};

struct ConvergenceError : OperationalError {
  using OperationalError::OperationalError;
};

struct SingularError : OperationalError {
  double pivot_magnitude;
  explicit SingularError(double pivot)
      : OperationalError("singular system: pivot magnitude " +
                         std::to_string(pivot)),
        pivot_magnitude(pivot) {}
};

struct MultiplicityError : HypothesisError {
  int count;
  explicit MultiplicityError(int n)
      : HypothesisError("eigenvalue cluster has size " + std::to_string(n) +
                        ", expected 1 or 2"),
        count(n) {}
};

struct DegenerateFormError : HypothesisError {
  double det_magnitude;
  explicit DegenerateFormError(double d)
      : HypothesisError("restriction of J to the eigenspace is degenerate, "
                        "|det G| = " + std::to_string(d)),
        det_magnitude(d) {}
};

struct SymmetryViolation : HypothesisError {
  double residual;
  explicit SymmetryViolation(double r)
      : HypothesisError("symmetry constraint violated, residual " +
                        std::to_string(r)),
        residual(r) {}
};

struct DivergenceError : OperationalError {
  double contraction;
  explicit DivergenceError(double k)
      : OperationalError("series contraction factor K = " + std::to_string(k) +
                         " >= 1; expansion diverges"),
        contraction(k) {}
};

struct NewtonDivergence : OperationalError {
  std::complex<double> seed;
  explicit NewtonDivergence(std::complex<double> z0, const std::string& extra = "")
      : OperationalError("Newton iteration from seed (" + std::to_string(z0.real()) +
                         ", " + std::to_string(z0.imag()) + ") did not converge" +
                         (extra.empty() ? "" : "; " + extra)),
        seed(z0) {}
};

struct SimplicityError : HypothesisError {
  using HypothesisError::HypothesisError;
};

struct RealityViolation : HypothesisError {
  double level;
  std::complex<double> found;
  RealityViolation(double lambda, std::complex<double> z, const std::string& why)
      : HypothesisError("reality check failed near level " + std::to_string(lambda) +
                        ": " + why),
        level(lambda), found(z) {}
};

struct BracketError : HypothesisError {
  using HypothesisError::HypothesisError;
};

struct AssemblyError : OperationalError {
  using OperationalError::OperationalError;
};

struct ConfigError : OperationalError {
  int line;
  ConfigError(int line_number, const std::string& message)
      : OperationalError("config line " + std::to_string(line_number) + ": " + message),
        line(line_number) {}
};

struct FormatError : OperationalError {
  int line;
  FormatError(int line_number, const std::string& message)
      : OperationalError("matrix file line " + std::to_string(line_number) + ": " + message),
        line(line_number) {}
};

}  // namespace ptspec
