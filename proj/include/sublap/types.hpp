#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sublap {

/// Largest chart dimension supported. Vectors and matrices are stack
/// allocated up to this size so the integrators never touch the heap.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

enum class ErrorKind {
  Evaluation,
  DegenerateFrame,
  InvalidVolume,
  Integration,
  NotContact,
  StepTwoViolation,
  SkewViolation,
  QuasiReebUndefined,
  InvalidSpec,
  Input,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Evaluation: return "evaluation error";
    case ErrorKind::DegenerateFrame: return "degenerate frame";
    case ErrorKind::InvalidVolume: return "invalid volume";
    case ErrorKind::Integration: return "integration error";
    case ErrorKind::NotContact: return "not contact";
    case ErrorKind::StepTwoViolation: return "step-2 violation";
    case ErrorKind::SkewViolation: return "skew-symmetry violation";
    case ErrorKind::QuasiReebUndefined: return "quasi-Reeb undefined";
    case ErrorKind::InvalidSpec: return "invalid spec";
    case ErrorKind::Input: return "input error";
  }
  return "error";
}

std::string format_point(const Vec& q);

inline Vec make_vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace sublap
