#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace poincarezeta {

using Complex = std::complex<double>;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Error categories, mapped to CLI exit codes: validation -> 2, numeric -> 3.
enum class ErrorClass { Validation, Numeric };

class Error : public std::runtime_error {
 public:
  Error(std::string kind, ErrorClass cls, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)), class_(cls) {}

  const std::string& kind() const noexcept { return kind_; }
  ErrorClass error_class() const noexcept { return class_; }

 private:
  std::string kind_;
  ErrorClass class_;
};

#define POINCAREZETA_DEFINE_ERROR(Name, Cls)                        \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what)                          \
        : Error(#Name, ErrorClass::Cls, what) {}                    \
  };

POINCAREZETA_DEFINE_ERROR(InvalidArgument, Validation)
POINCAREZETA_DEFINE_ERROR(DimensionError, Validation)
POINCAREZETA_DEFINE_ERROR(ResolutionError, Validation)
POINCAREZETA_DEFINE_ERROR(StepOverflow, Numeric)
POINCAREZETA_DEFINE_ERROR(EmptySample, Numeric)
POINCAREZETA_DEFINE_ERROR(NoCrossing, Numeric)
POINCAREZETA_DEFINE_ERROR(EmptyAtlas, Numeric)
POINCAREZETA_DEFINE_ERROR(CausticError, Numeric)
POINCAREZETA_DEFINE_ERROR(SingularBorder, Numeric)
POINCAREZETA_DEFINE_ERROR(ContourTooClose, Numeric)
POINCAREZETA_DEFINE_ERROR(DivergentExpansion, Numeric)
POINCAREZETA_DEFINE_ERROR(BoundaryZero, Numeric)
POINCAREZETA_DEFINE_ERROR(NoStableEigenvalues, Numeric)

#undef POINCAREZETA_DEFINE_ERROR

/// A point (x, xi) of T*R^n.
struct PhasePoint {
  Vec x;
  Vec xi;

  PhasePoint() = default;
  PhasePoint(Vec x_, Vec xi_) : x(std::move(x_)), xi(std::move(xi_)) {
    if (x.size() != xi.size()) {
      throw DimensionError("PhasePoint: position and momentum dimensions differ");
    }
    if (!x.allFinite() || !xi.allFinite()) {
      throw InvalidArgument("PhasePoint: non-finite coordinate");
    }
  }

  Eigen::Index dim() const { return x.size(); }

  /// Stacked (x, xi) in R^{2n}.
  Vec stacked() const {
    Vec s(2 * x.size());
    s << x, xi;
    return s;
  }

  static PhasePoint from_stacked(const Vec& s) {
    const auto n = s.size() / 2;
    return PhasePoint(s.head(n), s.tail(n));
  }
};

/// Standard symplectic matrix [[0, I], [-I, 0]] on R^{2d}.
inline Mat symplectic_form(Eigen::Index d) {
  Mat omega = Mat::Zero(2 * d, 2 * d);
  omega.topRightCorner(d, d).setIdentity();
  omega.bottomLeftCorner(d, d) = -Mat::Identity(d, d);
  return omega;
}

/// max-norm of J^T Omega J - Omega.
inline double symplectic_defect(const Mat& jac) {
  const Mat omega = symplectic_form(jac.rows() / 2);
  return (jac.transpose() * omega * jac - omega).cwiseAbs().maxCoeff();
}

}  // namespace poincarezeta
