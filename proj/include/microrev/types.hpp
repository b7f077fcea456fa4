#pragma once

// Domain types shared by every engine. Units: hbar*omega0 = 1, so inverse
// temperatures are the dimensionless product beta*hbar*omega0.

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace microrev {

using Complex = std::complex<double>;

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A Fock-space truncation would silently drop more probability mass than
/// the requested budget allows.
class TruncationTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroBackwardProbability : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Data set cannot support the requested fit (too few or identical samples).
class DegenerateData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fitted density evaluated so deep in its tail that the estimate is noise.
class NumericalUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coherent-state amplitude alpha = (x + i p)/sqrt(2).
class ComplexAmplitude {
 public:
  constexpr ComplexAmplitude() = default;
  ComplexAmplitude(double re, double im = 0.0);
  explicit ComplexAmplitude(Complex z) : ComplexAmplitude(z.real(), z.imag()) {}

  double re() const { return re_; }
  double im() const { return im_; }
  Complex value() const { return {re_, im_}; }
  double norm_sq() const { return re_ * re_ + im_ * im_; }
  double abs() const;
  ComplexAmplitude conj() const { return {re_, -im_}; }
  ComplexAmplitude scaled(double factor) const { return {re_ * factor, im_ * factor}; }
  ComplexAmplitude rotated(double phase) const;

  friend bool operator==(const ComplexAmplitude&, const ComplexAmplitude&) = default;

 private:
  double re_ = 0.0;
  double im_ = 0.0;
};

/// Thermal bath at inverse temperature beta (dimensionless) with mean
/// occupation n_th = 1/(e^beta - 1). beta = +inf (n_th = 0) is the vacuum bath.
class BathSpec {
 public:
  static BathSpec from_beta(double beta);
  static BathSpec from_nth(double n_th);
  static BathSpec zero_temperature() { return from_beta(std::numeric_limits<double>::infinity()); }

  double beta() const { return beta_; }
  double n_th() const { return n_th_; }
  bool is_zero_temperature() const { return n_th_ == 0.0; }

 private:
  BathSpec(double beta, double n_th) : beta_(beta), n_th_(n_th) {}
  double beta_;
  double n_th_;
};

/// Beam splitter U(theta) = exp(-i theta (a b^dag + a^dag b)); tau = cos^2(theta)
/// is the power transmissivity seen by the system input port.
class BeamSplitterSpec {
 public:
  static BeamSplitterSpec from_tau(double tau);
  static BeamSplitterSpec from_theta(double theta);
  /// Mirror-reflectivity convention used in lab notes: tau = 1 - R.
  static BeamSplitterSpec from_reflectivity(double reflectivity) { return from_tau(1.0 - reflectivity); }

  double tau() const { return tau_; }
  double theta() const { return theta_; }

 private:
  BeamSplitterSpec(double tau, double theta) : tau_(tau), theta_(theta) {}
  double tau_;
  double theta_;
};

/// Single-mode Gaussian state with isotropic noise: displacement mu and
/// thermal occupation nbar.
struct DisplacedThermalState {
  ComplexAmplitude mu;
  double nbar = 0.0;
};

struct TransitionQuery {
  ComplexAmplitude alpha_i;
  ComplexAmplitude alpha_f;
  BathSpec bath;
  BeamSplitterSpec bs;
};

std::string to_string(const ComplexAmplitude& a);

}  // namespace microrev
