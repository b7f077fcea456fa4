#include "microrev/types.hpp"

#include <cmath>
#include <sstream>

#include "microrev/reversibility.hpp"

namespace microrev {

ComplexAmplitude::ComplexAmplitude(double re, double im) : re_(re), im_(im) {
  if (!std::isfinite(re) || !std::isfinite(im)) {
    throw DomainError("complex amplitude must have finite components");
  }
}

double ComplexAmplitude::abs() const { return std::hypot(re_, im_); }

ComplexAmplitude ComplexAmplitude::rotated(double phase) const {
  return ComplexAmplitude(value() * std::polar(1.0, phase));
}

BathSpec BathSpec::from_beta(double beta) {
  if (std::isinf(beta) && beta > 0) return BathSpec(beta, 0.0);
  return BathSpec(beta, nth_from_beta(beta));
}

BathSpec BathSpec::from_nth(double n_th) {
  if (n_th == 0.0) return BathSpec(std::numeric_limits<double>::infinity(), 0.0);
  return BathSpec(beta_from_nth(n_th), n_th);
}

BeamSplitterSpec BeamSplitterSpec::from_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("beam-splitter transmissivity must lie in [0, 1]");
  return BeamSplitterSpec(tau, std::acos(std::sqrt(tau)));
}

BeamSplitterSpec BeamSplitterSpec::from_theta(double theta) {
  if (!(theta >= 0.0 && theta <= std::acos(0.0))) throw DomainError("beam-splitter angle must lie in [0, pi/2]");
  const double c = std::cos(theta);
  return BeamSplitterSpec(c * c, theta);
}

std::string to_string(const ComplexAmplitude& a) {
  std::ostringstream os;
  os.precision(17);
  os << a.re() << (std::signbit(a.im()) ? "-" : "+") << std::abs(a.im()) << "i";
  return os.str();
}

}  // namespace microrev
