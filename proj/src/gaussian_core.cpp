#include "microrev/gaussian_core.hpp"

#include <cmath>
#include <numbers>

#include "microrev/reversibility.hpp"

namespace microrev::gaussian {

DisplacedThermalState interact(const ComplexAmplitude& alpha_in, const BathSpec& bath, const BeamSplitterSpec& bs,
                               InputPort port) {
  const double tau = bs.tau();
  if (port == InputPort::Transmitted) {
    return {alpha_in.scaled(std::sqrt(tau)), (1.0 - tau) * bath.n_th()};
  }
  const Complex mu = Complex(0.0, -std::sqrt(1.0 - tau)) * alpha_in.value();
  return {ComplexAmplitude(mu), tau * bath.n_th()};
}

double log_transition_density(const DisplacedThermalState& state, const ComplexAmplitude& alpha) {
  const double width = state.nbar + 1.0;
  const double dist_sq = std::norm(alpha.value() - state.mu.value());
  return -dist_sq / width - std::log(width);
}

double q_function(const DisplacedThermalState& state, const ComplexAmplitude& alpha) {
  return std::exp(log_transition_density(state, alpha)) / std::numbers::pi;
}

ReversePoints reverse_points(const TransitionQuery& q) {
  if (q.bath.is_zero_temperature()) {
    throw DomainError("backward trajectory is undefined for a zero-temperature bath");
  }
  const double beta = q.bath.beta();
  return {gibbs_rescale_final(q.alpha_f, beta), gibbs_rescale_initial(q.alpha_i, beta)};
}

double log_forward_probability(const TransitionQuery& q, InputPort port) {
  return log_transition_density(interact(q.alpha_i, q.bath, q.bs, port), q.alpha_f);
}

double log_backward_probability(const TransitionQuery& q, InputPort port) {
  const ReversePoints rev = reverse_points(q);
  return log_transition_density(interact(rev.input, q.bath, q.bs, port), rev.evaluate);
}

double forward_probability(const TransitionQuery& q, InputPort port) {
  return std::exp(log_forward_probability(q, port));
}

double backward_probability(const TransitionQuery& q, InputPort port) {
  return std::exp(log_backward_probability(q, port));
}

}  // namespace microrev::gaussian
