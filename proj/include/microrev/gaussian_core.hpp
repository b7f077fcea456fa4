#pragma once

// Closed-form engine: a coherent state mixed with a thermal bath on a beam
// splitter leaves the system in a displaced thermal state, whose Husimi Q
// function is an isotropic complex Gaussian.

#include "microrev/types.hpp"

namespace microrev::gaussian {

/// Which physical input port carries the coherent state.
///   Transmitted: mu = sqrt(tau) * alpha,         nbar = (1 - tau) * n_th
///   Reflected:   mu = -i sqrt(1 - tau) * alpha,  nbar = tau * n_th
enum class InputPort { Transmitted, Reflected };

DisplacedThermalState interact(const ComplexAmplitude& alpha_in, const BathSpec& bath, const BeamSplitterSpec& bs,
                               InputPort port = InputPort::Transmitted);

/// Q(alpha) = <alpha|rho|alpha>/pi.
double q_function(const DisplacedThermalState& state, const ComplexAmplitude& alpha);

/// log(pi * Q(alpha)); finite even where the density itself underflows.
double log_transition_density(const DisplacedThermalState& state, const ComplexAmplitude& alpha);

/// The Gibbs-rescaled endpoints of the reverse trajectory.
struct ReversePoints {
  ComplexAmplitude input;     // conj(alpha_f) e^{-beta/2}
  ComplexAmplitude evaluate;  // conj(alpha_i) e^{+beta/2}
};

/// Throws DomainError for a zero-temperature bath, where the rescaling diverges.
ReversePoints reverse_points(const TransitionQuery& q);

double forward_probability(const TransitionQuery& q, InputPort port = InputPort::Transmitted);
double backward_probability(const TransitionQuery& q, InputPort port = InputPort::Transmitted);
double log_forward_probability(const TransitionQuery& q, InputPort port = InputPort::Transmitted);
double log_backward_probability(const TransitionQuery& q, InputPort port = InputPort::Transmitted);

}  // namespace microrev::gaussian
