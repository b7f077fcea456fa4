#pragma once

// Closed-form layer of the quantum microscopic-reversibility relation for
// coherent states: Gibbs rescaling, the predicted forward/backward ratio,
// heat, the classical baseline and the modification factor Upsilon.
//
// Upsilon is always carried as log(Upsilon). Functions taking a raw `beta`
// accept beta = 0 (the classical limit); those taking a BathSpec inherit its
// domain.

#include "microrev/fock_oracle.hpp"
#include "microrev/types.hpp"

namespace microrev {

/// n_th = e^{-beta}/(1 - e^{-beta}). Throws DomainError unless beta > 0.
double nth_from_beta(double beta);
/// beta = ln(1 + 1/n_th). Throws DomainError unless n_th > 0.
double beta_from_nth(double n_th);

/// conj(alpha) e^{+beta/2}
ComplexAmplitude gibbs_rescale_initial(const ComplexAmplitude& alpha, double beta);
/// conj(alpha) e^{-beta/2}
ComplexAmplitude gibbs_rescale_final(const ComplexAmplitude& alpha, double beta);

struct RescaledPair {
  ComplexAmplitude alpha_i_tilde;
  ComplexAmplitude alpha_f_tilde;
};
RescaledPair gibbs_rescale(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, double beta);

/// log(P_fwd/P_bwd) = |alpha_i|^2/n_th - |alpha_f|^2/(n_th + 1).
double predicted_log_ratio(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, double beta);
double predicted_log_ratio(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, const BathSpec& bath);

/// Q = |alpha_f|^2 - |alpha_i|^2 in units of hbar*omega0.
double heat(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f);

/// -beta Q
double classical_log_ratio(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, double beta);
double classical_log_ratio(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, const BathSpec& bath);

/// log Upsilon = (cosh beta - 1)|alpha|^2_tot - (sinh beta - beta) Delta|alpha|^2.
double upsilon_closed_form(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, double beta);
double upsilon_closed_form(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, const BathSpec& bath);

/// log Upsilon from tilted expectations of arbitrary states:
///   log<psi_i|e^{beta H}|psi_i> - beta<H>_i + log<psi_f|e^{-beta H}|psi_f> + beta<H>_f
double upsilon_from_definition(const fock::FockKet& psi_i, const fock::FockKet& psi_f, double beta,
                               double budget = fock::kDefaultTailBudget);
double upsilon_from_definition(const fock::FockKet& psi_i, const fock::FockKet& psi_f, const BathSpec& bath,
                               double budget = fock::kDefaultTailBudget);

/// Same definition for coherent states, with the tilted expectations summed as
/// Poisson series in log space (usable at amplitudes too large for a ket).
double upsilon_from_definition(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, double beta,
                               double budget = fock::kDefaultTailBudget);

/// Coefficients of the closed form; both vanish as beta -> 0.
double upsilon_coefficient_a(double beta);
double upsilon_coefficient_b(double beta);

struct TransitionResult {
  double p_fwd = 0.0;
  double p_bwd = 0.0;
  double log_ratio = 0.0;
  double predicted_log_ratio = 0.0;
  double heat = 0.0;
  double classical_log_ratio = 0.0;
  double log_upsilon = 0.0;
  double alpha_sq_tot = 0.0;
  double delta_alpha_sq = 0.0;
};

/// Fills every derived field from the two log-probabilities of one query.
TransitionResult make_transition_result(const TransitionQuery& q, double log_p_fwd, double log_p_bwd);

enum class Engine { Analytic, Fock };

TransitionResult evaluate(const TransitionQuery& q, Engine engine, const fock::OracleOptions& opts = {});

}  // namespace microrev
