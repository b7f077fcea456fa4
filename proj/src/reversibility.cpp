#include "microrev/reversibility.hpp"

#include <cmath>

#include "microrev/gaussian_core.hpp"

namespace microrev {

double nth_from_beta(double beta) {
  if (!(beta > 0.0)) throw DomainError("inverse temperature must be positive");
  return 1.0 / std::expm1(beta);
}

double beta_from_nth(double n_th) {
  if (!(n_th > 0.0) || !std::isfinite(n_th)) throw DomainError("thermal occupation must be positive and finite");
  return std::log1p(1.0 / n_th);
}

ComplexAmplitude gibbs_rescale_initial(const ComplexAmplitude& alpha, double beta) {
  if (!(beta >= 0.0)) throw DomainError("inverse temperature must be non-negative");
  return alpha.conj().scaled(std::exp(beta / 2.0));
}

ComplexAmplitude gibbs_rescale_final(const ComplexAmplitude& alpha, double beta) {
  if (!(beta >= 0.0)) throw DomainError("inverse temperature must be non-negative");
  return alpha.conj().scaled(std::exp(-beta / 2.0));
}

RescaledPair gibbs_rescale(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, double beta) {
  return {gibbs_rescale_initial(alpha_i, beta), gibbs_rescale_final(alpha_f, beta)};
}

double predicted_log_ratio(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, double beta) {
  if (!(beta >= 0.0) || std::isinf(beta)) throw DomainError("inverse temperature must be finite and non-negative");
  // 1/n_th = e^beta - 1, 1/(n_th + 1) = 1 - e^{-beta}
  return std::expm1(beta) * alpha_i.norm_sq() + std::expm1(-beta) * alpha_f.norm_sq();
}

double predicted_log_ratio(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, const BathSpec& bath) {
  return predicted_log_ratio(alpha_i, alpha_f, bath.beta());
}

double heat(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f) {
  return alpha_f.norm_sq() - alpha_i.norm_sq();
}

double classical_log_ratio(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, double beta) {
  return 0.0 - beta * heat(alpha_i, alpha_f);  // no signed zero for Q = 0
}

double classical_log_ratio(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, const BathSpec& bath) {
  return classical_log_ratio(alpha_i, alpha_f, bath.beta());
}

double upsilon_coefficient_a(double beta) {
  const double s = std::sinh(beta / 2.0);
  return 2.0 * s * s;
}

double upsilon_coefficient_b(double beta) {
  if (std::abs(beta) < 0.1) {
    // sinh(b) - b loses all digits to cancellation here; odd series from b^3.
    const double b2 = beta * beta;
    double term = beta * b2 / 6.0;
    double sum = term;
    for (int k = 5; k <= 15; k += 2) {
      term *= b2 / static_cast<double>((k - 1) * k);
      sum += term;
    }
    return sum;
  }
  return std::sinh(beta) - beta;
}

double upsilon_closed_form(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, double beta) {
  if (!(beta >= 0.0) || std::isinf(beta)) throw DomainError("inverse temperature must be finite and non-negative");
  const double total = alpha_i.norm_sq() + alpha_f.norm_sq();
  const double delta = alpha_f.norm_sq() - alpha_i.norm_sq();
  return upsilon_coefficient_a(beta) * total - upsilon_coefficient_b(beta) * delta;
}

double upsilon_closed_form(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, const BathSpec& bath) {
  return upsilon_closed_form(alpha_i, alpha_f, bath.beta());
}

double upsilon_from_definition(const fock::FockKet& psi_i, const fock::FockKet& psi_f, double beta, double budget) {
  if (!(beta >= 0.0) || std::isinf(beta)) throw DomainError("inverse temperature must be finite and non-negative");
  const double up = std::log(fock::exp_beta_h_expectation(psi_i, beta, budget)) - beta * fock::energy_mean(psi_i);
  const double down = std::log(fock::exp_beta_h_expectation(psi_f, -beta, budget)) + beta * fock::energy_mean(psi_f);
  return up + down;
}

double upsilon_from_definition(const fock::FockKet& psi_i, const fock::FockKet& psi_f, const BathSpec& bath,
                               double budget) {
  return upsilon_from_definition(psi_i, psi_f, bath.beta(), budget);
}

double upsilon_from_definition(const ComplexAmplitude& alpha_i, const ComplexAmplitude& alpha_f, double beta,
                               double budget) {
  if (!(beta >= 0.0) || std::isinf(beta)) throw DomainError("inverse temperature must be finite and non-negative");
  return fock::log_coherent_exp_expectation(alpha_i, beta, budget) - beta * alpha_i.norm_sq() +
         fock::log_coherent_exp_expectation(alpha_f, -beta, budget) + beta * alpha_f.norm_sq();
}

TransitionResult make_transition_result(const TransitionQuery& q, double log_p_fwd, double log_p_bwd) {
  const double beta = q.bath.beta();
  TransitionResult r;
  r.p_fwd = std::exp(log_p_fwd);
  r.p_bwd = std::exp(log_p_bwd);
  r.log_ratio = log_p_fwd - log_p_bwd;
  r.predicted_log_ratio = predicted_log_ratio(q.alpha_i, q.alpha_f, beta);
  r.heat = heat(q.alpha_i, q.alpha_f);
  r.classical_log_ratio = classical_log_ratio(q.alpha_i, q.alpha_f, beta);
  r.log_upsilon = beta * r.heat + r.log_ratio;
  r.alpha_sq_tot = q.alpha_i.norm_sq() + q.alpha_f.norm_sq();
  r.delta_alpha_sq = r.heat;
  return r;
}

TransitionResult evaluate(const TransitionQuery& q, Engine engine, const fock::OracleOptions& opts) {
  if (engine == Engine::Analytic) {
    return make_transition_result(q, gaussian::log_forward_probability(q), gaussian::log_backward_probability(q));
  }
  const fock::NumberBlockUnitary u = fock::beam_splitter_for(q, opts.dim, opts.tail_budget);
  const double fwd = fock::forward_probability_fock(q, u, opts.tail_budget);
  const double bwd = fock::backward_probability_fock(q, u, opts.tail_budget);
  return make_transition_result(q, std::log(fwd), std::log(bwd));
}

}  // namespace microrev
