#include "microrev/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace microrev::fock {

namespace {

void require_budget(double tail, double budget, const char* what, std::size_t dim) {
  if (!(tail <= budget)) {
    std::ostringstream os;
    os << what << ": neglected tail " << tail << " exceeds budget " << budget << " at dim " << dim;
    throw TruncationTooSmall(os.str());
  }
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

std::vector<double> populations(const FockDensity& rho) {
  std::vector<double> p(rho.dim());
  for (std::size_t n = 0; n < p.size(); ++n) p[n] = rho.mat(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)).real();
  return p;
}

void require_theta(const NumberBlockUnitary& u, const TransitionQuery& q) {
  if (std::abs(u.theta() - q.bs.theta()) > 1e-12) {
    throw DomainError("prebuilt beam-splitter unitary does not match the query angle");
  }
}

}  // namespace

double poisson_tail(double mean, std::size_t cutoff) {
  if (cutoff == 0) return 1.0;
  if (mean == 0.0) return 0.0;
  const double log_mean = std::log(mean);
  double sum = 0.0;
  for (std::size_t n = cutoff;; ++n) {
    const double nd = static_cast<double>(n);
    const double term = std::exp(-mean + nd * log_mean - std::lgamma(nd + 1.0));
    sum += term;
    if (nd > mean && (term == 0.0 || term < 1e-18 * sum)) break;
  }
  return std::min(sum, 1.0);
}

std::size_t dim_for_coherent(const ComplexAmplitude& alpha, double budget) {
  const double mean = alpha.norm_sq();
  std::size_t dim = 2;
  while (poisson_tail(mean, dim) > budget) ++dim;
  return dim;
}

double FockKet::norm_sq() const {
  double s = 0.0;
  for (const Complex& c : amps) s += std::norm(c);
  return s;
}

FockKet FockKet::from_amplitudes(std::vector<Complex> amps, bool normalize) {
  if (amps.empty()) throw DomainError("Fock ket needs at least one amplitude");
  FockKet ket{std::move(amps), 0.0, std::nullopt};
  if (normalize) {
    const double norm = std::sqrt(ket.norm_sq());
    if (norm == 0.0) throw DomainError("cannot normalize the zero vector");
    for (Complex& c : ket.amps) c /= norm;
  }
  return ket;
}

FockKet FockKet::number_state(std::size_t n, std::size_t dim) {
  if (n >= dim) throw DomainError("number state does not fit in the truncation");
  std::vector<Complex> amps(dim, Complex{});
  amps[n] = 1.0;
  return {std::move(amps), 0.0, std::nullopt};
}

FockKet coherent_ket(const ComplexAmplitude& alpha, std::size_t dim, double budget) {
  if (dim < 1) throw DomainError("Fock dimension must be positive");
  const double mean = alpha.norm_sq();
  const double tail = poisson_tail(mean, dim);
  require_budget(tail, budget, "coherent state", dim);

  std::vector<Complex> amps(dim);
  amps[0] = std::exp(-mean / 2.0);
  for (std::size_t n = 1; n < dim; ++n) {
    amps[n] = amps[n - 1] * alpha.value() / std::sqrt(static_cast<double>(n));
  }
  return {std::move(amps), tail, mean};
}

FockKet time_reverse(const FockKet& ket) {
  FockKet out = ket;
  for (Complex& c : out.amps) c = std::conj(c);
  return out;
}

double tilted_tail_fraction(const FockKet& ket, double s) {
  if (ket.poisson_mean) return poisson_tail(*ket.poisson_mean * std::exp(s), ket.dim());
  if (ket.tail_mass == 0.0) return 0.0;
  if (s <= 0.0) return ket.tail_mass / (ket.tail_mass + ket.norm_sq());
  return std::numeric_limits<double>::infinity();
}

FockKet gibbs_tilt(const FockKet& ket, double s, double budget) {
  const double tail = tilted_tail_fraction(ket, s);
  require_budget(tail, budget, "Gibbs-tilted state", ket.dim());

  FockKet out = ket;
  double norm_sq = 0.0;
  for (std::size_t n = 0; n < out.amps.size(); ++n) {
    out.amps[n] *= std::exp(0.5 * s * static_cast<double>(n));
    norm_sq += std::norm(out.amps[n]);
  }
  if (norm_sq == 0.0) throw DomainError("Gibbs tilt of the zero vector");
  const double norm = std::sqrt(norm_sq);
  for (Complex& c : out.amps) c /= norm;
  out.tail_mass = tail;
  if (ket.poisson_mean) out.poisson_mean = *ket.poisson_mean * std::exp(s);
  return out;
}

FockKet padded(const FockKet& ket, std::size_t dim) {
  if (dim < ket.dim()) throw DomainError("padding cannot shrink a ket");
  FockKet out = ket;
  out.amps.resize(dim, Complex{});
  return out;
}

double FockDensity::hermiticity_error() const {
  return (mat - mat.adjoint()).cwiseAbs().maxCoeff();
}

double FockDensity::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

FockDensity thermal_density(const BathSpec& bath, std::size_t dim, double budget) {
  if (dim < 1) throw DomainError("Fock dimension must be positive");
  FockDensity rho{Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)), 0.0};
  if (bath.is_zero_temperature()) {
    rho.mat(0, 0) = 1.0;
    return rho;
  }
  // p_n = (1 - q) q^n with q = e^{-beta}; mass beyond dim - 1 is q^dim.
  const double beta = bath.beta();
  const double tail = std::exp(-beta * static_cast<double>(dim));
  require_budget(tail, budget, "thermal state", dim);
  const double one_minus_q = -std::expm1(-beta);
  for (std::size_t n = 0; n < dim; ++n) {
    rho.mat(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) =
        one_minus_q * std::exp(-beta * static_cast<double>(n));
  }
  rho.tail_mass = tail;
  return rho;
}

std::size_t thermal_dim_for(const BathSpec& bath, double budget) {
  if (!(budget > 0.0)) throw DomainError("truncation budget must be positive");
  if (bath.is_zero_temperature()) return 1;
  const double d = std::ceil(-std::log(budget) / bath.beta());
  return static_cast<std::size_t>(std::max(d, 1.0));
}

NumberBlockUnitary::NumberBlockUnitary(double theta, std::size_t dim, std::size_t bath_dim)
    : theta_(theta), dim_(dim), bath_dim_(bath_dim ? bath_dim : dim) {
  if (dim < 2) throw DomainError("beam splitter needs Fock dimension >= 2");
  const std::size_t max_total = (dim_ - 1) + (bath_dim_ - 1);
  blocks_.reserve(max_total + 1);
  for (std::size_t total = 0; total <= max_total; ++total) {
    const auto size = static_cast<Eigen::Index>(total + 1);
    if (size == 1 || theta == 0.0) {
      blocks_.push_back(Eigen::MatrixXcd::Identity(size, size));
      continue;
    }
    // Generator a b^dag + a^dag b on |n, N-n>: <n+1|G|n> = sqrt((n+1)(N-n)).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(size);
    Eigen::VectorXd sub(size - 1);
    for (Eigen::Index n = 0; n + 1 < size; ++n) {
      sub(n) = std::sqrt(static_cast<double>(n + 1) * static_cast<double>(static_cast<Eigen::Index>(total) - n));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& v = es.eigenvectors();
    Eigen::VectorXcd phases(size);
    for (Eigen::Index j = 0; j < size; ++j) phases(j) = std::polar(1.0, -theta * es.eigenvalues()(j));
    const Eigen::MatrixXcd vc = v.cast<Complex>();
    blocks_.push_back(vc * phases.asDiagonal() * vc.transpose());
  }
}

double NumberBlockUnitary::max_unitarity_error() const {
  double worst = 0.0;
  for (const auto& b : blocks_) {
    const Eigen::MatrixXcd defect = b.adjoint() * b - Eigen::MatrixXcd::Identity(b.rows(), b.cols());
    worst = std::max(worst, defect.cwiseAbs().maxCoeff());
  }
  return worst;
}

NumberBlockUnitary beam_splitter(double theta, std::size_t dim, std::size_t bath_dim) {
  return NumberBlockUnitary(theta, dim, bath_dim);
}

NumberBlockUnitary beam_splitter_for(const TransitionQuery& q, std::size_t dim, double budget) {
  return NumberBlockUnitary(q.bs.theta(), dim, std::max(dim, thermal_dim_for(q.bath, budget)));
}

Eigen::MatrixXcd dense_unitary(const NumberBlockUnitary& u) {
  if (u.bath_dim() != u.dim()) throw DomainError("dense assembly needs equal mode cutoffs");
  const std::size_t d = u.dim();
  const auto size = static_cast<Eigen::Index>(d * d);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(size, size);
  for (std::size_t total = 0; total <= u.max_total(); ++total) {
    for (std::size_t n_out = 0; n_out <= total; ++n_out) {
      const std::size_t m_out = total - n_out;
      if (n_out >= d || m_out >= d) continue;
      for (std::size_t n_in = 0; n_in <= total; ++n_in) {
        const std::size_t m_in = total - n_in;
        if (n_in >= d || m_in >= d) continue;
        out(static_cast<Eigen::Index>(n_out * d + m_out), static_cast<Eigen::Index>(n_in * d + m_in)) =
            u.element(total, n_out, n_in);
      }
    }
  }
  return out;
}

double transition_probability(const FockKet& input, std::span<const double> bath_populations,
                              const NumberBlockUnitary& u, const FockKet& projector) {
  if (input.dim() > u.dim() || bath_populations.size() > u.bath_dim()) {
    throw DomainError("input state exceeds the unitary's truncation");
  }
  const std::size_t out_dim = u.max_total() + 1;  // system photon numbers reachable at the output
  const std::size_t in_dim = input.dim();
  const std::size_t proj_dim = std::min(projector.dim(), out_dim);

  // Bath starts in |m>, system output projected on <proj|, bath output |k>:
  //   phi_{m,k} = sum_n conj(proj_n) <n, k| U |n + k - m, m> input_{n+k-m}
  double total = 0.0;
  for (std::size_t m = 0; m < bath_populations.size(); ++m) {
    const double pm = bath_populations[m];
    if (pm == 0.0) continue;
    double weight = 0.0;
    for (std::size_t k = 0; k < out_dim; ++k) {
      const std::size_t n_lo = m > k ? m - k : 0;
      const std::size_t in_hi = in_dim + m > k ? in_dim + m - k : 0;
      const std::size_t n_hi = std::min({proj_dim, out_dim - k, in_hi});
      Complex phi{};
      for (std::size_t n = n_lo; n < n_hi; ++n) {
        const std::size_t n_in = n + k - m;
        phi += std::conj(projector.amps[n]) * u.element(n + k, n, n_in) * input.amps[n_in];
      }
      weight += std::norm(phi);
    }
    total += pm * weight;
  }
  return total;
}

double forward_probability_fock(const TransitionQuery& q, const NumberBlockUnitary& u, double budget) {
  require_theta(u, q);
  const std::size_t d = u.dim();
  const FockKet input = coherent_ket(q.alpha_i, d, budget);
  const FockKet projector = coherent_ket(q.alpha_f, u.max_total() + 1, budget);
  const auto pops = populations(thermal_density(q.bath, u.bath_dim(), budget));
  return transition_probability(input, pops, u, projector);
}

double backward_probability_fock(const TransitionQuery& q, const NumberBlockUnitary& u, double budget) {
  require_theta(u, q);
  if (q.bath.is_zero_temperature()) {
    throw DomainError("backward trajectory is undefined for a zero-temperature bath");
  }
  const std::size_t d = u.dim();
  const double beta = q.bath.beta();
  // Gibbs rescaling applied as an operator: e^{-beta n/2} on the reversed
  // final state, e^{+beta n/2} on the reversed initial state.
  const FockKet input = gibbs_tilt(time_reverse(coherent_ket(q.alpha_f, d, budget)), -beta, budget);
  const FockKet projector =
      gibbs_tilt(time_reverse(coherent_ket(q.alpha_i, u.max_total() + 1, budget)), beta, budget);
  const auto pops = populations(thermal_density(q.bath, u.bath_dim(), budget));
  return transition_probability(input, pops, u, projector);
}

double forward_probability_fock(const TransitionQuery& q, const OracleOptions& opts) {
  return forward_probability_fock(q, beam_splitter_for(q, opts.dim, opts.tail_budget), opts.tail_budget);
}

double backward_probability_fock(const TransitionQuery& q, const OracleOptions& opts) {
  return backward_probability_fock(q, beam_splitter_for(q, opts.dim, opts.tail_budget), opts.tail_budget);
}

double exp_beta_h_expectation(const FockKet& psi, double s, double budget, double zero_point) {
  require_budget(tilted_tail_fraction(psi, s), budget, "tilted expectation", psi.dim());
  double sum = 0.0;
  for (std::size_t n = 0; n < psi.dim(); ++n) {
    sum += std::norm(psi.amps[n]) * std::exp(s * (static_cast<double>(n) + zero_point));
  }
  return sum;
}

double log_coherent_exp_expectation(const ComplexAmplitude& alpha, double s, double budget) {
  const double mean = alpha.norm_sq();
  if (mean == 0.0) return 0.0;
  const double log_mean = std::log(mean);
  const double tilted_mean = mean * std::exp(s);
  const double cutoff = std::log(budget) - 30.0;
  double acc = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0;; ++n) {
    const double nd = static_cast<double>(n);
    const double log_term = -mean + nd * (log_mean + s) - std::lgamma(nd + 1.0);
    acc = log_add_exp(acc, log_term);
    if (nd > tilted_mean + 1.0 && log_term - acc < cutoff) break;
  }
  return acc;
}

double energy_mean(const FockKet& psi) {
  double sum = 0.0;
  for (std::size_t n = 0; n < psi.dim(); ++n) sum += static_cast<double>(n) * std::norm(psi.amps[n]);
  return sum / psi.norm_sq();
}

double energy_variance(const FockKet& psi) {
  const double mean = energy_mean(psi);
  double sum = 0.0;
  for (std::size_t n = 0; n < psi.dim(); ++n) {
    const double dev = static_cast<double>(n) - mean;
    sum += dev * dev * std::norm(psi.amps[n]);
  }
  return sum / psi.norm_sq();
}

Complex rescaled_overlap(const ComplexAmplitude& alpha, double s, double budget) {
  const ComplexAmplitude scaled = alpha.scaled(std::exp(s / 2.0));
  const std::size_t d = std::max(dim_for_coherent(alpha, budget), dim_for_coherent(scaled, budget));
  const FockKet bra = coherent_ket(alpha, d, budget);
  const FockKet ket = coherent_ket(scaled, d, budget);
  Complex sum{};
  for (std::size_t n = 0; n < d; ++n) sum += std::conj(bra.amps[n]) * ket.amps[n];
  return sum;
}

double RatioCheck::relative_error() const { return std::abs(lhs - rhs) / std::abs(rhs); }

RatioCheck general_ratio_check(const FockKet& psi_i, const FockKet& psi_f, const BathSpec& bath, double theta,
                               std::size_t dim, double budget) {
  if (psi_i.dim() > dim || psi_f.dim() > dim) throw DomainError("state does not fit in the requested dimension");
  if (bath.is_zero_temperature()) throw DomainError("Gibbs rescaling diverges for a zero-temperature bath");
  const double beta = bath.beta();
  const NumberBlockUnitary u(theta, dim, std::max(dim, thermal_dim_for(bath, budget)));
  const auto pops = populations(thermal_density(bath, u.bath_dim(), budget));

  RatioCheck out;
  out.p_forward = transition_probability(psi_i, pops, u, psi_f);
  const FockKet tilde_f = gibbs_tilt(time_reverse(psi_f), -beta, budget);
  const FockKet tilde_i = gibbs_tilt(time_reverse(psi_i), beta, budget);
  out.p_backward = transition_probability(tilde_f, pops, u, tilde_i);
  if (!(out.p_backward > std::numeric_limits<double>::min())) {
    throw ZeroBackwardProbability("backward transition probability underflows");
  }
  out.lhs = out.p_forward / out.p_backward;
  out.rhs = exp_beta_h_expectation(psi_i, beta, budget) * exp_beta_h_expectation(psi_f, -beta, budget);
  return out;
}

double fixed_point_check(const BathSpec& bath, double theta, std::size_t dim, double budget) {
  const NumberBlockUnitary u(theta, dim);
  const auto pops = populations(thermal_density(bath, dim, budget));
  double trace_norm = 0.0;
  for (std::size_t total = 0; total <= u.max_total(); ++total) {
    const auto size = static_cast<Eigen::Index>(total + 1);
    Eigen::VectorXcd diag = Eigen::VectorXcd::Zero(size);
    for (std::size_t n = 0; n <= total; ++n) {
      if (n < dim && total - n < dim) diag(static_cast<Eigen::Index>(n)) = pops[n] * pops[total - n];
    }
    const Eigen::MatrixXcd& b = u.block(total);
    Eigen::MatrixXcd delta = b * diag.asDiagonal() * b.adjoint();
    delta -= Eigen::MatrixXcd(diag.asDiagonal());
    delta = 0.5 * (delta + delta.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(delta, Eigen::EigenvaluesOnly);
    trace_norm += es.eigenvalues().cwiseAbs().sum();
  }
  return 0.5 * trace_norm;
}

double energy_conservation_check(double theta, std::size_t dim) {
  const Eigen::MatrixXcd u = dense_unitary(NumberBlockUnitary(theta, dim));
  double worst = 0.0;
  for (Eigen::Index row = 0; row < u.rows(); ++row) {
    const auto n_row = static_cast<double>(row / static_cast<Eigen::Index>(dim) + row % static_cast<Eigen::Index>(dim));
    for (Eigen::Index col = 0; col < u.cols(); ++col) {
      const auto n_col = static_cast<double>(col / static_cast<Eigen::Index>(dim) + col % static_cast<Eigen::Index>(dim));
      // ([U, N])_{rc} = U_{rc} (N_c - N_r)
      worst = std::max(worst, std::abs(u(row, col) * (n_col - n_row)));
    }
  }
  return worst;
}

}  // namespace microrev::fock
