#pragma once

// Brute-force two-mode Fock-space engine. Everything here is computed by
// explicit linear algebra on truncated number bases, independently of the
// Gaussian closed forms, so it can serve as their oracle.
//
// Truncation is audited, never silent: every constructor that cuts an
// infinite expansion checks the neglected probability mass against a tail
// budget and throws TruncationTooSmall when it is exceeded.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "microrev/types.hpp"

namespace microrev::fock {

inline constexpr double kDefaultTailBudget = 1e-10;

/// P(X >= cutoff) for X ~ Poisson(mean).
double poisson_tail(double mean, std::size_t cutoff);

/// Smallest dimension whose Poisson(|alpha|^2) tail is below the budget.
std::size_t dim_for_coherent(const ComplexAmplitude& alpha, double budget = kDefaultTailBudget);

/// Truncated single-mode state vector in the number basis.
struct FockKet {
  std::vector<Complex> amps;
  /// Probability mass of the untruncated state beyond amps.size() - 1.
  double tail_mass = 0.0;
  /// Set when the untruncated photon statistics are Poisson with this mean
  /// (coherent states and their Gibbs tilts); used to audit tilted tails.
  std::optional<double> poisson_mean;

  std::size_t dim() const { return amps.size(); }
  double norm_sq() const;

  /// Finite superposition with exactly zero tail; normalized by default.
  static FockKet from_amplitudes(std::vector<Complex> amps, bool normalize = true);
  static FockKet number_state(std::size_t n, std::size_t dim);
};

/// |alpha> = e^{-|alpha|^2/2} sum alpha^n/sqrt(n!) |n>, truncated to dim.
FockKet coherent_ket(const ComplexAmplitude& alpha, std::size_t dim, double budget = kDefaultTailBudget);

/// Antiunitary time reversal: complex conjugation of number-basis amplitudes.
FockKet time_reverse(const FockKet& ket);

/// Normalized e^{s n/2}|psi>. For s > 0 the neglected tail grows and is
/// re-audited against the budget.
FockKet gibbs_tilt(const FockKet& ket, double s, double budget = kDefaultTailBudget);

FockKet padded(const FockKet& ket, std::size_t dim);

/// Probability mass of e^{s n}-weighted |psi_n|^2 lying beyond the
/// truncation, as a fraction of the full weighted sum. +inf if unauditable.
double tilted_tail_fraction(const FockKet& ket, double s);

struct FockDensity {
  Eigen::MatrixXcd mat;
  double tail_mass = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(mat.rows()); }
  double trace() const { return mat.trace().real(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
};

/// rho_th = e^{-beta n}/Z truncated to dim (not renormalized; the deficit is
/// carried in tail_mass).
FockDensity thermal_density(const BathSpec& bath, std::size_t dim, double budget = kDefaultTailBudget);

/// Smallest bath cutoff whose neglected thermal mass e^{-beta D_b} is within
/// budget (1 for a zero-temperature bath).
std::size_t thermal_dim_for(const BathSpec& bath, double budget = kDefaultTailBudget);

/// U(theta) = exp(-i theta (a b^dag + a^dag b)) stored as one dense block per
/// total photon number N = 0 .. (dim-1) + (bath_dim-1). Block N acts on the
/// basis |n, N-n>, n = 0..N, indexed by the system photon number n. System
/// inputs live below dim, bath inputs below bath_dim (defaults to dim).
class NumberBlockUnitary {
 public:
  NumberBlockUnitary(double theta, std::size_t dim, std::size_t bath_dim = 0);

  double theta() const { return theta_; }
  std::size_t dim() const { return dim_; }
  std::size_t bath_dim() const { return bath_dim_; }
  std::size_t max_total() const { return blocks_.size() - 1; }
  const Eigen::MatrixXcd& block(std::size_t total) const { return blocks_.at(total); }

  /// <n_out, N - n_out| U |n_in, N - n_in>.
  Complex element(std::size_t total, std::size_t n_out, std::size_t n_in) const {
    return blocks_[total](static_cast<Eigen::Index>(n_out), static_cast<Eigen::Index>(n_in));
  }

  /// max over blocks of ||U^dag U - 1||_max.
  double max_unitarity_error() const;

 private:
  double theta_;
  std::size_t dim_;
  std::size_t bath_dim_;
  std::vector<Eigen::MatrixXcd> blocks_;
};

NumberBlockUnitary beam_splitter(double theta, std::size_t dim, std::size_t bath_dim = 0);

/// Unitary for one query: system cutoff `dim`, bath cutoff sized from the
/// budget (never below dim).
NumberBlockUnitary beam_splitter_for(const TransitionQuery& q, std::size_t dim, double budget = kDefaultTailBudget);

/// The block unitary assembled on the truncated product space (index n*dim + m),
/// keeping only entries with both photon numbers below dim. Requires
/// bath_dim == dim.
Eigen::MatrixXcd dense_unitary(const NumberBlockUnitary& u);

/// Tr[U (|in><in| (x) rho_B) U^dag (|proj><proj| (x) 1_B)] for a bath state
/// diagonal in the number basis with the given populations.
double transition_probability(const FockKet& input, std::span<const double> bath_populations,
                              const NumberBlockUnitary& u, const FockKet& projector);

struct OracleOptions {
  std::size_t dim = 40;
  double tail_budget = kDefaultTailBudget;
};

double forward_probability_fock(const TransitionQuery& q, const OracleOptions& opts = {});
double backward_probability_fock(const TransitionQuery& q, const OracleOptions& opts = {});
/// Overloads reusing a prebuilt unitary; u.theta() must match q.bs.theta()
/// and the thermal state is truncated at u.bath_dim().
double forward_probability_fock(const TransitionQuery& q, const NumberBlockUnitary& u,
                                 double budget = kDefaultTailBudget);
double backward_probability_fock(const TransitionQuery& q, const NumberBlockUnitary& u,
                                 double budget = kDefaultTailBudget);

/// <psi| e^{s H} |psi> with H = n + zero_point.
double exp_beta_h_expectation(const FockKet& psi, double s, double budget = kDefaultTailBudget,
                              double zero_point = 0.0);

/// log <alpha| e^{s n} |alpha> summed term by term over Poisson weights with
/// an automatically extended cutoff; stays finite for large amplitudes.
double log_coherent_exp_expectation(const ComplexAmplitude& alpha, double s, double budget = kDefaultTailBudget);

double energy_mean(const FockKet& psi);
double energy_variance(const FockKet& psi);

/// <alpha | alpha e^{s/2}> evaluated in the number basis.
Complex rescaled_overlap(const ComplexAmplitude& alpha, double s, double budget = kDefaultTailBudget);

struct RatioCheck {
  double lhs = 0.0;  // P_fwd / P_bwd from trace formulas
  double rhs = 0.0;  // <psi_i|e^{beta H}|psi_i><psi_f|e^{-beta H}|psi_f>
  double p_forward = 0.0;
  double p_backward = 0.0;
  double relative_error() const;
};

/// Forward/backward transition ratio for arbitrary pure states against the
/// tilted-expectation product. psi_i and psi_f must fit in dim.
RatioCheck general_ratio_check(const FockKet& psi_i, const FockKet& psi_f, const BathSpec& bath, double theta,
                               std::size_t dim, double budget = kDefaultTailBudget);

/// Trace distance between U(rho_eq (x) rho_th)U^dag and rho_eq (x) rho_th.
double fixed_point_check(const BathSpec& bath, double theta, std::size_t dim, double budget = kDefaultTailBudget);

/// max |[U, N_total]| over the truncated product space.
double energy_conservation_check(double theta, std::size_t dim);

}  // namespace microrev::fock
