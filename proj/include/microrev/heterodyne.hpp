#pragma once

// Monte Carlo stand-in for the optical measurement chain: heterodyne samples
// of the system output, a maximum-likelihood isotropic Gaussian fit of the
// Q function, and bootstrap error bars on the forward/backward log ratio.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "microrev/types.hpp"

namespace microrev::heterodyne {

/// Quadrature pair; the corresponding amplitude is (x + i p)/sqrt(2).
struct QuadratureSample {
  double x = 0.0;
  double p = 0.0;
};

class HeterodyneDataset {
 public:
  HeterodyneDataset(std::vector<QuadratureSample> samples, std::uint64_t seed, DisplacedThermalState source);

  std::span<const QuadratureSample> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  std::uint64_t seed() const { return seed_; }
  const DisplacedThermalState& source_state() const { return source_; }

 private:
  std::vector<QuadratureSample> samples_;
  std::uint64_t seed_;
  DisplacedThermalState source_;
};

/// Mixes a stage index into a base seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stage);

/// n i.i.d. draws from the Q function in (x, p) coordinates: mean
/// sqrt(2)*(Re mu, Im mu), per-quadrature variance nbar + 1.
HeterodyneDataset sample_heterodyne(const DisplacedThermalState& state, std::size_t n, std::uint64_t seed);

struct IsotropicGaussianFit {
  ComplexAmplitude mean;
  double variance = 1.0;  // per quadrature; estimates nbar + 1
  std::size_t n_samples = 0;

  /// log(pi * Q_fit(alpha)).
  double log_transition_density(const ComplexAmplitude& alpha) const;
  double transition_density(const ComplexAmplitude& alpha) const;
  /// Distance of alpha from the fitted mean in fitted quadrature standard deviations.
  double distance_in_sigmas(const ComplexAmplitude& alpha) const;
};

/// Closed-form ML estimate: sample mean and pooled per-quadrature variance
/// (1/2N) sum[(x - xbar)^2 + (p - pbar)^2]. Throws DegenerateData for fewer
/// than three samples or zero spread.
IsotropicGaussianFit ml_fit(std::span<const QuadratureSample> samples);
IsotropicGaussianFit ml_fit(const HeterodyneDataset& data);

struct BootstrapEstimate {
  double point = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_resamples = 0;
  std::size_t resample_size = 0;
};

struct BootstrapOptions {
  std::size_t n_resamples = 1000;
  std::size_t resample_size = 1000;
};

using Statistic = std::function<double(std::span<const QuadratureSample>)>;

/// Resamples with replacement, recomputes the statistic per resample. The
/// standard error is the spread across resamples; the interval is the
/// 2.5/97.5 percentile pair, widened if needed to contain the full-data point.
BootstrapEstimate bootstrap(const HeterodyneDataset& data, const Statistic& statistic, const BootstrapOptions& opts,
                            std::uint64_t seed);

struct LogRatioEstimate {
  BootstrapEstimate estimate;
  DisplacedThermalState forward_state;
  DisplacedThermalState backward_state;
  ComplexAmplitude forward_eval;   // alpha_f
  ComplexAmplitude backward_input; // Gibbs-rescaled alpha_f
  ComplexAmplitude backward_eval;  // Gibbs-rescaled alpha_i
  IsotropicGaussianFit forward_fit;
  IsotropicGaussianFit backward_fit;
  double log_p_fwd = 0.0;
  double log_p_bwd = 0.0;
};

/// Maximum distance (in fitted sigmas) at which a fitted density is trusted.
inline constexpr double kMaxEvaluationSigmas = 8.0;

/// Emulates both protocols on independent data sets of n samples each and
/// bootstraps log(P_fwd/P_bwd). Requires beta > 0 and n >= 3.
LogRatioEstimate estimate_log_ratio(const TransitionQuery& q, std::size_t n, std::uint64_t seed,
                                    const BootstrapOptions& opts = {});

}  // namespace microrev::heterodyne
