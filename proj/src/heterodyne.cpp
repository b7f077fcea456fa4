#include "microrev/heterodyne.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "microrev/gaussian_core.hpp"
#include "microrev/parallel.hpp"
#include "microrev/reversibility.hpp"

namespace microrev::heterodyne {

namespace {

constexpr std::uint64_t kForwardStage = 0;
constexpr std::uint64_t kBackwardStage = 1;
constexpr std::uint64_t kBootstrapStage = 2;

// Linear interpolation between order statistics (type 7).
double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapEstimate summarize(double point, std::vector<double> stats, std::size_t resample_size) {
  BootstrapEstimate est;
  est.point = point;
  est.n_resamples = stats.size();
  est.resample_size = resample_size;

  double mean = 0.0;
  for (double s : stats) mean += s;
  mean /= static_cast<double>(stats.size());
  double ss = 0.0;
  for (double s : stats) ss += (s - mean) * (s - mean);
  est.std_error = stats.size() > 1 ? std::sqrt(ss / static_cast<double>(stats.size() - 1)) : 0.0;

  std::sort(stats.begin(), stats.end());
  est.ci_low = std::min(percentile(stats, 0.025), point);
  est.ci_high = std::max(percentile(stats, 0.975), point);
  return est;
}

void draw_resample(std::span<const QuadratureSample> source, std::mt19937_64& rng, std::vector<QuadratureSample>& out) {
  std::uniform_int_distribution<std::size_t> pick(0, source.size() - 1);
  for (auto& s : out) s = source[pick(rng)];
}

void validate_options(const BootstrapOptions& opts, std::size_t available) {
  if (opts.n_resamples < 1) throw DomainError("bootstrap needs at least one resample");
  if (opts.resample_size < 1 || opts.resample_size > available) {
    throw DomainError("bootstrap resample size must lie in [1, sample count]");
  }
}

}  // namespace

HeterodyneDataset::HeterodyneDataset(std::vector<QuadratureSample> samples, std::uint64_t seed,
                                     DisplacedThermalState source)
    : samples_(std::move(samples)), seed_(seed), source_(source) {
  for (const auto& s : samples_) {
    if (!std::isfinite(s.x) || !std::isfinite(s.p)) throw DomainError("quadrature samples must be finite");
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stage) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stage + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

HeterodyneDataset sample_heterodyne(const DisplacedThermalState& state, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("need at least one heterodyne sample");
  if (!(state.nbar >= 0.0)) throw DomainError("thermal occupation must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(state.nbar + 1.0));
  const double x0 = std::numbers::sqrt2 * state.mu.re();
  const double p0 = std::numbers::sqrt2 * state.mu.im();
  std::vector<QuadratureSample> samples(n);
  for (auto& s : samples) {
    s.x = x0 + noise(rng);
    s.p = p0 + noise(rng);
  }
  return HeterodyneDataset(std::move(samples), seed, state);
}

double IsotropicGaussianFit::log_transition_density(const ComplexAmplitude& alpha) const {
  // Q in amplitude coordinates has variance variance/2 per component.
  return -std::norm(alpha.value() - mean.value()) / variance - std::log(variance);
}

double IsotropicGaussianFit::transition_density(const ComplexAmplitude& alpha) const {
  return std::exp(log_transition_density(alpha));
}

double IsotropicGaussianFit::distance_in_sigmas(const ComplexAmplitude& alpha) const {
  return std::numbers::sqrt2 * std::abs(alpha.value() - mean.value()) / std::sqrt(variance);
}

IsotropicGaussianFit ml_fit(std::span<const QuadratureSample> samples) {
  if (samples.size() < 3) throw DegenerateData("maximum-likelihood fit needs at least three samples");
  const auto n = static_cast<double>(samples.size());
  double sx = 0.0;
  double sp = 0.0;
  for (const auto& s : samples) {
    sx += s.x;
    sp += s.p;
  }
  const double xbar = sx / n;
  const double pbar = sp / n;
  double ss = 0.0;
  for (const auto& s : samples) ss += (s.x - xbar) * (s.x - xbar) + (s.p - pbar) * (s.p - pbar);
  const double variance = ss / (2.0 * n);
  if (!(variance > 0.0)) throw DegenerateData("all samples coincide; variance is zero");
  return {ComplexAmplitude(xbar / std::numbers::sqrt2, pbar / std::numbers::sqrt2), variance, samples.size()};
}

IsotropicGaussianFit ml_fit(const HeterodyneDataset& data) { return ml_fit(data.samples()); }

BootstrapEstimate bootstrap(const HeterodyneDataset& data, const Statistic& statistic, const BootstrapOptions& opts,
                            std::uint64_t seed) {
  validate_options(opts, data.size());
  const double point = statistic(data.samples());
  std::vector<double> stats(opts.n_resamples);
  parallel_for(opts.n_resamples, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    std::vector<QuadratureSample> resample(opts.resample_size);
    draw_resample(data.samples(), rng, resample);
    stats[r] = statistic(resample);
  });
  return summarize(point, std::move(stats), opts.resample_size);
}

LogRatioEstimate estimate_log_ratio(const TransitionQuery& q, std::size_t n, std::uint64_t seed,
                                    const BootstrapOptions& opts) {
  if (n < 3) throw DomainError("log-ratio estimate needs at least three samples per protocol");
  const gaussian::ReversePoints rev = gaussian::reverse_points(q);

  LogRatioEstimate out{.estimate = {},
                       .forward_state = gaussian::interact(q.alpha_i, q.bath, q.bs),
                       .backward_state = gaussian::interact(rev.input, q.bath, q.bs),
                       .forward_eval = q.alpha_f,
                       .backward_input = rev.input,
                       .backward_eval = rev.evaluate,
                       .forward_fit = {},
                       .backward_fit = {}};

  const HeterodyneDataset fwd = sample_heterodyne(out.forward_state, n, derive_seed(seed, kForwardStage));
  const HeterodyneDataset bwd = sample_heterodyne(out.backward_state, n, derive_seed(seed, kBackwardStage));
  out.forward_fit = ml_fit(fwd);
  out.backward_fit = ml_fit(bwd);

  const auto check_depth = [](const IsotropicGaussianFit& fit, const ComplexAmplitude& at, const char* which) {
    const double depth = fit.distance_in_sigmas(at);
    if (depth > kMaxEvaluationSigmas) {
      std::ostringstream os;
      os << which << " evaluation point lies " << depth << " fitted sigmas from the fitted mean";
      throw NumericalUnderflow(os.str());
    }
  };
  check_depth(out.forward_fit, out.forward_eval, "forward");
  check_depth(out.backward_fit, out.backward_eval, "backward");

  out.log_p_fwd = out.forward_fit.log_transition_density(out.forward_eval);
  out.log_p_bwd = out.backward_fit.log_transition_density(out.backward_eval);

  BootstrapOptions effective = opts;
  effective.resample_size = std::min(opts.resample_size, n);
  validate_options(effective, n);

  const std::uint64_t boot_seed = derive_seed(seed, kBootstrapStage);
  std::vector<double> stats(effective.n_resamples);
  parallel_for(effective.n_resamples, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(boot_seed, r));
    std::vector<QuadratureSample> resample(effective.resample_size);
    draw_resample(fwd.samples(), rng, resample);
    const double log_fwd = ml_fit(resample).log_transition_density(out.forward_eval);
    draw_resample(bwd.samples(), rng, resample);
    const double log_bwd = ml_fit(resample).log_transition_density(out.backward_eval);
    stats[r] = log_fwd - log_bwd;
  });
  out.estimate = summarize(out.log_p_fwd - out.log_p_bwd, std::move(stats), effective.resample_size);
  return out;
}

}  // namespace microrev::heterodyne
