#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ovtrack/rng.hpp"
#include "ovtrack/types.hpp"

namespace ovtrack {

/// Dense value grid, row-major with interleaved channels:
/// values[(y * width + x) * channels + c].
struct LatentGrid {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> values;

  static LatentGrid filled(int width, int height, int channels, double value);

  std::size_t size() const { return values.size(); }
  double& at(int x, int y, int c) {
    return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double at(int x, int y, int c) const {
    return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  /// Throws InputError unless dimensions are positive, the value count
  /// matches and every value is finite.
  void validate() const;

  bool operator==(const LatentGrid&) const = default;
};

/// Binary foreground weights (fractional values may appear after
/// resampling). Shares the spatial dimensions of the paired grid.
struct ForegroundMask {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // in [0, 1]

  static ForegroundMask zeros(int width, int height);
  static ForegroundMask ones(int width, int height);

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  double& at(int x, int y) {
    return values[static_cast<std::size_t>(y) * width + x];
  }

  bool operator==(const ForegroundMask&) const = default;
};

/// Variance schedule delta_1..delta_K plus the derived per-step and
/// cumulative signal coefficients. Index k is 1-based; higher k means
/// more noise, and alpha_bar(0) == 1.
class NoiseSchedule {
 public:
  explicit NoiseSchedule(std::vector<double> deltas);

  /// delta_k = delta0 * k / steps, a linear ramp ending at delta0.
  static NoiseSchedule linear(double delta0, int steps);

  int steps() const { return static_cast<int>(deltas_.size()); }
  double delta(int k) const;      // k in [1, steps]
  double alpha(int k) const;      // 1 - delta_k
  double alpha_bar(int k) const;  // prod_{i<=k} alpha_i, alpha_bar(0) = 1

 private:
  std::vector<double> deltas_;
  std::vector<double> alpha_bars_;
};

struct HallucConfig {
  double delta0 = 0.75;     // initial noise level
  int steps = 50;           // K
  double eta = 0.02;        // homogenization threshold, 0 < eta < delta0
  double min_area = 64.0 * 64.0;  // foreground box area cutoff, exclusive
  std::uint64_t seed = 0;
  bool deterministic = false;  // zero-variance sampling everywhere

  void validate() const;
};

NoiseSchedule make_schedule(const HallucConfig& cfg);

/// One reverse-step Gaussian: mean grid plus an isotropic stdev.
struct DenoiserOutput {
  LatentGrid mean;
  double stdev = 0.0;
};

/// A pluggable reverse process. `conditioning` is an opaque token passed
/// through from the caller; implementations may ignore it.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual DenoiserOutput reverse(const LatentGrid& x, int k,
                                 const NoiseSchedule& sched,
                                 const std::string& conditioning) const = 0;
};

/// Analytic denoiser: the exact Gaussian posterior of the forward process
/// conditioned on a known clean grid. Its reverse pass reconstructs the
/// target from any starting point, which makes the surrounding loop
/// testable without a learned model.
class ToyDenoiser : public Denoiser {
 public:
  explicit ToyDenoiser(LatentGrid target);
  DenoiserOutput reverse(const LatentGrid& x, int k,
                         const NoiseSchedule& sched,
                         const std::string& conditioning) const override;

  const LatentGrid& target() const { return target_; }

 private:
  LatentGrid target_;
};

/// One forward step: a draw of N(sqrt(1 - delta_k) x, delta_k I).
LatentGrid forward_noise_step(const LatentGrid& x, int k,
                              const NoiseSchedule& sched, Rng& rng,
                              bool zero_variance = false);

/// Closed form of k composed forward steps:
/// N(sqrt(alpha_bar_k) x0, (1 - alpha_bar_k) I). k = 0 returns a copy.
LatentGrid forward_noise_to(const LatentGrid& x0, int k,
                            const NoiseSchedule& sched, Rng& rng,
                            bool zero_variance = false);

/// Observer hook into the denoising loop, fired after each step.
/// `foreground` is non-null during the masked phase and points at the
/// branch that was composited over the mask.
struct DenoiseStepInfo {
  int k = 0;
  double delta = 0.0;
  bool masked_phase = false;
  const LatentGrid* state = nullptr;
  const LatentGrid* foreground = nullptr;
};
using StepObserver = std::function<void(const DenoiseStepInfo&)>;

/// The full inpainting-style loop: noise `ref` up to the top of the
/// schedule, then walk the reverse process down. While the level is above
/// `cfg.eta`, each step also draws the foreground branch from the forward
/// process at the new level and composites it over the mask; below the
/// threshold the remaining steps run unmasked (homogenization).
LatentGrid masked_denoise(const LatentGrid& ref, const ForegroundMask& mask,
                          const Denoiser& denoiser,
                          const NoiseSchedule& sched, const HallucConfig& cfg,
                          Rng& rng, const std::string& conditioning = "",
                          const StepObserver& observer = {});

/// Union of the annotated boxes whose area strictly exceeds `min_area`,
/// rasterized onto a width x height grid. Boxes are clipped to the grid.
ForegroundMask build_positive_mask(const std::vector<Annotation>& annos,
                                   int width, int height, double min_area);

/// Forward affine map (x, y) -> (a x + b y + tx, c x + d y + ty).
struct AffineTransform {
  double a = 1.0, b = 0.0;
  double c = 0.0, d = 1.0;
  double tx = 0.0, ty = 0.0;

  double det() const { return a * d - b * c; }
  AffineTransform inverse() const;  // throws InputError when singular

  static AffineTransform identity() { return {}; }
  static AffineTransform translation(double tx, double ty);
  static AffineTransform rotation_deg(double degrees, double cx, double cy);
};

/// Resamples grid (bilinear) and mask (nearest) under the same affine;
/// regions mapped from outside the source are zero.
std::pair<LatentGrid, ForegroundMask> geometric_transform(
    const LatentGrid& grid, const ForegroundMask& mask,
    const AffineTransform& transform);

}  // namespace ovtrack
