#include "ovtrack/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "ovtrack/error.hpp"

namespace ovtrack {

LatentGrid LatentGrid::filled(int width, int height, int channels,
                              double value) {
  LatentGrid grid;
  grid.width = width;
  grid.height = height;
  grid.channels = channels;
  grid.values.assign(
      static_cast<std::size_t>(width) * height * channels, value);
  grid.validate();
  return grid;
}

void LatentGrid::validate() const {
  if (width <= 0 || height <= 0 || channels <= 0) {
    throw InputError("grid: dimensions must be positive");
  }
  if (values.size() != static_cast<std::size_t>(width) * height * channels) {
    throw InputError("grid: value count does not match dimensions");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("grid: non-finite value");
  }
}

ForegroundMask ForegroundMask::zeros(int width, int height) {
  ForegroundMask mask;
  mask.width = width;
  mask.height = height;
  mask.values.assign(static_cast<std::size_t>(width) * height, 0.0);
  return mask;
}

ForegroundMask ForegroundMask::ones(int width, int height) {
  ForegroundMask mask = zeros(width, height);
  std::fill(mask.values.begin(), mask.values.end(), 1.0);
  return mask;
}

NoiseSchedule::NoiseSchedule(std::vector<double> deltas)
    : deltas_(std::move(deltas)) {
  if (deltas_.empty()) throw InputError("schedule: needs at least one step");
  alpha_bars_.reserve(deltas_.size() + 1);
  alpha_bars_.push_back(1.0);
  for (double d : deltas_) {
    if (!(d > 0.0) || !(d < 1.0)) {
      throw InputError("schedule: every delta must lie strictly in (0, 1)");
    }
    alpha_bars_.push_back(alpha_bars_.back() * (1.0 - d));
  }
}

NoiseSchedule NoiseSchedule::linear(double delta0, int steps) {
  if (steps < 1) throw InputError("schedule: steps must be >= 1");
  if (!(delta0 > 0.0) || !(delta0 < 1.0)) {
    throw InputError("schedule: delta0 must lie strictly in (0, 1)");
  }
  std::vector<double> deltas(static_cast<std::size_t>(steps));
  for (int k = 1; k <= steps; ++k) {
    deltas[static_cast<std::size_t>(k - 1)] = delta0 * k / steps;
  }
  return NoiseSchedule(std::move(deltas));
}

double NoiseSchedule::delta(int k) const {
  if (k < 1 || k > steps()) throw InputError("schedule: step index out of range");
  return deltas_[static_cast<std::size_t>(k - 1)];
}

double NoiseSchedule::alpha(int k) const { return 1.0 - delta(k); }

double NoiseSchedule::alpha_bar(int k) const {
  if (k < 0 || k > steps()) throw InputError("schedule: step index out of range");
  return alpha_bars_[static_cast<std::size_t>(k)];
}

void HallucConfig::validate() const {
  if (steps < 1) throw InputError("hallucination: steps must be >= 1");
  if (!(eta > 0.0) || !(eta < delta0) || !(delta0 < 1.0)) {
    throw InputError("hallucination: requires 0 < eta < delta0 < 1");
  }
  if (min_area < 0.0) throw InputError("hallucination: min_area must be >= 0");
}

NoiseSchedule make_schedule(const HallucConfig& cfg) {
  cfg.validate();
  return NoiseSchedule::linear(cfg.delta0, cfg.steps);
}

ToyDenoiser::ToyDenoiser(LatentGrid target) : target_(std::move(target)) {
  target_.validate();
}

DenoiserOutput ToyDenoiser::reverse(const LatentGrid& x, int k,
                                    const NoiseSchedule& sched,
                                    const std::string& /*conditioning*/) const {
  if (x.width != target_.width || x.height != target_.height ||
      x.channels != target_.channels) {
    throw InputError("toy denoiser: grid does not match the target shape");
  }
  // Gaussian posterior of the forward chain given the clean target:
  // mean = c0 * target + ck * x_k, with variance shrinking to 0 at k = 1.
  const double d = sched.delta(k);
  const double a = sched.alpha(k);
  const double ab_prev = sched.alpha_bar(k - 1);
  const double denom = 1.0 - sched.alpha_bar(k);
  const double c0 = std::sqrt(ab_prev) * d / denom;
  const double ck = std::sqrt(a) * (1.0 - ab_prev) / denom;

  DenoiserOutput out;
  out.mean = x;
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    out.mean.values[i] = c0 * target_.values[i] + ck * x.values[i];
  }
  out.stdev = std::sqrt((1.0 - ab_prev) / denom * d);
  return out;
}

LatentGrid forward_noise_step(const LatentGrid& x, int k,
                              const NoiseSchedule& sched, Rng& rng,
                              bool zero_variance) {
  const double d = sched.delta(k);
  const double scale = std::sqrt(1.0 - d);
  const double stdev = std::sqrt(d);
  LatentGrid out = x;
  for (double& v : out.values) {
    v = zero_variance ? scale * v : scale * v + stdev * rng.normal();
  }
  return out;
}

LatentGrid forward_noise_to(const LatentGrid& x0, int k,
                            const NoiseSchedule& sched, Rng& rng,
                            bool zero_variance) {
  if (k == 0) return x0;
  const double ab = sched.alpha_bar(k);
  const double scale = std::sqrt(ab);
  const double stdev = std::sqrt(1.0 - ab);
  LatentGrid out = x0;
  for (double& v : out.values) {
    v = zero_variance ? scale * v : scale * v + stdev * rng.normal();
  }
  return out;
}

namespace {

// mask * fg + (1 - mask) * bg with exact pass-through at the endpoints.
void composite(LatentGrid& state, const LatentGrid& fg,
               const ForegroundMask& mask) {
  for (int y = 0; y < state.height; ++y) {
    for (int x = 0; x < state.width; ++x) {
      const double m = mask.at(x, y);
      for (int c = 0; c < state.channels; ++c) {
        if (m >= 1.0) {
          state.at(x, y, c) = fg.at(x, y, c);
        } else if (m > 0.0) {
          state.at(x, y, c) =
              m * fg.at(x, y, c) + (1.0 - m) * state.at(x, y, c);
        }
      }
    }
  }
}

LatentGrid sample_reverse(const Denoiser& denoiser, const LatentGrid& x, int k,
                          const NoiseSchedule& sched, Rng& rng,
                          bool zero_variance, const std::string& conditioning) {
  DenoiserOutput out = denoiser.reverse(x, k, sched, conditioning);
  if (out.stdev < 0.0) throw InputError("denoiser: negative stdev");
  LatentGrid next = std::move(out.mean);
  if (!zero_variance && out.stdev > 0.0) {
    for (double& v : next.values) v += out.stdev * rng.normal();
  }
  return next;
}

}  // namespace

LatentGrid masked_denoise(const LatentGrid& ref, const ForegroundMask& mask,
                          const Denoiser& denoiser, const NoiseSchedule& sched,
                          const HallucConfig& cfg, Rng& rng,
                          const std::string& conditioning,
                          const StepObserver& observer) {
  ref.validate();
  cfg.validate();
  if (mask.width != ref.width || mask.height != ref.height) {
    throw InputError("masked_denoise: mask does not match the grid shape");
  }

  const int k_top = sched.steps();
  LatentGrid state = forward_noise_to(ref, k_top, sched, rng, cfg.deterministic);

  for (int k = k_top; k >= 1; --k) {
    const double level = sched.delta(k);
    state = sample_reverse(denoiser, state, k, sched, rng, cfg.deterministic,
                           conditioning);
    if (level > cfg.eta) {
      // Masked phase: the foreground branch is the reference, forward
      // noised to the level the reverse step just reached.
      LatentGrid fg =
          forward_noise_to(ref, k - 1, sched, rng, cfg.deterministic);
      composite(state, fg, mask);
      if (observer) observer({k, level, true, &state, &fg});
    } else {
      // Homogenization: plain reverse steps, no branching.
      if (observer) observer({k, level, false, &state, nullptr});
    }
  }
  return state;
}

ForegroundMask build_positive_mask(const std::vector<Annotation>& annos,
                                   int width, int height, double min_area) {
  if (width <= 0 || height <= 0) {
    throw InputError("build_positive_mask: grid dimensions must be positive");
  }
  ForegroundMask mask = ForegroundMask::zeros(width, height);
  for (const auto& anno : annos) {
    if (!(anno.box.area() > min_area)) continue;
    const int x0 = std::max(0, static_cast<int>(std::floor(anno.box.left())));
    const int x1 = std::min(width, static_cast<int>(std::ceil(anno.box.right())));
    const int y0 = std::max(0, static_cast<int>(std::floor(anno.box.top())));
    const int y1 = std::min(height, static_cast<int>(std::ceil(anno.box.bottom())));
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) mask.at(x, y) = 1.0;
    }
  }
  return mask;
}

AffineTransform AffineTransform::inverse() const {
  const double dt = det();
  if (std::abs(dt) < 1e-12) {
    throw InputError("affine: matrix is singular");
  }
  AffineTransform inv;
  inv.a = d / dt;
  inv.b = -b / dt;
  inv.c = -c / dt;
  inv.d = a / dt;
  inv.tx = -(inv.a * tx + inv.b * ty);
  inv.ty = -(inv.c * tx + inv.d * ty);
  return inv;
}

AffineTransform AffineTransform::translation(double tx, double ty) {
  AffineTransform t;
  t.tx = tx;
  t.ty = ty;
  return t;
}

AffineTransform AffineTransform::rotation_deg(double degrees, double cx,
                                              double cy) {
  const double rad = degrees * 3.14159265358979323846 / 180.0;
  const double co = std::cos(rad);
  const double si = std::sin(rad);
  AffineTransform t;
  t.a = co;
  t.b = -si;
  t.c = si;
  t.d = co;
  t.tx = cx - co * cx + si * cy;
  t.ty = cy - si * cx - co * cy;
  return t;
}

std::pair<LatentGrid, ForegroundMask> geometric_transform(
    const LatentGrid& grid, const ForegroundMask& mask,
    const AffineTransform& transform) {
  grid.validate();
  if (mask.width != grid.width || mask.height != grid.height) {
    throw InputError("geometric_transform: mask does not match the grid shape");
  }
  const AffineTransform inv = transform.inverse();

  LatentGrid out_grid = grid;
  std::fill(out_grid.values.begin(), out_grid.values.end(), 0.0);
  ForegroundMask out_mask = ForegroundMask::zeros(mask.width, mask.height);

  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      const double sx = inv.a * x + inv.b * y + inv.tx;
      const double sy = inv.c * x + inv.d * y + inv.ty;

      // Bilinear with zero fill outside the source frame.
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0;
      const double fy = sy - y0;
      for (int c = 0; c < grid.channels; ++c) {
        double acc = 0.0;
        for (int dy = 0; dy <= 1; ++dy) {
          for (int dx = 0; dx <= 1; ++dx) {
            const int px = x0 + dx;
            const int py = y0 + dy;
            if (px < 0 || px >= grid.width || py < 0 || py >= grid.height) {
              continue;
            }
            const double wgt = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
            if (wgt > 0.0) acc += wgt * grid.at(px, py, c);
          }
        }
        out_grid.at(x, y, c) = acc;
      }

      const int nx = static_cast<int>(std::lround(sx));
      const int ny = static_cast<int>(std::lround(sy));
      if (nx >= 0 && nx < mask.width && ny >= 0 && ny < mask.height) {
        out_mask.at(x, y) = mask.at(nx, ny);
      }
    }
  }
  return {std::move(out_grid), std::move(out_mask)};
}

}  // namespace ovtrack
