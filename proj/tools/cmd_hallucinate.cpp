#include <cstdio>

#include "commands.hpp"
#include "ovtrack/diffusion.hpp"
#include "ovtrack/io.hpp"
#include "ovtrack/rng.hpp"

namespace ovtrack::cli {

int run_hallucinate(const HallucinateOptions& opt) {
  const LatentGrid input = read_grid(opt.input);
  ForegroundMask mask = opt.mask.empty()
                            ? ForegroundMask::zeros(input.width, input.height)
                            : read_mask(opt.mask);

  HallucConfig cfg;
  cfg.delta0 = opt.delta0;
  cfg.steps = opt.steps;
  cfg.eta = opt.eta;
  cfg.seed = opt.seed;
  cfg.deterministic = opt.deterministic;
  cfg.validate();

  // The built-in denoiser is the analytic posterior anchored at the input
  // itself; swap in a learned model by linking against the library.
  const ToyDenoiser denoiser(input);
  const NoiseSchedule sched = make_schedule(cfg);
  Rng rng(cfg.seed);

  const LatentGrid out =
      masked_denoise(input, mask, denoiser, sched, cfg, rng, opt.caption);
  write_grid(opt.out, out);
  std::printf("wrote %s (%dx%dx%d)\n", opt.out.c_str(), out.width, out.height,
              out.channels);
  return 0;
}

}  // namespace ovtrack::cli
