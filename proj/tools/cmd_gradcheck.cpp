#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "commands.hpp"
#include "ovtrack/error.hpp"
#include "ovtrack/gradcheck.hpp"
#include "ovtrack/rng.hpp"

namespace ovtrack::cli {

namespace {

ContrastiveInstance random_instance(Rng& rng, int max_dim) {
  ContrastiveInstance inst;
  const int dim = rng.uniform_int(2, max_dim);
  inst.anchor = rng.unit_vector(dim);
  const int n_pos = rng.uniform_int(1, 3);
  const int n_neg = rng.uniform_int(0, 5);
  for (int i = 0; i < n_pos; ++i) inst.positives.push_back(rng.unit_vector(dim));
  for (int i = 0; i < n_neg; ++i) inst.negatives.push_back(rng.unit_vector(dim));
  inst.temperature = rng.uniform(0.05, 1.0);
  return inst;
}

AuxPair random_pair(Rng& rng, int max_dim) {
  AuxPair pair;
  const int dim = rng.uniform_int(2, max_dim);
  pair.a = rng.gaussian_vector(dim);
  pair.b = rng.gaussian_vector(dim);
  // Keep clear of the zero-vector singularity.
  pair.a[0] += 2.0;
  pair.b[0] -= 2.0;
  pair.same_identity = rng.bernoulli(0.5);
  return pair;
}

}  // namespace

int run_gradcheck(const GradcheckOptions& opt) {
  if (opt.instances < 1) throw InputError("gradcheck: instances must be >= 1");
  if (opt.dim < 2) throw InputError("gradcheck: dim must be >= 2");

  Rng rng(opt.seed);
  nlohmann::json report;
  report["seed"] = opt.seed;
  report["step"] = opt.step;
  report["instances"] = opt.instances;

  double overall = 0.0;
  if (opt.loss == "track" || opt.loss == "all") {
    double worst = 0.0;
    for (int i = 0; i < opt.instances; ++i) {
      worst = std::max(worst,
                       check_loss_track_gradients(random_instance(rng, opt.dim),
                                                  opt.step));
    }
    report["track"] = {{"max_rel_err", worst}};
    overall = std::max(overall, worst);
    std::printf("loss_track  max relative gradient error: %.3e\n", worst);
  }
  if (opt.loss == "aux" || opt.loss == "all") {
    double worst = 0.0;
    for (int i = 0; i < opt.instances; ++i) {
      worst = std::max(worst,
                       check_loss_aux_gradients(random_pair(rng, opt.dim),
                                                opt.step));
    }
    report["aux"] = {{"max_rel_err", worst}};
    overall = std::max(overall, worst);
    std::printf("loss_aux    max relative gradient error: %.3e\n", worst);
  }
  report["max_rel_err"] = overall;

  if (!opt.report.empty()) {
    std::ofstream out(opt.report, std::ios::trunc);
    if (!out) throw ParseError("cannot open " + opt.report + " for writing");
    out << report.dump(2) << '\n';
  }
  return 0;
}

}  // namespace ovtrack::cli
