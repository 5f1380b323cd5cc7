#include "ovtrack/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "ovtrack/error.hpp"

namespace ovtrack {

double finite_diff_check(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> point, std::span<const double> analytic_grad,
    double step) {
  if (!(step > 0.0)) throw InputError("finite_diff_check: step must be > 0");
  if (point.size() != analytic_grad.size()) {
    throw InputError("finite_diff_check: gradient/point size mismatch");
  }
  std::vector<double> x(point.begin(), point.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double save = x[i];
    x[i] = save + step;
    const double fp = f(x);
    x[i] = save - step;
    const double fm = f(x);
    x[i] = save;
    const double fd = (fp - fm) / (2.0 * step);
    const double denom = std::max(1.0, std::abs(analytic_grad[i]));
    worst = std::max(worst, std::abs(fd - analytic_grad[i]) / denom);
  }
  return worst;
}

namespace {

std::vector<double> flatten(const ContrastiveInstance& inst) {
  std::vector<double> flat(inst.anchor);
  for (const auto& p : inst.positives) flat.insert(flat.end(), p.begin(), p.end());
  for (const auto& n : inst.negatives) flat.insert(flat.end(), n.begin(), n.end());
  return flat;
}

ContrastiveInstance unflatten(const ContrastiveInstance& like,
                              std::span<const double> flat) {
  ContrastiveInstance inst = like;
  std::size_t off = 0;
  const std::size_t d = like.anchor.size();
  std::copy_n(flat.begin() + off, d, inst.anchor.begin());
  off += d;
  for (auto& p : inst.positives) {
    std::copy_n(flat.begin() + off, d, p.begin());
    off += d;
  }
  for (auto& n : inst.negatives) {
    std::copy_n(flat.begin() + off, d, n.begin());
    off += d;
  }
  return inst;
}

}  // namespace

double check_loss_track_gradients(const ContrastiveInstance& inst,
                                  double step) {
  const TrackLossGradients grads = grad_loss_track(inst);
  std::vector<double> flat_grad(grads.anchor);
  for (const auto& p : grads.positives) {
    flat_grad.insert(flat_grad.end(), p.begin(), p.end());
  }
  for (const auto& n : grads.negatives) {
    flat_grad.insert(flat_grad.end(), n.begin(), n.end());
  }
  const std::vector<double> point = flatten(inst);
  return finite_diff_check(
      [&inst](std::span<const double> x) {
        return instance_loss_track(unflatten(inst, x));
      },
      point, flat_grad, step);
}

double check_loss_aux_gradients(const AuxPair& pair, double step) {
  const AuxPairGradients grads = grad_loss_aux(pair);
  std::vector<double> flat_grad(grads.a);
  flat_grad.insert(flat_grad.end(), grads.b.begin(), grads.b.end());
  std::vector<double> point(pair.a);
  point.insert(point.end(), pair.b.begin(), pair.b.end());
  const std::size_t d = pair.a.size();
  return finite_diff_check(
      [&pair, d](std::span<const double> x) {
        AuxPair p = pair;
        std::copy_n(x.begin(), d, p.a.begin());
        std::copy_n(x.begin() + d, d, p.b.begin());
        return loss_aux({p});
      },
      point, flat_grad, step);
}

}  // namespace ovtrack
