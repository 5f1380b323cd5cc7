#include "ovtrack/contrastive.hpp"

#include <cmath>

#include "ovtrack/error.hpp"
#include "ovtrack/vecmath.hpp"

namespace ovtrack {

namespace {

void check_instance(const ContrastiveInstance& inst) {
  if (inst.positives.empty()) {
    throw InputError("contrastive: instance needs at least one positive");
  }
  if (!(inst.temperature > 0.0)) {
    throw InputError("contrastive: temperature must be positive");
  }
  const std::size_t d = inst.anchor.size();
  for (const auto& p : inst.positives) {
    if (p.size() != d) throw InputError("contrastive: positive dimension mismatch");
  }
  for (const auto& n : inst.negatives) {
    if (n.size() != d) throw InputError("contrastive: negative dimension mismatch");
  }
}

}  // namespace

double pos_d(const ContrastiveInstance& inst) {
  check_instance(inst);
  double sum = 0.0;
  for (const auto& p : inst.positives) {
    sum += std::exp(dot(inst.anchor, p) / inst.temperature);
  }
  return sum / static_cast<double>(inst.positives.size());
}

double instance_loss_track(const ContrastiveInstance& inst) {
  check_instance(inst);
  const double denom_pos = pos_d(inst);
  double denom = denom_pos;
  for (const auto& n : inst.negatives) {
    denom += std::exp(dot(inst.anchor, n) / inst.temperature);
  }
  double loss = 0.0;
  for (const auto& p : inst.positives) {
    const double num = std::exp(dot(inst.anchor, p) / inst.temperature);
    loss += -std::log(num / denom);
  }
  return loss / static_cast<double>(inst.positives.size());
}

double loss_track(const std::vector<ContrastiveInstance>& batch,
                  bool batch_average) {
  if (batch.empty()) throw InputError("loss_track: empty batch");
  double total = 0.0;
  for (const auto& inst : batch) total += instance_loss_track(inst);
  if (batch_average) total /= static_cast<double>(batch.size());
  return total;
}

double loss_aux(const std::vector<AuxPair>& pairs) {
  if (pairs.empty()) throw InputError("loss_aux: empty batch");
  double total = 0.0;
  for (const auto& pair : pairs) {
    const double c = cosine(pair.a, pair.b);
    const double e = pair.same_identity ? 1.0 : 0.0;
    total += (c - e) * (c - e);
  }
  return total / static_cast<double>(pairs.size());
}

TrackLossGradients grad_loss_track(const ContrastiveInstance& inst) {
  check_instance(inst);
  const std::size_t d = inst.anchor.size();
  const std::size_t m = inst.positives.size();
  const double t = inst.temperature;

  // With a_j = q.p_j/t and b_i = q.n_i/t the loss is
  //   log(D) - mean_j a_j,  D = mean_j exp(a_j) + sum_i exp(b_i),
  // so dL/da_j = (exp(a_j)/m)/D - 1/m and dL/db_i = exp(b_i)/D.
  std::vector<double> exp_pos(m);
  double denom = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    exp_pos[j] = std::exp(dot(inst.anchor, inst.positives[j]) / t);
    denom += exp_pos[j] / static_cast<double>(m);
  }
  std::vector<double> exp_neg(inst.negatives.size());
  for (std::size_t i = 0; i < inst.negatives.size(); ++i) {
    exp_neg[i] = std::exp(dot(inst.anchor, inst.negatives[i]) / t);
    denom += exp_neg[i];
  }

  TrackLossGradients grads;
  grads.anchor.assign(d, 0.0);
  grads.positives.assign(m, std::vector<double>(d, 0.0));
  grads.negatives.assign(inst.negatives.size(), std::vector<double>(d, 0.0));

  for (std::size_t j = 0; j < m; ++j) {
    const double da = (exp_pos[j] / static_cast<double>(m) / denom - 1.0 /
                       static_cast<double>(m)) / t;
    for (std::size_t k = 0; k < d; ++k) {
      grads.anchor[k] += da * inst.positives[j][k];
      grads.positives[j][k] = da * inst.anchor[k];
    }
  }
  for (std::size_t i = 0; i < inst.negatives.size(); ++i) {
    const double db = (exp_neg[i] / denom) / t;
    for (std::size_t k = 0; k < d; ++k) {
      grads.anchor[k] += db * inst.negatives[i][k];
      grads.negatives[i][k] = db * inst.anchor[k];
    }
  }
  return grads;
}

AuxPairGradients grad_loss_aux(const AuxPair& pair) {
  const double na = l2_norm(pair.a);
  const double nb = l2_norm(pair.b);
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw InputError("grad_loss_aux: zero vector");
  }
  const std::size_t d = pair.a.size();
  if (pair.b.size() != d) throw InputError("grad_loss_aux: dimension mismatch");

  const double c = dot(pair.a, pair.b) / (na * nb);
  const double e = pair.same_identity ? 1.0 : 0.0;
  const double scale = 2.0 * (c - e);

  AuxPairGradients grads;
  grads.a.assign(d, 0.0);
  grads.b.assign(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    const double ah = pair.a[k] / na;
    const double bh = pair.b[k] / nb;
    grads.a[k] = scale * (bh - c * ah) / na;
    grads.b[k] = scale * (ah - c * bh) / nb;
  }
  return grads;
}

}  // namespace ovtrack
