#pragma once

#include <vector>

namespace ovtrack {

/// One anchor embedding with its same-identity positives and
/// different-identity negatives.
struct ContrastiveInstance {
  std::vector<double> anchor;
  std::vector<std::vector<double>> positives;  // non-empty
  std::vector<std::vector<double>> negatives;
  double temperature = 0.07;
};

struct AuxPair {
  std::vector<double> a;
  std::vector<double> b;
  bool same_identity = false;
};

struct LossWeights {
  double w_track = 0.25;
  double w_aux = 1.0;
};

/// Mean over positives of exp(anchor . positive / temperature).
double pos_d(const ContrastiveInstance& inst);

/// Multi-positive contrastive loss of a single instance: the average over
/// positives of -log( exp(a.p/t) / (pos_d + sum_neg exp(a.n/t)) ).
double instance_loss_track(const ContrastiveInstance& inst);

/// Sum of instance losses over the batch; `batch_average` divides by the
/// batch size instead.
double loss_track(const std::vector<ContrastiveInstance>& batch,
                  bool batch_average = false);

/// Mean over pairs of (cosine - e)^2 where e is 1 for same identity.
double loss_aux(const std::vector<AuxPair>& pairs);

struct TrackLossGradients {
  std::vector<double> anchor;
  std::vector<std::vector<double>> positives;
  std::vector<std::vector<double>> negatives;
};

/// Analytic gradient of instance_loss_track with respect to the anchor and
/// every positive/negative embedding.
TrackLossGradients grad_loss_track(const ContrastiveInstance& inst);

struct AuxPairGradients {
  std::vector<double> a;
  std::vector<double> b;
};

/// Analytic gradient of the single-pair auxiliary loss (cosine - e)^2.
AuxPairGradients grad_loss_aux(const AuxPair& pair);

}  // namespace ovtrack
