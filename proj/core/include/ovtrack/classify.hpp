#pragma once

#include <span>
#include <vector>

#include "ovtrack/vocabulary.hpp"

namespace ovtrack {

struct ClassifierConfig {
  double temperature = 0.07;  // softmax temperature, > 0
};

/// Training sample for the distillation losses: the predicted text and
/// image embeddings of one proposal, the teacher image embedding, and the
/// proposal's class label (background allowed).
struct DistillSample {
  std::vector<double> text_pred;
  std::vector<double> image_pred;
  std::vector<double> image_teacher;
  int label = kBackgroundClassId;
};

/// Numerically stable softmax of `logits`; entries sum to 1.
std::vector<double> softmax(std::span<const double> logits);

/// Cosine affinities of a query text embedding against the vocabulary.
/// Entry 0 is the background affinity, entry i+1 the i-th class, each in
/// [-1, 1]. Scale of the query does not matter.
std::vector<double> class_affinities(std::span<const double> text_embed,
                                     const ClassVocabulary& vocab);

struct ClassifyResult {
  std::vector<double> probs;  // simplex over [background, classes...]
  int argmax_index = 0;       // position in probs
  int class_id = kBackgroundClassId;

  double confidence() const { return probs[static_cast<std::size_t>(argmax_index)]; }
};

/// Tempered softmax over the affinities; argmax ties break toward the
/// lower index, so background wins a perfect tie.
ClassifyResult classify(std::span<const double> text_embed,
                        const ClassVocabulary& vocab,
                        const ClassifierConfig& cfg);

/// Mean cross-entropy of the tempered affinity softmax against the labels.
double loss_text(const std::vector<DistillSample>& batch,
                 const ClassVocabulary& vocab, const ClassifierConfig& cfg);

/// Mean L1 distance between predicted and teacher image embeddings.
double loss_image(const std::vector<DistillSample>& batch);

}  // namespace ovtrack
