#include "ovtrack/classify.hpp"

#include <algorithm>
#include <cmath>

#include "ovtrack/error.hpp"
#include "ovtrack/vecmath.hpp"

namespace ovtrack {

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

std::vector<double> class_affinities(std::span<const double> text_embed,
                                     const ClassVocabulary& vocab) {
  if (text_embed.size() != vocab.dim()) {
    throw InputError("class_affinities: query dimension " +
                     std::to_string(text_embed.size()) +
                     " does not match vocabulary dimension " +
                     std::to_string(vocab.dim()));
  }
  std::vector<double> z;
  z.reserve(vocab.classes.size() + 1);
  z.push_back(cosine(text_embed, vocab.background_embed));
  for (const auto& entry : vocab.classes) {
    z.push_back(cosine(text_embed, entry.embed));
  }
  return z;
}

ClassifyResult classify(std::span<const double> text_embed,
                        const ClassVocabulary& vocab,
                        const ClassifierConfig& cfg) {
  if (!(cfg.temperature > 0.0)) {
    throw InputError("classify: temperature must be positive");
  }
  std::vector<double> z = class_affinities(text_embed, vocab);
  for (double& v : z) v /= cfg.temperature;

  ClassifyResult result;
  result.probs = softmax(z);
  result.argmax_index = 0;
  for (std::size_t i = 1; i < result.probs.size(); ++i) {
    if (result.probs[i] > result.probs[static_cast<std::size_t>(
                              result.argmax_index)]) {
      result.argmax_index = static_cast<int>(i);
    }
  }
  result.class_id =
      result.argmax_index == 0
          ? kBackgroundClassId
          : vocab.classes[static_cast<std::size_t>(result.argmax_index - 1)]
                .class_id;
  return result;
}

double loss_text(const std::vector<DistillSample>& batch,
                 const ClassVocabulary& vocab, const ClassifierConfig& cfg) {
  if (batch.empty()) throw InputError("loss_text: empty batch");
  double total = 0.0;
  for (const auto& sample : batch) {
    int index = 0;
    if (sample.label != kBackgroundClassId) {
      const int pos = vocab.index_of(sample.label);
      if (pos < 0) {
        throw InputError("loss_text: label " + std::to_string(sample.label) +
                         " is not in the vocabulary");
      }
      index = pos + 1;
    }
    std::vector<double> z = class_affinities(sample.text_pred, vocab);
    for (double& v : z) v /= cfg.temperature;
    const std::vector<double> probs = softmax(z);
    total += -std::log(probs[static_cast<std::size_t>(index)]);
  }
  return total / static_cast<double>(batch.size());
}

double loss_image(const std::vector<DistillSample>& batch) {
  if (batch.empty()) throw InputError("loss_image: empty batch");
  double total = 0.0;
  for (const auto& sample : batch) {
    if (sample.image_pred.size() != sample.image_teacher.size()) {
      throw InputError("loss_image: prediction/teacher dimension mismatch");
    }
    double l1 = 0.0;
    for (std::size_t i = 0; i < sample.image_pred.size(); ++i) {
      l1 += std::abs(sample.image_pred[i] - sample.image_teacher[i]);
    }
    total += l1;
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace ovtrack
