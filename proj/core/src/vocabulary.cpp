#include "ovtrack/vocabulary.hpp"

#include <cmath>
#include <set>

#include "ovtrack/error.hpp"
#include "ovtrack/vecmath.hpp"

namespace ovtrack {

int ClassVocabulary::index_of(int class_id) const {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].class_id == class_id) return static_cast<int>(i);
  }
  return -1;
}

void ClassVocabulary::validate() const {
  const std::size_t d = background_embed.size();
  if (d == 0) throw InputError("vocabulary: empty background embedding");
  if (std::abs(l2_norm(background_embed) - 1.0) > 1e-6) {
    throw InputError("vocabulary: background embedding is not unit-norm");
  }
  std::set<int> seen;
  for (const auto& entry : classes) {
    if (entry.class_id == kBackgroundClassId) {
      throw InputError("vocabulary: class id collides with the background id");
    }
    if (!seen.insert(entry.class_id).second) {
      throw InputError("vocabulary: duplicate class id " +
                       std::to_string(entry.class_id));
    }
    if (entry.embed.size() != d) {
      throw InputError("vocabulary: embedding dimension mismatch for class " +
                       std::to_string(entry.class_id));
    }
    if (std::abs(l2_norm(entry.embed) - 1.0) > 1e-6) {
      throw InputError("vocabulary: embedding of class " +
                       std::to_string(entry.class_id) + " is not unit-norm");
    }
  }
}

}  // namespace ovtrack
