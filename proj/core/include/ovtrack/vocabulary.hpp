#pragma once

#include <string>
#include <vector>

#include "ovtrack/types.hpp"

namespace ovtrack {

enum class ClassSplit { kBase, kNovel };

struct VocabEntry {
  int class_id = 0;
  std::string name;
  std::vector<double> embed;  // unit-norm text embedding
  ClassSplit split = ClassSplit::kBase;

  bool operator==(const VocabEntry&) const = default;
};

/// The set of classes the tracker can be queried with: one unit-norm text
/// embedding per class plus a background embedding. Class ids are unique
/// and never the reserved background id.
struct ClassVocabulary {
  std::vector<VocabEntry> classes;
  std::vector<double> background_embed;

  /// Position of a class id in `classes`, or -1 when absent.
  int index_of(int class_id) const;

  bool contains(int class_id) const { return index_of(class_id) >= 0; }

  std::size_t dim() const { return background_embed.size(); }

  /// Throws InputError when embeddings disagree in dimension, are not
  /// unit-norm within 1e-6, or ids collide / use the background id.
  void validate() const;

  bool operator==(const ClassVocabulary&) const = default;
};

}  // namespace ovtrack
