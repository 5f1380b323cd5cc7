#pragma once

#include "ovtrack/metrics.hpp"

namespace ovtrack {

/// Exhaustive-enumeration reference for teta_scores: per-frame matchings
/// are found by full search instead of an assignment solver, and all
/// counting is re-derived with straight-line loops. Only accepts tiny
/// instances (at most 4 tracks per side and 6 distinct frames); larger
/// input throws InputError.
TetaScores brute_force_teta_scores(
    const std::vector<TrackRecord>& preds, const std::vector<Annotation>& gts,
    const TetaConfig& cfg,
    const std::optional<std::set<int>>& class_filter = {});

/// Split-aware wrapper mirroring teta().
TetaReport brute_force_teta(const std::vector<TrackRecord>& preds,
                            const std::vector<Annotation>& gts,
                            const ClassVocabulary& vocab,
                            const TetaConfig& cfg);

}  // namespace ovtrack
