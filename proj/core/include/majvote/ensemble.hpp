#pragma once

// Hard majority voting over trained learners.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "majvote/learners.hpp"
#include "majvote/vectorize.hpp"

namespace majvote {

/// Range of a member's training scores, used to put heterogeneous scores on a
/// common [0,1] scale when breaking ties.
struct ScoreRange {
  double min = 0.0;
  double max = 1.0;

  double normalize(double s) const;
  bool operator==(const ScoreRange&) const = default;
};

struct EnsembleMember {
  std::string name;
  std::shared_ptr<const TrainedLearner> learner;
  FeatureKind kind = FeatureKind::kTfidf;
  ScoreRange range;
};

/// Members share one feature width. The members' own feature kinds decide
/// which encoding of a document each one reads.
struct Ensemble {
  std::vector<EnsembleMember> members;

  std::size_t feature_width() const;
  /// Throws DataError when empty or widths disagree.
  void check() const;
};

/// A document encoded both ways so mixed-kind ensembles can be evaluated.
struct DocumentFeatures {
  SparseVector counts;
  SparseVector tfidf;

  const SparseVector& get(FeatureKind kind) const {
    return kind == FeatureKind::kCount ? counts : tfidf;
  }
};

struct VotedPrediction {
  int label = 0;
  std::vector<int> votes;
  double vote_fraction = 0.0;
  bool tie_broken = false;
};

/// Mode of binary votes; (label, tie_broken). An even split resolves to 1
/// here; ensemble_predict refines ties with member scores.
std::pair<int, bool> majority_vote(std::span<const int> votes);

/// Resolves already-collected votes. On an exact tie the class whose voters
/// have the higher mean normalized confidence wins (confidence = normalized
/// score for a 1-vote, 1 - normalized score for a 0-vote); an exact
/// confidence tie goes to class 1. `scores`, when given, are raw member
/// scores aligned with the votes.
VotedPrediction resolve_votes(const Ensemble& ens, std::vector<int> votes,
                              std::optional<std::span<const double>> scores);

/// Every member reads `x`.
VotedPrediction ensemble_predict(const Ensemble& ens, const SparseVector& x,
                                 std::optional<std::span<const double>> scores = std::nullopt);

/// Each member reads the encoding matching its feature kind.
VotedPrediction ensemble_predict(const Ensemble& ens, const DocumentFeatures& x,
                                 std::optional<std::span<const double>> scores = std::nullopt);

/// Sets each member's score range to the min/max of its scores on `rows`.
void calibrate_score_ranges(Ensemble& ens, std::span<const DocumentFeatures> rows);

}  // namespace majvote
