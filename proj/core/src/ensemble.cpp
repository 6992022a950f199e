#include "majvote/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "majvote/error.hpp"

namespace majvote {

double ScoreRange::normalize(double s) const {
  if (!(max > min)) return 0.5;
  return std::clamp((s - min) / (max - min), 0.0, 1.0);
}

std::size_t Ensemble::feature_width() const {
  return members.empty() ? 0 : members.front().learner->feature_width;
}

void Ensemble::check() const {
  if (members.empty()) throw DataError("ensemble has no members");
  for (const EnsembleMember& m : members) {
    if (!m.learner) throw DataError("ensemble member '" + m.name + "' has no model");
    if (m.learner->feature_width != feature_width()) {
      throw DataError("ensemble member '" + m.name + "' has feature width " +
                      std::to_string(m.learner->feature_width) + ", expected " +
                      std::to_string(feature_width()));
    }
  }
}

std::pair<int, bool> majority_vote(std::span<const int> votes) {
  if (votes.empty()) throw DataError("majority vote over an empty vote list");
  std::size_t ones = 0;
  for (int v : votes) {
    if (v != 0 && v != 1) throw DataError("votes must be 0 or 1");
    ones += static_cast<std::size_t>(v);
  }
  const std::size_t zeros = votes.size() - ones;
  if (ones == zeros) return {1, true};
  return {ones > zeros ? 1 : 0, false};
}

VotedPrediction resolve_votes(const Ensemble& ens, std::vector<int> votes,
                              std::optional<std::span<const double>> scores) {
  VotedPrediction out;
  const auto [label, tie] = majority_vote(votes);
  out.label = label;
  out.tie_broken = tie;
  out.vote_fraction =
      static_cast<double>(std::count(votes.begin(), votes.end(), 1)) /
      static_cast<double>(votes.size());
  if (tie && scores && scores->size() == votes.size() &&
      ens.members.size() == votes.size()) {
    double confidence[2] = {0.0, 0.0};
    std::size_t voters[2] = {0, 0};
    for (std::size_t j = 0; j < votes.size(); ++j) {
      const double n = ens.members[j].range.normalize((*scores)[j]);
      const int v = votes[j];
      confidence[v] += v == 1 ? n : 1.0 - n;
      ++voters[v];
    }
    const double mean0 = confidence[0] / static_cast<double>(voters[0]);
    const double mean1 = confidence[1] / static_cast<double>(voters[1]);
    out.label = mean0 > mean1 ? 0 : 1;
  }
  out.votes = std::move(votes);
  return out;
}

namespace {

template <class InputFor>
VotedPrediction predict_with(const Ensemble& ens, InputFor input_for,
                             std::optional<std::span<const double>> scores) {
  ens.check();
  std::vector<int> votes(ens.members.size());
  std::vector<double> computed;
  if (!scores) computed.resize(ens.members.size());
  for (std::size_t j = 0; j < ens.members.size(); ++j) {
    const EnsembleMember& m = ens.members[j];
    const double s = scores ? (*scores)[j] : score(*m.learner, input_for(m));
    if (!scores) computed[j] = s;
    votes[j] = s > decision_threshold(m.learner->family) ? 1 : 0;
  }
  if (scores) return resolve_votes(ens, std::move(votes), scores);
  return resolve_votes(ens, std::move(votes), std::span<const double>(computed));
}

}  // namespace

VotedPrediction ensemble_predict(const Ensemble& ens, const SparseVector& x,
                                 std::optional<std::span<const double>> scores) {
  if (scores && scores->size() != ens.members.size()) {
    throw DataError("score list length does not match the ensemble size");
  }
  return predict_with(
      ens, [&x](const EnsembleMember&) -> const SparseVector& { return x; }, scores);
}

VotedPrediction ensemble_predict(const Ensemble& ens, const DocumentFeatures& x,
                                 std::optional<std::span<const double>> scores) {
  if (scores && scores->size() != ens.members.size()) {
    throw DataError("score list length does not match the ensemble size");
  }
  return predict_with(
      ens, [&x](const EnsembleMember& m) -> const SparseVector& { return x.get(m.kind); },
      scores);
}

void calibrate_score_ranges(Ensemble& ens, std::span<const DocumentFeatures> rows) {
  for (EnsembleMember& m : ens.members) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const DocumentFeatures& row : rows) {
      const double s = score(*m.learner, row.get(m.kind));
      if (!std::isfinite(s)) continue;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    m.range = lo <= hi ? ScoreRange{lo, hi} : ScoreRange{};
  }
}

}  // namespace majvote
