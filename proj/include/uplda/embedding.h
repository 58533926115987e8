// uplda/embedding.h

// Copyright 2026  The uplda Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef UPLDA_EMBEDDING_H_
#define UPLDA_EMBEDDING_H_

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace uplda {

/// Point-estimate speaker embedding.
struct Embedding {
  std::string id;
  Eigen::VectorXd vec;

  Eigen::Index Dim() const { return vec.size(); }
};

/// Embedding plus the diagonal of its posterior covariance.  An all-zero
/// uncertainty encodes a plain point estimate; every downstream op treats
/// the two identically in that case.
struct UncertainEmbedding {
  Embedding base;
  Eigen::VectorXd uncertainty;  // diagonal, variance units; >= 0

  UncertainEmbedding() = default;
  UncertainEmbedding(std::string id, Eigen::VectorXd vec, Eigen::VectorXd unc)
      : base{std::move(id), std::move(vec)}, uncertainty(std::move(unc)) {}

  /// Point estimate with zero uncertainty.
  static UncertainEmbedding Point(std::string id, Eigen::VectorXd vec) {
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(vec.size());
    return UncertainEmbedding(std::move(id), std::move(vec), std::move(zero));
  }

  const std::string &Id() const { return base.id; }
  const Eigen::VectorXd &Vec() const { return base.vec; }
  Eigen::Index Dim() const { return base.vec.size(); }
  bool HasUncertainty() const {
    return uncertainty.size() > 0 && (uncertainty.array() != 0.0).any();
  }
};

/// Training-set container: speaker id -> that speaker's utterances.
struct LabeledDataset {
  std::map<std::string, std::vector<UncertainEmbedding>> speakers;

  int NumSpeakers() const { return static_cast<int>(speakers.size()); }
  int NumUtterances() const {
    int n = 0;
    for (const auto &kv : speakers) n += static_cast<int>(kv.second.size());
    return n;
  }
  /// Dimension of the first utterance; 0 if empty.
  Eigen::Index Dim() const;
};

enum class TrialLabel { kTarget, kNontarget, kUnknown };

/// One enrollment/test comparison.  Ids resolve against an embedding
/// archive at scoring time.
struct Trial {
  std::string enroll_id;
  std::string test_id;
  TrialLabel label = TrialLabel::kUnknown;
};

using TrialList = std::vector<Trial>;

struct ScoredTrial {
  Trial trial;
  double score = 0.0;
};

/// Scores for a trial list, in trial order.
struct ScoreSet {
  std::vector<ScoredTrial> entries;

  int CountLabel(TrialLabel label) const {
    int n = 0;
    for (const auto &e : entries) n += (e.trial.label == label) ? 1 : 0;
    return n;
  }
};

/// In-memory collection of embeddings with id lookup, as read from or
/// written to an archive file.
struct EmbeddingArchive {
  Eigen::Index dim = 0;
  bool has_uncertainty = false;
  std::vector<UncertainEmbedding> items;

  /// Pointer to the embedding with this id, or nullptr.  Builds the index
  /// on first use.
  const UncertainEmbedding *Find(const std::string &id) const;

  void Add(UncertainEmbedding e);

 private:
  mutable std::map<std::string, size_t> index_;
};

/// One problem found by ValidateDataset.
struct ValidationIssue {
  std::string utterance_id;  // empty when the issue is dataset-wide
  std::string field;         // "vector", "uncertainty", "id", "speaker"
  std::string message;
};

/// Diagnostic scan of a dataset; returns all invariant violations (dimension
/// mismatches, non-finite entries, negative variances, duplicate ids, empty
/// speakers).  Never throws; an empty report means the dataset is well formed.
std::vector<ValidationIssue> ValidateDataset(const LabeledDataset &ds);

}  // namespace uplda

#endif  // UPLDA_EMBEDDING_H_
