// uplda/plda.h

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

#ifndef UPLDA_PLDA_H_
#define UPLDA_PLDA_H_

#include <Eigen/Dense>
#include <vector>

#include "uplda/embedding.h"

namespace uplda {

struct TrainConfig {
  int em_iterations = 20;
  double variance_floor = 1e-6;
  int d_y = 0;  // speaker-subspace size; 0 means full rank (== embedding dim)
};

/// Linear-Gaussian speaker model held in the basis that simultaneously
/// diagonalizes the between- and within-speaker covariances: a transform A
/// maps a centered embedding into a space where the within covariance is
/// the identity and the between covariance is diag(psi).  Scores and
/// densities are invariant under this change of basis (the Jacobians
/// cancel in likelihood ratios and are tracked for plain densities).
///
/// Per-utterance uncertainty is diagonal in the *original* space only, so
/// uncertainty-propagated scoring maps it through A and works with dense
/// matrices per trial; point-estimate scoring stays fully elementwise.
class PldaModel {
 public:
  PldaModel() = default;

  /// Builds the diagonalized model from original-space covariances.
  /// Within-covariance eigenvalues are floored; between-covariance
  /// eigenvalues beyond d_y (or negative) are set to zero.
  static PldaModel FromCovariances(const Eigen::VectorXd &mean,
                                   const Eigen::MatrixXd &between,
                                   const Eigen::MatrixXd &within, int d_y = 0,
                                   double variance_floor = 1e-6);

  /// Rebuilds a model from stored fields (archive read path).
  static PldaModel FromStored(Eigen::VectorXd mean, Eigen::MatrixXd transform,
                              Eigen::VectorXd between_diag,
                              Eigen::VectorXd within_diag, int d_y);

  Eigen::Index Dim() const { return mean_.size(); }
  int SpeakerDim() const { return d_y_; }

  const Eigen::VectorXd &Mean() const { return mean_; }
  /// Original (centered) -> model basis.
  const Eigen::MatrixXd &Transform() const { return transform_; }
  const Eigen::MatrixXd &InverseTransform() const { return inverse_transform_; }
  /// Between-speaker variances in the model basis (psi), descending.
  const Eigen::VectorXd &BetweenDiag() const { return psi_; }
  /// Within-speaker (residual) variances in the model basis.
  const Eigen::VectorXd &WithinDiag() const { return within_diag_; }
  double LogDetTransform() const { return logdet_transform_; }

  /// Covariances mapped back to the original embedding space.
  Eigen::MatrixXd BetweenCovariance() const;
  Eigen::MatrixXd WithinCovariance() const;
  Eigen::MatrixXd TotalCovariance() const;
  /// A speaker loading matrix F (original space, D x d_y) with
  /// F F^T == BetweenCovariance().
  Eigen::MatrixXd SpeakerLoading() const;

  Eigen::VectorXd ToModelBasis(const Eigen::VectorXd &v) const;
  /// Maps a diagonal original-space covariance into the model basis
  /// (A diag(u) A^T); dense in general.
  Eigen::MatrixXd UncertaintyToModelBasis(const Eigen::VectorXd &diag) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd transform_;          // A
  Eigen::MatrixXd inverse_transform_;  // A^{-1}
  Eigen::VectorXd psi_;                // between diag, zero beyond d_y
  Eigen::VectorXd within_diag_;        // unit after training/construction
  double logdet_transform_ = 0.0;
  int d_y_ = 0;
};

struct TrainResult {
  PldaModel model;
  std::vector<double> loglik;  // total data log-likelihood after each iteration
};

/// Maximum-likelihood EM for the two-covariance model on point estimates
/// (per-utterance uncertainties are ignored during training).  Requires at
/// least two speakers and at least one speaker with two utterances.  The
/// log-likelihood trace is non-decreasing.
TrainResult TrainEm(const LabeledDataset &ds, const TrainConfig &cfg = {});

enum class ScoringMode { kPlda, kUpPlda };

/// Route used for the enrollment-conditioned predictive distribution:
/// through the speaker-subspace posterior, or through total covariances
/// (the two are algebraically identical; both are kept as a cross-check).
enum class PredictiveRoute { kPosterior, kTotalCovariance };

/// Enrollment-conditioned predictive for the same-speaker hypothesis, in
/// the original embedding space.  The full predictive covariance at a test
/// utterance is speaker_cov plus that utterance's within covariance.
struct ConditionalPredictive {
  Eigen::VectorXd mean;         // predictive mean given the enrollment
  Eigen::MatrixXd speaker_cov;  // uncertainty contributed by the speaker posterior
};

ConditionalPredictive ComputeConditionalPredictive(
    const PldaModel &m, const UncertainEmbedding &enroll,
    PredictiveRoute route = PredictiveRoute::kPosterior);

/// Log marginal density of one utterance under the model, including its
/// own uncertainty: N(vec; mean, between + within + uncertainty).
double MarginalLogLik(const PldaModel &m, const UncertainEmbedding &e);

/// Log-likelihood ratio of same-speaker vs different-speaker hypotheses.
/// kPlda ignores the stored uncertainties (the classic scorer); kUpPlda
/// adds each utterance's posterior covariance to the within covariance on
/// its own side.  With zero uncertainties the two modes agree.
double ScoreLlr(const PldaModel &m, const UncertainEmbedding &enroll,
                const UncertainEmbedding &test,
                ScoringMode mode = ScoringMode::kUpPlda,
                PredictiveRoute route = PredictiveRoute::kPosterior);

struct ScoreBatchOptions {
  ScoringMode mode = ScoringMode::kUpPlda;
  PredictiveRoute route = PredictiveRoute::kPosterior;
  int num_threads = 1;
  /// Permit kUpPlda on archives whose files carry no uncertainty; the
  /// stored zeros are used as-is.
  bool assume_zero_uncertainty = false;
};

/// Scores every trial against the archives.  Results are in trial order
/// and bitwise identical to per-trial ScoreLlr calls for any thread count.
/// Unresolved ids raise ValueError naming the trial.
ScoreSet ScoreBatch(const PldaModel &m, const EmbeddingArchive &enroll,
                    const EmbeddingArchive &test, const TrialList &trials,
                    const ScoreBatchOptions &opts = {});

}  // namespace uplda

#endif  // UPLDA_PLDA_H_
