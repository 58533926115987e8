// uplda/pooling.h

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

#ifndef UPLDA_POOLING_H_
#define UPLDA_POOLING_H_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "uplda/embedding.h"

namespace uplda {

/// Per-frame hidden-state estimate: mean z_t and the diagonal of its
/// precision L_t.  Precisions must be strictly positive.
struct FrameEstimate {
  Eigen::VectorXd mean;
  Eigen::VectorXd precision;
};

/// Gaussian prior over the latent speaker variable.
struct GaussianPrior {
  Eigen::VectorXd mean;
  Eigen::VectorXd precision;  // diagonal, > 0

  /// Standard prior (zero mean, unit precision).
  static GaussianPrior Standard(Eigen::Index dim) {
    return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
  }
};

/// Pooled posterior over the latent speaker variable: mean and diagonal
/// precision.  Precisions add, so every entry is >= the prior's.
struct PosteriorStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd precision;
};

/// Parameters of the embedding head: a batch-norm layer followed by one
/// affine layer.  bn_scale is the BN affine gain; empty means all-ones.
struct HeadParams {
  Eigen::VectorXd bn_mean;
  Eigen::VectorXd bn_std;   // > 0
  Eigen::MatrixXd weight;   // output_dim x input_dim
  Eigen::VectorXd bias;     // output_dim
  Eigen::VectorXd bn_scale; // input_dim; empty => ones

  Eigen::Index InputDim() const { return weight.cols(); }
  Eigen::Index OutputDim() const { return weight.rows(); }

  /// Elementwise gain applied before the affine layer: bn_scale / bn_std.
  Eigen::VectorXd Gain() const;

  /// Pass-through head (unit BN, identity affine).
  static HeadParams Identity(Eigen::Index dim);
};

/// Precision-weighted pooling of frame estimates with a conjugate Gaussian
/// prior.  The pooled precision is the sum of the frame precisions plus the
/// prior precision; the pooled mean is the precision-weighted average of
/// frame means and the prior mean.  With no frames the prior is returned
/// unchanged.
PosteriorStats PoolPosterior(const std::vector<FrameEstimate> &frames,
                             const GaussianPrior &prior);

/// Pushes the pooled posterior through the head.  The point estimate is the
/// head applied to the posterior mean; the returned uncertainty is the
/// diagonal of the propagated covariance W diag(q^2 / L_s) W^T (q the BN
/// gain).  Use PropagateThroughHeadFull for the full matrix.
UncertainEmbedding PropagateThroughHead(const PosteriorStats &post,
                                        const HeadParams &head,
                                        std::string id = "");

/// Full propagated covariance W diag(q^2 / L_s) W^T.
Eigen::MatrixXd PropagateThroughHeadFull(const PosteriorStats &post,
                                         const HeadParams &head);

}  // namespace uplda

#endif  // UPLDA_POOLING_H_
