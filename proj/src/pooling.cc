// uplda/pooling.cc

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

#include "uplda/pooling.h"

#include "uplda/errors.h"

namespace uplda {

Eigen::VectorXd HeadParams::Gain() const {
  if (bn_scale.size() == 0) return bn_std.cwiseInverse();
  if (bn_scale.size() != bn_std.size())
    throw DimensionError("head: bn_scale and bn_std sizes differ");
  return bn_scale.cwiseQuotient(bn_std);
}

HeadParams HeadParams::Identity(Eigen::Index dim) {
  HeadParams h;
  h.bn_mean = Eigen::VectorXd::Zero(dim);
  h.bn_std = Eigen::VectorXd::Ones(dim);
  h.weight = Eigen::MatrixXd::Identity(dim, dim);
  h.bias = Eigen::VectorXd::Zero(dim);
  return h;
}

namespace {

void CheckPrecision(const Eigen::VectorXd &p, const char *what) {
  if (!p.allFinite() || (p.array() <= 0.0).any())
    throw ValueError(std::string(what) + ": precision entries must be positive and finite");
}

}  // namespace

PosteriorStats PoolPosterior(const std::vector<FrameEstimate> &frames,
                             const GaussianPrior &prior) {
  const Eigen::Index dim = prior.mean.size();
  if (prior.precision.size() != dim)
    throw DimensionError("pool: prior mean/precision sizes differ");
  CheckPrecision(prior.precision, "pool prior");

  Eigen::VectorXd precision = prior.precision;
  Eigen::VectorXd weighted = prior.precision.cwiseProduct(prior.mean);
  for (const FrameEstimate &f : frames) {
    if (f.mean.size() != dim || f.precision.size() != dim)
      throw DimensionError("pool: frame dimension does not match prior");
    CheckPrecision(f.precision, "pool frame");
    precision += f.precision;
    weighted += f.precision.cwiseProduct(f.mean);
  }
  return {weighted.cwiseQuotient(precision), std::move(precision)};
}

UncertainEmbedding PropagateThroughHead(const PosteriorStats &post,
                                        const HeadParams &head,
                                        std::string id) {
  const Eigen::VectorXd q = head.Gain();
  const Eigen::Index in = head.InputDim();
  if (post.mean.size() != in || post.precision.size() != in ||
      head.bn_mean.size() != in || q.size() != in ||
      head.bias.size() != head.OutputDim())
    throw DimensionError("head: shapes inconsistent with pooled posterior");
  if ((head.bn_std.array() <= 0.0).any())
    throw ValueError("head: bn_std entries must be positive");
  CheckPrecision(post.precision, "head input");

  Eigen::VectorXd point =
      head.weight * (post.mean - head.bn_mean).cwiseProduct(q) + head.bias;
  // diag(W diag(v) W^T) = (W.^2) v with v = q^2 / L_s.
  Eigen::VectorXd v = q.array().square() / post.precision.array();
  Eigen::VectorXd diag = head.weight.array().square().matrix() * v;
  return UncertainEmbedding(std::move(id), std::move(point), std::move(diag));
}

Eigen::MatrixXd PropagateThroughHeadFull(const PosteriorStats &post,
                                         const HeadParams &head) {
  const Eigen::VectorXd q = head.Gain();
  if (post.precision.size() != head.InputDim())
    throw DimensionError("head: posterior dimension does not match head input");
  CheckPrecision(post.precision, "head input");
  Eigen::VectorXd v = q.array().square() / post.precision.array();
  return head.weight * v.asDiagonal() * head.weight.transpose();
}

}  // namespace uplda
