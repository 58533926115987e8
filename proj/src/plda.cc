// uplda/plda.cc

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

#include "uplda/plda.h"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

#include "uplda/errors.h"
#include "uplda/parallel.h"

namespace uplda {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// log N(x; mean, diag(var))
double LogDensityDiag(const Eigen::VectorXd &x, const Eigen::VectorXd &mean,
                      const Eigen::VectorXd &var) {
  double logdet = var.array().log().sum();
  double quad = ((x - mean).array().square() / var.array()).sum();
  return -0.5 * (logdet + quad + static_cast<double>(x.size()) * kLog2Pi);
}

Eigen::LLT<Eigen::MatrixXd> CholeskyOrThrow(const Eigen::MatrixXd &cov,
                                            const char *what) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw SingularError(std::string(what) + ": covariance is not positive definite");
  return llt;
}

// log N(x; mean, cov) with cov pre-factored
double LogDensityDense(const Eigen::VectorXd &x, const Eigen::VectorXd &mean,
                       const Eigen::LLT<Eigen::MatrixXd> &llt) {
  const auto &L = llt.matrixL();
  double logdet = 2.0 * Eigen::MatrixXd(L).diagonal().array().log().sum();
  Eigen::VectorXd half = L.solve(x - mean);
  return -0.5 * (logdet + half.squaredNorm() + static_cast<double>(x.size()) * kLog2Pi);
}

// Eigendecomposition with eigenvalues sorted descending.
void SortedEig(const Eigen::MatrixXd &sym, Eigen::VectorXd *values,
               Eigen::MatrixXd *vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw SingularError("eigendecomposition failed");
  const Eigen::Index n = sym.rows();
  values->resize(n);
  vectors->resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    (*values)(i) = eig.eigenvalues()(n - 1 - i);
    vectors->col(i) = eig.eigenvectors().col(n - 1 - i);
  }
}

// Floors the eigenvalues of a symmetric matrix in place.
void FloorEigenvalues(Eigen::MatrixXd *sym, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(*sym);
  if (eig.info() != Eigen::Success) throw SingularError("eigendecomposition failed");
  if (eig.eigenvalues().minCoeff() >= floor) return;
  Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(floor);
  *sym = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

PldaModel PldaModel::FromCovariances(const Eigen::VectorXd &mean,
                                     const Eigen::MatrixXd &between,
                                     const Eigen::MatrixXd &within, int d_y,
                                     double variance_floor) {
  const Eigen::Index dim = mean.size();
  if (between.rows() != dim || between.cols() != dim || within.rows() != dim ||
      within.cols() != dim)
    throw DimensionError("model covariances do not match mean dimension");
  if (d_y <= 0 || d_y > dim) d_y = static_cast<int>(dim);

  // Whiten the within covariance: T1 = D^{-1/2} V^T with W = V D V^T.
  Eigen::VectorXd wvals;
  Eigen::MatrixXd wvecs;
  SortedEig(within, &wvals, &wvecs);
  wvals = wvals.cwiseMax(variance_floor);
  Eigen::MatrixXd t1 =
      wvals.array().rsqrt().matrix().asDiagonal() * wvecs.transpose();

  // Diagonalize the whitened between covariance.
  Eigen::MatrixXd projected = t1 * between * t1.transpose();
  projected = 0.5 * (projected + projected.transpose());
  Eigen::VectorXd psi;
  Eigen::MatrixXd u;
  SortedEig(projected, &psi, &u);
  psi = psi.cwiseMax(0.0);
  for (Eigen::Index i = d_y; i < dim; ++i) psi(i) = 0.0;

  PldaModel m;
  m.mean_ = mean;
  m.transform_ = u.transpose() * t1;
  m.inverse_transform_ = wvecs * wvals.array().sqrt().matrix().asDiagonal() * u;
  m.psi_ = psi;
  m.within_diag_ = Eigen::VectorXd::Ones(dim);
  m.logdet_transform_ = -0.5 * wvals.array().log().sum();
  m.d_y_ = d_y;
  return m;
}

PldaModel PldaModel::FromStored(Eigen::VectorXd mean, Eigen::MatrixXd transform,
                                Eigen::VectorXd between_diag,
                                Eigen::VectorXd within_diag, int d_y) {
  const Eigen::Index dim = mean.size();
  if (transform.rows() != dim || transform.cols() != dim ||
      between_diag.size() != dim || within_diag.size() != dim)
    throw DimensionError("stored model fields are inconsistent");
  if (d_y <= 0 || d_y > dim) d_y = static_cast<int>(dim);

  PldaModel m;
  m.mean_ = std::move(mean);
  m.transform_ = std::move(transform);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m.transform_);
  m.inverse_transform_ = lu.inverse();
  m.logdet_transform_ = lu.matrixLU().diagonal().array().abs().log().sum();
  m.psi_ = std::move(between_diag);
  m.within_diag_ = std::move(within_diag);
  m.d_y_ = d_y;
  return m;
}

Eigen::MatrixXd PldaModel::BetweenCovariance() const {
  return inverse_transform_ * psi_.asDiagonal() * inverse_transform_.transpose();
}

Eigen::MatrixXd PldaModel::WithinCovariance() const {
  return inverse_transform_ * within_diag_.asDiagonal() *
         inverse_transform_.transpose();
}

Eigen::MatrixXd PldaModel::TotalCovariance() const {
  return inverse_transform_ * (psi_ + within_diag_).asDiagonal() *
         inverse_transform_.transpose();
}

Eigen::MatrixXd PldaModel::SpeakerLoading() const {
  Eigen::MatrixXd f(Dim(), d_y_);
  for (int j = 0; j < d_y_; ++j)
    f.col(j) = inverse_transform_.col(j) * std::sqrt(psi_(j));
  return f;
}

Eigen::VectorXd PldaModel::ToModelBasis(const Eigen::VectorXd &v) const {
  if (v.size() != Dim()) throw DimensionError("embedding dimension does not match model");
  return transform_ * (v - mean_);
}

Eigen::MatrixXd PldaModel::UncertaintyToModelBasis(const Eigen::VectorXd &diag) const {
  if (diag.size() != Dim())
    throw DimensionError("uncertainty dimension does not match model");
  return transform_ * diag.cwiseMax(0.0).asDiagonal() * transform_.transpose();
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {

struct SpeakerStats {
  int count = 0;
  Eigen::VectorXd mean;
};

}  // namespace

TrainResult TrainEm(const LabeledDataset &ds, const TrainConfig &cfg) {
  if (cfg.em_iterations < 1) throw ValueError("em_iterations must be >= 1");
  if (cfg.variance_floor <= 0.0) throw ValueError("variance_floor must be > 0");
  if (ds.NumSpeakers() < 2)
    throw ValueError("training requires at least two speakers "
                     "(between-speaker covariance unidentifiable)");

  const Eigen::Index dim = ds.Dim();
  if (dim == 0) throw ValueError("training dataset is empty");

  // Sufficient statistics: per-speaker counts and means, pooled
  // within-speaker scatter.
  std::vector<SpeakerStats> speakers;
  speakers.reserve(ds.speakers.size());
  Eigen::MatrixXd within_scatter = Eigen::MatrixXd::Zero(dim, dim);
  int num_utts = 0;
  bool any_multi = false;
  for (const auto &[spk, utts] : ds.speakers) {
    if (utts.empty()) throw ValueError("speaker '" + spk + "' has no utterances");
    SpeakerStats st;
    st.count = static_cast<int>(utts.size());
    st.mean = Eigen::VectorXd::Zero(dim);
    for (const auto &u : utts) {
      if (u.Dim() != dim)
        throw DimensionError("utterance '" + u.Id() + "' has mismatched dimension");
      st.mean += u.Vec();
    }
    st.mean /= st.count;
    for (const auto &u : utts) {
      Eigen::VectorXd d = u.Vec() - st.mean;
      within_scatter.noalias() += d * d.transpose();
    }
    num_utts += st.count;
    any_multi = any_multi || st.count > 1;
    speakers.push_back(std::move(st));
  }
  if (!any_multi)
    throw ValueError("training requires a speaker with at least two utterances");

  const int num_speakers = static_cast<int>(speakers.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const auto &st : speakers) mean += st.mean;
  mean /= num_speakers;

  // Total scatter around the global mean, used for initialization and the
  // degeneracy guard.
  Eigen::MatrixXd total = within_scatter;
  for (const auto &st : speakers) {
    Eigen::VectorXd d = st.mean - mean;
    total.noalias() += st.count * d * d.transpose();
  }
  total /= num_utts;
  if (total.diagonal().maxCoeff() < cfg.variance_floor)
    throw SingularError("degenerate training data: total variance below the floor");

  Eigen::MatrixXd within = 0.5 * total;
  Eigen::MatrixXd between = 0.5 * total;
  FloorEigenvalues(&within, cfg.variance_floor);
  FloorEigenvalues(&between, cfg.variance_floor);

  /**
     Each EM iteration treats the speaker offset y_c ~ N(0, B) as the latent
     variable.  For a speaker with n utterances and (centered) sample mean
     m, the posterior of y_c is Gaussian with covariance
         P = (B^{-1} + n W^{-1})^{-1}
     and mean w = P n W^{-1} m.  The between stats accumulate E[y y^T] =
     P + w w^T per speaker; the within stats accumulate the pooled
     within-speaker scatter plus n E[(m - y)(m - y)^T] = n (P + (m-w)(m-w)^T),
     which is one sample's worth of W since m | y ~ N(y, W/n).
   */
  const int n_iters = cfg.em_iterations;
  std::vector<double> loglik;
  loglik.reserve(n_iters);
  for (int iter = 0; iter < n_iters; ++iter) {
    Eigen::LLT<Eigen::MatrixXd> llt_b = CholeskyOrThrow(between, "EM between covariance");
    Eigen::LLT<Eigen::MatrixXd> llt_w = CholeskyOrThrow(within, "EM within covariance");
    Eigen::MatrixXd b_inv = llt_b.solve(Eigen::MatrixXd::Identity(dim, dim));
    Eigen::MatrixXd w_inv = llt_w.solve(Eigen::MatrixXd::Identity(dim, dim));

    Eigen::MatrixXd within_stats = within_scatter;
    Eigen::MatrixXd between_stats = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto &st : speakers) {
      Eigen::MatrixXd posterior_prec = b_inv + st.count * w_inv;
      Eigen::LLT<Eigen::MatrixXd> llt_p = CholeskyOrThrow(posterior_prec, "EM posterior");
      Eigen::MatrixXd posterior_cov =
          llt_p.solve(Eigen::MatrixXd::Identity(dim, dim));
      Eigen::VectorXd m = st.mean - mean;
      Eigen::VectorXd w = llt_p.solve(st.count * (w_inv * m));
      Eigen::VectorXd residual = m - w;
      between_stats.noalias() += posterior_cov + w * w.transpose();
      within_stats.noalias() +=
          st.count * (posterior_cov + residual * residual.transpose());
    }
    within = within_stats / num_utts;
    between = between_stats / num_speakers;
    FloorEigenvalues(&within, cfg.variance_floor);
    FloorEigenvalues(&between, cfg.variance_floor);

    // Total data log-likelihood under the updated parameters: the pooled
    // within-speaker offsets (n_c - 1 degrees of freedom per speaker) plus
    // the speaker sample means, m_c ~ N(mu, B + W/n_c).
    Eigen::LLT<Eigen::MatrixXd> llt_w2 = CholeskyOrThrow(within, "EM within covariance");
    double within_logdet =
        2.0 * Eigen::MatrixXd(llt_w2.matrixL()).diagonal().array().log().sum();
    double obj = -0.5 * ((num_utts - num_speakers) * (within_logdet + dim * kLog2Pi) +
                         (llt_w2.solve(within_scatter)).trace());
    for (const auto &st : speakers) {
      Eigen::MatrixXd mean_cov = between + within / st.count;
      Eigen::LLT<Eigen::MatrixXd> llt_m = CholeskyOrThrow(mean_cov, "EM mean covariance");
      obj += LogDensityDense(st.mean, mean, llt_m);
    }
    loglik.push_back(obj);
  }

  TrainResult result;
  result.model = PldaModel::FromCovariances(mean, between, within, cfg.d_y,
                                            cfg.variance_floor);
  result.loglik = std::move(loglik);
  return result;
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

namespace {

// Speaker loading in the model basis: D x d_y with sqrt(psi_j) at (j, j).
Eigen::MatrixXd ModelBasisLoading(const PldaModel &m) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(m.Dim(), m.SpeakerDim());
  for (int j = 0; j < m.SpeakerDim(); ++j) f(j, j) = std::sqrt(m.BetweenDiag()(j));
  return f;
}

// Within covariance of one utterance in the model basis.  Zero uncertainty
// keeps the matrix diagonal-valued but the path dense.
Eigen::MatrixXd ModelBasisWithin(const PldaModel &m, const Eigen::VectorXd &unc) {
  Eigen::MatrixXd cov = Eigen::MatrixXd(m.WithinDiag().asDiagonal());
  if (unc.size() > 0 && (unc.array() != 0.0).any()) {
    if (unc.size() != m.Dim())
      throw DimensionError("uncertainty dimension does not match model");
    cov.noalias() += m.UncertaintyToModelBasis(unc);
  }
  return cov;
}

// Predictive mean and speaker covariance in the model basis, conditioned on
// a centered, transformed enrollment vector with within covariance we.
void EnrollPredictiveModelBasis(const PldaModel &m, const Eigen::VectorXd &x_e,
                                const Eigen::MatrixXd &we, PredictiveRoute route,
                                Eigen::VectorXd *mean_out,
                                Eigen::MatrixXd *speaker_cov_out) {
  const Eigen::Index dim = m.Dim();
  if (route == PredictiveRoute::kPosterior) {
    // Speaker posterior given the enrollment: precision I + F^T We^{-1} F,
    // mean through the same solve; predictive pieces are F-projections.
    Eigen::MatrixXd f = ModelBasisLoading(m);
    Eigen::LLT<Eigen::MatrixXd> llt_we = CholeskyOrThrow(we, "enroll within covariance");
    Eigen::MatrixXd wif = llt_we.solve(f);
    Eigen::MatrixXd le = Eigen::MatrixXd::Identity(m.SpeakerDim(), m.SpeakerDim());
    le.noalias() += f.transpose() * wif;
    Eigen::LLT<Eigen::MatrixXd> llt_le = CholeskyOrThrow(le, "speaker posterior");
    Eigen::VectorXd me = llt_le.solve(wif.transpose() * x_e);
    *mean_out = f * me;
    *speaker_cov_out = f * llt_le.solve(f.transpose());
  } else {
    // Total-covariance form: mean = B tot_e^{-1} x_e,
    // speaker covariance = B - B tot_e^{-1} B.
    Eigen::MatrixXd tot_e = we;
    tot_e.diagonal() += m.BetweenDiag();
    Eigen::LLT<Eigen::MatrixXd> llt_te = CholeskyOrThrow(tot_e, "enroll total covariance");
    Eigen::MatrixXd b = Eigen::MatrixXd(m.BetweenDiag().asDiagonal());
    Eigen::MatrixXd tib = llt_te.solve(b);
    *mean_out = m.BetweenDiag().asDiagonal() * llt_te.solve(x_e);
    Eigen::MatrixXd sc = b - b * tib;
    *speaker_cov_out = 0.5 * (sc + sc.transpose());
  }
  (void)dim;
}

double ScoreLlrDiagonal(const PldaModel &m, const Eigen::VectorXd &x_e,
                        const Eigen::VectorXd &x_t) {
  const Eigen::VectorXd &psi = m.BetweenDiag();
  const Eigen::VectorXd &w = m.WithinDiag();
  Eigen::VectorXd tot = psi + w;
  Eigen::VectorXd num_mean = psi.cwiseQuotient(tot).cwiseProduct(x_e);
  Eigen::VectorXd num_var = tot - psi.array().square().matrix().cwiseQuotient(tot);
  return LogDensityDiag(x_t, num_mean, num_var) -
         LogDensityDiag(x_t, Eigen::VectorXd::Zero(x_t.size()), tot);
}

double ScoreLlrDense(const PldaModel &m, const Eigen::VectorXd &x_e,
                     const Eigen::VectorXd &x_t, const Eigen::VectorXd &unc_e,
                     const Eigen::VectorXd &unc_t, PredictiveRoute route) {
  Eigen::MatrixXd we = ModelBasisWithin(m, unc_e);
  Eigen::MatrixXd wt = ModelBasisWithin(m, unc_t);

  Eigen::VectorXd num_mean;
  Eigen::MatrixXd speaker_cov;
  EnrollPredictiveModelBasis(m, x_e, we, route, &num_mean, &speaker_cov);
  Eigen::MatrixXd num_cov = speaker_cov + wt;

  Eigen::MatrixXd den_cov = wt;
  den_cov.diagonal() += m.BetweenDiag();

  Eigen::LLT<Eigen::MatrixXd> llt_num = CholeskyOrThrow(num_cov, "predictive covariance");
  Eigen::LLT<Eigen::MatrixXd> llt_den = CholeskyOrThrow(den_cov, "total covariance");
  return LogDensityDense(x_t, num_mean, llt_num) -
         LogDensityDense(x_t, Eigen::VectorXd::Zero(x_t.size()), llt_den);
}

}  // namespace

ConditionalPredictive ComputeConditionalPredictive(const PldaModel &m,
                                                   const UncertainEmbedding &enroll,
                                                   PredictiveRoute route) {
  Eigen::VectorXd x_e = m.ToModelBasis(enroll.Vec());
  Eigen::MatrixXd we = ModelBasisWithin(m, enroll.uncertainty);
  Eigen::VectorXd mean_mb;
  Eigen::MatrixXd cov_mb;
  EnrollPredictiveModelBasis(m, x_e, we, route, &mean_mb, &cov_mb);

  ConditionalPredictive out;
  // Map back to the original space; the transform is square and invertible.
  Eigen::MatrixXd inv = m.Transform().partialPivLu().inverse();
  out.mean = m.Mean() + inv * mean_mb;
  out.speaker_cov = inv * cov_mb * inv.transpose();
  return out;
}

double MarginalLogLik(const PldaModel &m, const UncertainEmbedding &e) {
  Eigen::VectorXd x = m.ToModelBasis(e.Vec());
  if (!e.HasUncertainty()) {
    return LogDensityDiag(x, Eigen::VectorXd::Zero(x.size()),
                          m.BetweenDiag() + m.WithinDiag()) +
           m.LogDetTransform();
  }
  Eigen::MatrixXd cov = ModelBasisWithin(m, e.uncertainty);
  cov.diagonal() += m.BetweenDiag();
  Eigen::LLT<Eigen::MatrixXd> llt = CholeskyOrThrow(cov, "marginal covariance");
  return LogDensityDense(x, Eigen::VectorXd::Zero(x.size()), llt) +
         m.LogDetTransform();
}

double ScoreLlr(const PldaModel &m, const UncertainEmbedding &enroll,
                const UncertainEmbedding &test, ScoringMode mode,
                PredictiveRoute route) {
  Eigen::VectorXd x_e = m.ToModelBasis(enroll.Vec());
  Eigen::VectorXd x_t = m.ToModelBasis(test.Vec());
  if (mode == ScoringMode::kPlda) return ScoreLlrDiagonal(m, x_e, x_t);
  return ScoreLlrDense(m, x_e, x_t, enroll.uncertainty, test.uncertainty, route);
}

ScoreSet ScoreBatch(const PldaModel &m, const EmbeddingArchive &enroll,
                    const EmbeddingArchive &test, const TrialList &trials,
                    const ScoreBatchOptions &opts) {
  if (opts.mode == ScoringMode::kUpPlda &&
      !(enroll.has_uncertainty && test.has_uncertainty) &&
      !opts.assume_zero_uncertainty)
    throw ValueError("no uncertainty present in the embedding archives "
                     "(rerun with assume-zero-uncertainty to score anyway)");

  // Resolve every id up front so errors name the trial, not a worker.
  std::vector<const UncertainEmbedding *> e_ptr(trials.size());
  std::vector<const UncertainEmbedding *> t_ptr(trials.size());
  for (size_t i = 0; i < trials.size(); ++i) {
    e_ptr[i] = enroll.Find(trials[i].enroll_id);
    if (!e_ptr[i])
      throw ValueError("trial " + std::to_string(i + 1) + ": unknown enrollment id '" +
                       trials[i].enroll_id + "'");
    t_ptr[i] = test.Find(trials[i].test_id);
    if (!t_ptr[i])
      throw ValueError("trial " + std::to_string(i + 1) + ": unknown test id '" +
                       trials[i].test_id + "'");
  }

  ScoreSet out;
  out.entries.resize(trials.size());
  ParallelFor(static_cast<int64_t>(trials.size()), opts.num_threads,
              [&](int64_t begin, int64_t end) {
                for (int64_t i = begin; i < end; ++i) {
                  out.entries[i].trial = trials[i];
                  out.entries[i].score =
                      ScoreLlr(m, *e_ptr[i], *t_ptr[i], opts.mode, opts.route);
                }
              });
  return out;
}

}  // namespace uplda
