// uplda/embedding.cc

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

#include "uplda/embedding.h"

#include <set>

namespace uplda {

const UncertainEmbedding *EmbeddingArchive::Find(const std::string &id) const {
  if (index_.empty() && !items.empty()) {
    for (size_t i = 0; i < items.size(); ++i) index_.emplace(items[i].Id(), i);
  }
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &items[it->second];
}

void EmbeddingArchive::Add(UncertainEmbedding e) {
  if (items.empty() && dim == 0) dim = e.Dim();
  index_.clear();
  items.push_back(std::move(e));
}

Eigen::Index LabeledDataset::Dim() const {
  for (const auto &kv : speakers) {
    if (!kv.second.empty()) return kv.second.front().Dim();
  }
  return 0;
}

std::vector<ValidationIssue> ValidateDataset(const LabeledDataset &ds) {
  std::vector<ValidationIssue> issues;
  const Eigen::Index dim = ds.Dim();
  std::set<std::string> seen_ids;

  for (const auto &[speaker, utts] : ds.speakers) {
    if (utts.empty()) {
      issues.push_back({"", "speaker", "speaker '" + speaker + "' has no utterances"});
      continue;
    }
    for (const auto &utt : utts) {
      const std::string &id = utt.Id();
      if (!seen_ids.insert(id).second) {
        issues.push_back({id, "id", "duplicate utterance id '" + id + "'"});
      }
      if (utt.Dim() != dim) {
        issues.push_back({id, "vector",
                          "dimension " + std::to_string(utt.Dim()) +
                              " does not match dataset dimension " + std::to_string(dim)});
      }
      if (!utt.Vec().allFinite()) {
        issues.push_back({id, "vector", "non-finite entry in embedding vector"});
      }
      if (utt.uncertainty.size() != utt.Dim()) {
        issues.push_back({id, "uncertainty",
                          "uncertainty has " + std::to_string(utt.uncertainty.size()) +
                              " entries, expected " + std::to_string(utt.Dim())});
      } else {
        if (!utt.uncertainty.allFinite()) {
          issues.push_back({id, "uncertainty", "non-finite uncertainty entry"});
        } else if ((utt.uncertainty.array() < 0.0).any()) {
          issues.push_back({id, "uncertainty", "negative uncertainty entry"});
        }
      }
    }
  }
  return issues;
}

}  // namespace uplda
