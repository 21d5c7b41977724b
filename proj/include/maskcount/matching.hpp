// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "maskcount/backends.hpp"
#include "maskcount/featuremap.hpp"

namespace maskcount::matching {

enum class MaskInterp {
  soft,  // area-weighted downsampling; fractional cell coverage
  hard,  // nearest-neighbor sample at each cell center
};

struct Thresholds {
  double theta = 0.4;  // selection threshold
  double delta = 0.5;  // prototype-update candidate threshold
  void validate() const;
};

// Reference feature vector; support_count starts at the exemplar count and
// grows as update rounds absorb candidates.
struct Prototype {
  std::vector<double> vec;
  double support_count = 0.0;
  int update_round = 0;
};

struct ScoredProposal {
  MaskProposal proposal;
  std::vector<double> feature;
  double similarity = -1.0;
};

// Masked average of the feature grid under the interpolated mask. Empty
// interpolated masks fall back to the single cell holding the mask centroid;
// a fully empty mask yields the zero vector (which scores -1 downstream).
std::vector<double> pool_mask_feature(const FeatureMap& fm, const MaskProposal& mask,
                                      MaskInterp interp = MaskInterp::soft);

// Unweighted mean of the pooled reference features (degenerate masks are
// skipped); errors when nothing non-degenerate remains.
Prototype build_prototype(const FeatureMap& fm, std::span<const MaskProposal> ref_masks,
                          MaskInterp interp = MaskInterp::soft);

double cosine(std::span<const double> a, std::span<const double> b);

// Fills similarity = cosine(prototype, feature); zero-norm features score -1.
void score_proposals(const Prototype& proto, std::vector<ScoredProposal>& scored);

// Weighted mean of the current prototype (weight: support_count) and every
// candidate with similarity strictly above delta (weight 1 each).
Prototype transductive_update(const Prototype& proto, std::span<const ScoredProposal> scored,
                              double delta);

struct CountResult {
  int count = 0;
  int n_ref = 0;
  double theta = 0.0;
  std::vector<ScoredProposal> selected;  // similarity strictly above theta
  std::vector<MaskProposal> references;
};

CountResult count(std::span<const ScoredProposal> scored, double theta, int n_ref,
                  std::vector<MaskProposal> references = {});

}  // namespace maskcount::matching
