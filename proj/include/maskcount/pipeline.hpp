// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "maskcount/config.hpp"
#include "maskcount/dataset.hpp"
#include "maskcount/matching.hpp"
#include "maskcount/proposals.hpp"
#include "maskcount/superpixel.hpp"

namespace maskcount::pipeline {

using ImageLoader = std::function<RawImage(const std::string&)>;

// Intermediate artifacts kept for the debug renderer.
struct StageTrace {
  superpixel::SuperpixelResult full_view_superpixels;
  std::vector<Point> full_view_prompts;
  std::vector<MaskProposal> raw_candidates;  // merged, before filtering
  proposals::ProposalSet filtered;
};

struct PipelineResult {
  matching::CountResult count;
  std::vector<std::string> warnings;
};

// Full counting pass with in-image exemplars:
// prompts -> masks (optionally tiled) -> filter -> features -> prototype ->
// score -> prototype update rounds with rescoring -> threshold count.
PipelineResult run_count(const RawImage& image, const proposals::ReferenceSpec& refs,
                         const RunConfig& cfg, SegmenterBackend& seg,
                         SemanticEncoderBackend* sem, StageTrace* trace = nullptr);

// Variant for exemplars pooled from other images: the prototype is given,
// no reference masks exist in this image, and the exemplar offset is not
// added to the count.
PipelineResult run_count_with_prototype(const RawImage& image,
                                        const matching::Prototype& prototype,
                                        const RunConfig& cfg, SegmenterBackend& seg,
                                        SemanticEncoderBackend* sem,
                                        StageTrace* trace = nullptr);

// Pools exemplar features from their source images once (boxes decoded to
// masks there, features pooled there) and averages them into the initial
// prototype shared by every query image.
matching::Prototype build_cross_image_prototype(
    const std::vector<eval::CrossImageExemplar>& exemplars, const RunConfig& cfg,
    SegmenterBackend& seg, SemanticEncoderBackend* sem, const ImageLoader& loader);

}  // namespace maskcount::pipeline
