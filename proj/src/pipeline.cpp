// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/pipeline.hpp"

#include <algorithm>

#include "maskcount/kernels.hpp"

namespace maskcount::pipeline {

namespace {

std::vector<Point> grid_prompts(int w, int h, int side) {
  std::vector<Point> pts;
  pts.reserve((size_t)side * side);
  for (int j = 0; j < side; ++j) {
    int y = std::min((int)(((double)j + 0.5) * h / side), h - 1);
    for (int i = 0; i < side; ++i) {
      int x = std::min((int)(((double)i + 0.5) * w / side), w - 1);
      pts.push_back({x, y});
    }
  }
  return pts;
}

std::vector<Point> view_prompts(const RawImage& view, const RunConfig& cfg,
                                superpixel::SuperpixelResult* keep_result) {
  if (cfg.prompts.mode == "grid") {
    return grid_prompts(view.width, view.height, cfg.prompts.grid_side);
  }
  superpixel::SuperpixelParams sp;
  sp.cluster_count = std::min<int>(cfg.superpixel.k, view.width * view.height);
  sp.compactness = cfg.superpixel.compactness;
  sp.max_iterations = cfg.superpixel.max_iterations;
  sp.seed = cfg.seed;
  auto res = superpixel::compute_superpixels(view, sp);
  auto prompts = superpixel::centers_as_prompts(res);
  if (keep_result) *keep_result = std::move(res);
  return prompts;
}

matching::MaskInterp interp_of(const RunConfig& cfg) {
  return cfg.matching.mask_interp == "hard" ? matching::MaskInterp::hard
                                            : matching::MaskInterp::soft;
}

struct Collected {
  proposals::ProposalSet set;
  std::unique_ptr<EmbeddedImage> full_emb;
};

// Shared front half: prompts + decoding on the full view and (optionally)
// the upscaled tiles, with tile masks remapped into original coordinates.
Collected collect_proposals(const RawImage& image, const proposals::ReferenceSpec* refs,
                            const RunConfig& cfg, SegmenterBackend& seg, StageTrace* trace,
                            std::vector<std::string>& warnings) {
  Collected out;
  out.set.width = image.width;
  out.set.height = image.height;

  out.full_emb = seg.encode(image);
  if (refs) {
    out.set.reference_masks = proposals::generate_reference_masks(seg, *out.full_emb, *refs);
    int degenerate = 0;
    for (const auto& m : out.set.reference_masks) {
      if (m.degenerate) ++degenerate;
    }
    if (degenerate == (int)out.set.reference_masks.size()) {
      fail(errc::reference_failure, "every reference prompt decoded to an empty mask");
    }
    if (degenerate > 0) {
      warnings.push_back(std::to_string(degenerate) +
                         " reference prompt(s) decoded empty; counting proceeds with the rest");
    }
  }

  superpixel::SuperpixelResult full_sp;
  auto full_prompts = view_prompts(image, cfg, &full_sp);
  auto full_cands =
      proposals::generate_candidates(seg, *out.full_emb, full_prompts, {OriginKind::full, 0, 0});
  proposals::collapse_exact_duplicates(full_cands);
  out.set.candidates = std::move(full_cands);

  if (cfg.multiscale.enabled && cfg.multiscale.n_p >= 2) {
    auto tiles = proposals::multiscale_expand(image, cfg.multiscale.n_p);
    for (const auto& tile : tiles) {
      auto emb = seg.encode(tile.image);
      auto prompts = view_prompts(tile.image, cfg, nullptr);
      auto cands = proposals::generate_candidates(seg, *emb, prompts, tile.origin);
      proposals::collapse_exact_duplicates(cands);
      for (auto& m : cands) {
        out.set.candidates.push_back(proposals::remap_to_original(m, tile.transform));
      }
    }
    // remapping can produce empties at extreme downscales; drop them
    std::erase_if(out.set.candidates, [](const MaskProposal& m) { return m.degenerate; });
  }

  if (trace) {
    trace->full_view_superpixels = std::move(full_sp);
    trace->full_view_prompts = std::move(full_prompts);
    trace->raw_candidates = out.set.candidates;
  }

  proposals::filter_and_dedup(out.set, cfg.dedup.iou_threshold);
  if (trace) trace->filtered = out.set;
  return out;
}

PipelineResult score_and_count(Collected collected, const RunConfig& cfg, SegmenterBackend& seg,
                               SemanticEncoderBackend* sem, const RawImage& image,
                               std::optional<matching::Prototype> fixed_prototype) {
  matching::Thresholds thr{cfg.matching.theta, cfg.matching.delta};
  thr.validate();
  const auto interp = interp_of(cfg);

  FeatureMap fm;
  if (sem) {
    fm = sem->embed(image);
  } else {
    fm = seg.features(*collected.full_emb);
  }

  matching::Prototype proto;
  int ref_offset = 0;
  if (fixed_prototype) {
    proto = std::move(*fixed_prototype);
  } else {
    proto = matching::build_prototype(fm, collected.set.reference_masks, interp);
    for (const auto& m : collected.set.reference_masks) {
      if (!m.degenerate) ++ref_offset;
    }
  }

  std::vector<matching::ScoredProposal> scored;
  scored.reserve(collected.set.candidates.size());
  for (auto& c : collected.set.candidates) {
    matching::ScoredProposal s;
    s.feature = matching::pool_mask_feature(fm, c, interp);
    s.proposal = std::move(c);
    scored.push_back(std::move(s));
  }
  matching::score_proposals(proto, scored);

  for (int round = 0; round < cfg.matching.tpu_rounds; ++round) {
    proto = matching::transductive_update(proto, scored, thr.delta);
    matching::score_proposals(proto, scored);
  }

  PipelineResult out;
  out.count = matching::count(scored, thr.theta, ref_offset,
                              std::move(collected.set.reference_masks));
  return out;
}

void apply_kernel_choice(const RunConfig& cfg) { kernels::select(cfg.kernels.isa); }

}  // namespace

PipelineResult run_count(const RawImage& image, const proposals::ReferenceSpec& refs,
                         const RunConfig& cfg, SegmenterBackend& seg,
                         SemanticEncoderBackend* sem, StageTrace* trace) {
  if (!image.valid()) fail(errc::invalid_parameter, "run_count: invalid image");
  apply_kernel_choice(cfg);
  std::vector<std::string> warnings;
  auto collected = collect_proposals(image, &refs, cfg, seg, trace, warnings);
  auto result = score_and_count(std::move(collected), cfg, seg, sem, image, std::nullopt);
  result.warnings = std::move(warnings);
  return result;
}

PipelineResult run_count_with_prototype(const RawImage& image,
                                        const matching::Prototype& prototype,
                                        const RunConfig& cfg, SegmenterBackend& seg,
                                        SemanticEncoderBackend* sem, StageTrace* trace) {
  if (!image.valid()) fail(errc::invalid_parameter, "run_count: invalid image");
  apply_kernel_choice(cfg);
  std::vector<std::string> warnings;
  auto collected = collect_proposals(image, nullptr, cfg, seg, trace, warnings);
  auto result = score_and_count(std::move(collected), cfg, seg, sem, image, prototype);
  result.warnings = std::move(warnings);
  return result;
}

matching::Prototype build_cross_image_prototype(
    const std::vector<eval::CrossImageExemplar>& exemplars, const RunConfig& cfg,
    SegmenterBackend& seg, SemanticEncoderBackend* sem, const ImageLoader& loader) {
  if (exemplars.empty()) fail(errc::reference_failure, "no exemplars given");
  apply_kernel_choice(cfg);
  const auto interp = interp_of(cfg);

  std::vector<double> acc;
  int used = 0;
  // group exemplars by source image so each image is embedded once
  std::vector<std::string> images;
  for (const auto& e : exemplars) {
    if (std::find(images.begin(), images.end(), e.image_path) == images.end()) {
      images.push_back(e.image_path);
    }
  }
  for (const auto& path : images) {
    RawImage img = loader(path);
    auto emb = seg.encode(img);
    std::vector<Prompt> prompts;
    for (const auto& e : exemplars) {
      if (e.image_path == path) prompts.emplace_back(BoxPrompt{e.box});
    }
    auto masks = seg.decode(*emb, prompts);
    FeatureMap fm = sem ? sem->embed(img) : seg.features(*emb);
    if (acc.empty()) acc.assign((size_t)fm.dim, 0.0);
    for (const auto& m : masks) {
      if (m.degenerate) continue;
      auto f = matching::pool_mask_feature(fm, m, interp);
      for (size_t d = 0; d < acc.size(); ++d) acc[d] += f[d];
      ++used;
    }
  }
  if (used == 0) {
    fail(errc::reference_failure, "all cross-image exemplars decoded to empty masks");
  }
  matching::Prototype proto;
  proto.vec = std::move(acc);
  for (double& v : proto.vec) v /= used;
  proto.support_count = used;
  proto.update_round = 0;
  return proto;
}

}  // namespace maskcount::pipeline
