// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/backends.hpp"

namespace maskcount {

MaskProposal MaskProposal::from_bitmap(Bitmap bm, float confidence, OriginScale origin) {
  MaskProposal p;
  p.area = bm.count();
  p.bbox = bm.tight_bbox();
  p.bitmap = std::move(bm);
  p.segmenter_confidence = confidence;
  p.origin = origin;
  p.degenerate = p.area == 0;
  if (p.degenerate) p.note = "empty mask";
  return p;
}

MaskProposal MaskProposal::degenerate_entry(int h, int w, std::string reason) {
  MaskProposal p;
  p.bitmap = Bitmap(h, w);
  p.degenerate = true;
  p.note = std::move(reason);
  return p;
}

}  // namespace maskcount
