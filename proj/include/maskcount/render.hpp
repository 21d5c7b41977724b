// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "maskcount/image.hpp"
#include "maskcount/matching.hpp"
#include "maskcount/superpixel.hpp"

namespace maskcount::render {

// Selected masks tinted in distinct colors, reference boxes in white-over-
// black outlines, the count stamped in the bottom-right corner.
RawImage overlay_count(const RawImage& image, const matching::CountResult& result);

// Indexed-color view of a label map (distinct hues per label).
RawImage label_map_image(const superpixel::SuperpixelResult& sp);

// Binary mask as a black/white image.
RawImage mask_image(const Bitmap& mask);

// 5x7 digit stamp, scaled; used by overlay_count and exposed for tests.
void draw_number(RawImage& img, int value, int x, int y, int scale, Rgb color);

Rgb palette_color(size_t index);

}  // namespace maskcount::render
