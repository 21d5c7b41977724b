// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "maskcount/image.hpp"

namespace maskcount {

// PNG/JPEG via the OpenCV codecs, PPM natively. Built only when the OpenCV
// adapters are enabled; PPM paths always work through image.hpp.
RawImage load_image(const std::string& path);
void save_image(const std::string& path, const RawImage& img);

}  // namespace maskcount
