// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/image_codecs.hpp"

#include <algorithm>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace maskcount {

namespace {

bool has_suffix(const std::string& s, const std::string& suf) {
  if (s.size() < suf.size()) return false;
  return std::equal(suf.rbegin(), suf.rend(), s.rbegin(), [](char a, char b) {
    return std::tolower((unsigned char)a) == std::tolower((unsigned char)b);
  });
}

}  // namespace

RawImage load_image(const std::string& path) {
  if (has_suffix(path, ".ppm")) return read_ppm(path);
  cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
  if (bgr.empty()) fail(errc::io, "cannot read image: " + path);
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  RawImage img;
  img.height = rgb.rows;
  img.width = rgb.cols;
  img.rgb.resize((size_t)rgb.rows * rgb.cols * 3);
  if (rgb.isContinuous()) {
    std::copy(rgb.data, rgb.data + img.rgb.size(), img.rgb.data());
  } else {
    for (int y = 0; y < rgb.rows; ++y) {
      std::copy(rgb.ptr(y), rgb.ptr(y) + (size_t)rgb.cols * 3,
                img.rgb.data() + (size_t)y * rgb.cols * 3);
    }
  }
  return img;
}

void save_image(const std::string& path, const RawImage& img) {
  if (!img.valid()) fail(errc::invalid_parameter, "save_image: invalid image");
  if (has_suffix(path, ".ppm")) {
    write_ppm(path, img);
    return;
  }
  cv::Mat rgb(img.height, img.width, CV_8UC3, const_cast<uint8_t*>(img.rgb.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  if (!cv::imwrite(path, bgr)) fail(errc::io, "cannot write image: " + path);
}

}  // namespace maskcount
