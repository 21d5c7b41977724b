// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/onnx_backends.hpp"

#include <cmath>
#include <filesystem>

#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>
#include <opencv2/imgproc.hpp>

#include "maskcount/common.hpp"

namespace maskcount::onnx {

namespace fs = std::filesystem;

namespace {

cv::dnn::Net read_net_checked(const std::string& path) {
  if (!fs::exists(path)) fail(errc::backend_load, "model file not found: " + path);
  try {
    cv::dnn::Net net = cv::dnn::readNet(path);
    if (net.empty()) fail(errc::backend_load, "model graph is empty: " + path);
    return net;
  } catch (const cv::Exception& e) {
    fail(errc::backend_load, "cannot load model " + path + ": " + e.what());
  }
}

cv::Mat rgb_view(const RawImage& img) {
  return cv::Mat(img.height, img.width, CV_8UC3, const_cast<uint8_t*>(img.rgb.data()));
}

}  // namespace

// ---------------------------------------------------------------------------
// segmenter

struct OnnxSamSegmenter::Impl {
  SamSegmenterConfig cfg;
  cv::dnn::Net encoder;
  cv::dnn::Net decoder;
};

namespace {

class SamEmbedded : public EmbeddedImage {
 public:
  SamEmbedded(int h, int w) : EmbeddedImage(h, w) {}
  cv::Mat embedding;  // [1, C, 64, 64]
  float scale = 1.0f;  // original -> resized coordinates
};

// pixel statistics used by the published encoder
const cv::Scalar kSamMean(123.675, 116.28, 103.53);
const cv::Scalar kSamStd(58.395, 57.12, 57.375);

}  // namespace

OnnxSamSegmenter::OnnxSamSegmenter(const SamSegmenterConfig& cfg)
    : impl_(std::make_unique<Impl>()) {
  impl_->cfg = cfg;
  if (cfg.weights_dir.empty()) {
    fail(errc::backend_load, "segmenter.weights_path is empty; point it at the directory "
                             "holding encoder.onnx and decoder.onnx");
  }
  impl_->encoder = read_net_checked(cfg.weights_dir + "/encoder.onnx");
  impl_->decoder = read_net_checked(cfg.weights_dir + "/decoder.onnx");
}

OnnxSamSegmenter::~OnnxSamSegmenter() = default;

SegmenterInfo OnnxSamSegmenter::info() const {
  return SegmenterInfo{"onnx-sam", impl_->cfg.variant, impl_->cfg.input_resolution, 1};
}

std::unique_ptr<EmbeddedImage> OnnxSamSegmenter::encode(const RawImage& image) {
  if (!image.valid()) fail(errc::invalid_parameter, "segmenter: invalid image");
  const int res = impl_->cfg.input_resolution;
  float scale = (float)res / std::max(image.width, image.height);
  int nw = std::max(1, (int)std::lround(image.width * scale));
  int nh = std::max(1, (int)std::lround(image.height * scale));

  cv::Mat resized;
  cv::resize(rgb_view(image), resized, cv::Size(nw, nh), 0, 0, cv::INTER_LINEAR);
  cv::Mat f32;
  resized.convertTo(f32, CV_32FC3);
  f32 -= kSamMean;
  f32 /= kSamStd;
  cv::Mat padded = cv::Mat::zeros(res, res, CV_32FC3);
  f32.copyTo(padded(cv::Rect(0, 0, nw, nh)));

  cv::Mat blob = cv::dnn::blobFromImage(padded);  // [1,3,res,res]
  auto emb = std::make_unique<SamEmbedded>(image.height, image.width);
  emb->scale = scale;
  try {
    impl_->encoder.setInput(blob);
    emb->embedding = impl_->encoder.forward().clone();
  } catch (const cv::Exception& e) {
    fail(errc::backend_load, std::string("segmenter encoder failed: ") + e.what());
  }
  return emb;
}

std::vector<MaskProposal> OnnxSamSegmenter::decode(const EmbeddedImage& emb,
                                                   std::span<const Prompt> prompts) {
  const auto* se = dynamic_cast<const SamEmbedded*>(&emb);
  if (!se) fail(errc::invalid_parameter, "segmenter: foreign embedding");
  const int H = se->height(), W = se->width();

  std::vector<MaskProposal> out;
  out.reserve(prompts.size());
  for (const Prompt& p : prompts) {
    std::vector<cv::Point2f> coords;
    std::vector<float> labels;
    bool in_bounds = true;
    if (const auto* pt = std::get_if<PointPrompt>(&p)) {
      in_bounds = pt->x >= 0 && pt->x < W && pt->y >= 0 && pt->y < H;
      coords.emplace_back((float)pt->x * se->scale, (float)pt->y * se->scale);
      labels.push_back(1.0f);
      coords.emplace_back(0.0f, 0.0f);  // pad point, standard for point-only prompts
      labels.push_back(-1.0f);
    } else {
      const Box& b = std::get<BoxPrompt>(p).box;
      in_bounds = !b.empty() && b.x0 >= 0 && b.y0 >= 0 && b.x1 <= W && b.y1 <= H;
      coords.emplace_back((float)b.x0 * se->scale, (float)b.y0 * se->scale);
      labels.push_back(2.0f);
      coords.emplace_back((float)b.x1 * se->scale, (float)b.y1 * se->scale);
      labels.push_back(3.0f);
    }
    if (!in_bounds) {
      out.push_back(MaskProposal::degenerate_entry(H, W, "prompt out of bounds"));
      continue;
    }

    const int n = (int)coords.size();
    std::vector<int> coord_shape{1, n, 2};
    cv::Mat coord_mat(coord_shape, CV_32F);
    for (int i = 0; i < n; ++i) {
      coord_mat.ptr<float>(0)[2 * i] = coords[(size_t)i].x;
      coord_mat.ptr<float>(0)[2 * i + 1] = coords[(size_t)i].y;
    }
    std::vector<int> label_shape{1, n};
    cv::Mat label_mat(label_shape, CV_32F);
    for (int i = 0; i < n; ++i) label_mat.ptr<float>(0)[i] = labels[(size_t)i];
    std::vector<int> mask_shape{1, 1, 256, 256};
    cv::Mat mask_input = cv::Mat::zeros(4, mask_shape.data(), CV_32F);
    cv::Mat has_mask = cv::Mat::zeros(1, 1, CV_32F);
    cv::Mat orig_size(1, 2, CV_32F);
    orig_size.at<float>(0) = (float)H;
    orig_size.at<float>(1) = (float)W;

    cv::Mat masks, scores;
    try {
      impl_->decoder.setInput(coord_mat, "point_coords");
      impl_->decoder.setInput(label_mat, "point_labels");
      impl_->decoder.setInput(se->embedding, "image_embeddings");
      impl_->decoder.setInput(mask_input, "mask_input");
      impl_->decoder.setInput(has_mask, "has_mask_input");
      impl_->decoder.setInput(orig_size, "orig_im_size");
      std::vector<cv::Mat> outs;
      impl_->decoder.forward(outs, std::vector<cv::String>{"masks", "iou_predictions"});
      masks = outs[0];
      scores = outs[1];
    } catch (const cv::Exception& e) {
      fail(errc::backend_load, std::string("segmenter decoder failed: ") + e.what());
    }

    // masks: [1, C, h, w]; pick the best-scoring candidate
    int C = masks.size[1], mh = masks.size[2], mw = masks.size[3];
    int best = 0;
    float best_score = -1e9f;
    for (int c = 0; c < C; ++c) {
      float s = scores.ptr<float>(0)[c];
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    const float* mp = masks.ptr<float>(0) + (size_t)best * mh * mw;
    Bitmap bm(H, W);
    if (mh == H && mw == W) {
      for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
          if (mp[(size_t)y * mw + x] > impl_->cfg.mask_threshold) bm.set(x, y);
        }
      }
    } else {
      // low-res grid; map through the resized frame
      for (int y = 0; y < H; ++y) {
        int my = std::min(mh - 1, (int)(y * se->scale * mh / impl_->cfg.input_resolution));
        for (int x = 0; x < W; ++x) {
          int mx = std::min(mw - 1, (int)(x * se->scale * mw / impl_->cfg.input_resolution));
          if (mp[(size_t)my * mw + mx] > impl_->cfg.mask_threshold) bm.set(x, y);
        }
      }
    }
    auto prop = MaskProposal::from_bitmap(std::move(bm), std::max(0.0f, best_score));
    if (prop.degenerate) prop.note = "empty decode";
    out.push_back(std::move(prop));
  }
  return out;
}

FeatureMap OnnxSamSegmenter::features(const EmbeddedImage& emb) {
  const auto* se = dynamic_cast<const SamEmbedded*>(&emb);
  if (!se) fail(errc::invalid_parameter, "segmenter: foreign embedding");
  const cv::Mat& e = se->embedding;  // [1, C, gh, gw]
  if (e.dims != 4) fail(errc::backend_load, "unexpected embedding rank");
  int C = e.size[1], gh = e.size[2], gw = e.size[3];
  FeatureMap fm;
  fm.grid_h = gh;
  fm.grid_w = gw;
  fm.dim = C;
  fm.src_height = se->height();
  fm.src_width = se->width();
  fm.data.resize((size_t)gh * gw * C);
  const float* src = e.ptr<float>(0);
  for (int c = 0; c < C; ++c) {
    for (int y = 0; y < gh; ++y) {
      for (int x = 0; x < gw; ++x) {
        fm.data[((size_t)y * gw + x) * C + c] = src[((size_t)c * gh + y) * gw + x];
      }
    }
  }
  return fm;
}

// ---------------------------------------------------------------------------
// semantic encoder

VitSemanticConfig vit_semantic_preset(const std::string& model) {
  VitSemanticConfig cfg;
  cfg.model = model;
  if (model == "clip") {
    cfg.input_size = 256;
    cfg.patch_size = 16;
    cfg.drop_tokens = 1;
    cfg.mean = {0.48145466f, 0.4578275f, 0.40821073f};
    cfg.stddev = {0.26862954f, 0.26130258f, 0.27577711f};
  } else if (model == "dino") {
    cfg.input_size = 224;
    cfg.patch_size = 8;
    cfg.drop_tokens = 1;
  } else if (model == "dinov2") {
    cfg.input_size = 518;
    cfg.patch_size = 14;
    cfg.drop_tokens = 1;
  } else {
    fail(errc::usage, "unknown semantic model '" + model + "' (clip|dino|dinov2)");
  }
  return cfg;
}

struct OnnxVitSemantic::Impl {
  VitSemanticConfig cfg;
  cv::dnn::Net net;
  int grid = 0;
};

OnnxVitSemantic::OnnxVitSemantic(const VitSemanticConfig& cfg)
    : impl_(std::make_unique<Impl>()) {
  VitSemanticConfig preset = vit_semantic_preset(cfg.model);
  impl_->cfg = cfg;
  if (impl_->cfg.input_size <= 0) impl_->cfg.input_size = preset.input_size;
  if (impl_->cfg.patch_size <= 0) impl_->cfg.patch_size = preset.patch_size;
  if (impl_->cfg.drop_tokens < 0) impl_->cfg.drop_tokens = preset.drop_tokens;
  impl_->cfg.mean = preset.mean;
  impl_->cfg.stddev = preset.stddev;
  if (impl_->cfg.weights_path.empty()) {
    fail(errc::backend_load, "semantic.weights_path is empty");
  }
  impl_->net = read_net_checked(impl_->cfg.weights_path);
  if (impl_->cfg.input_size % impl_->cfg.patch_size != 0) {
    fail(errc::backend_load, "semantic input size is not a multiple of the patch size");
  }
  impl_->grid = impl_->cfg.input_size / impl_->cfg.patch_size;
}

OnnxVitSemantic::~OnnxVitSemantic() = default;

SemanticInfo OnnxVitSemantic::info() const {
  return SemanticInfo{"onnx-" + impl_->cfg.model, impl_->grid, impl_->grid, 0};
}

FeatureMap OnnxVitSemantic::embed(const RawImage& image) {
  if (!image.valid()) fail(errc::invalid_parameter, "semantic: invalid image");
  const int S = impl_->cfg.input_size;
  cv::Mat resized;
  cv::resize(rgb_view(image), resized, cv::Size(S, S), 0, 0, cv::INTER_LINEAR);
  cv::Mat f32;
  resized.convertTo(f32, CV_32FC3, 1.0 / 255.0);
  f32 -= cv::Scalar(impl_->cfg.mean[0], impl_->cfg.mean[1], impl_->cfg.mean[2]);
  f32 /= cv::Scalar(impl_->cfg.stddev[0], impl_->cfg.stddev[1], impl_->cfg.stddev[2]);
  cv::Mat blob = cv::dnn::blobFromImage(f32);

  cv::Mat out;
  try {
    impl_->net.setInput(blob);
    out = impl_->net.forward();
  } catch (const cv::Exception& e) {
    fail(errc::backend_load, std::string("semantic encoder failed: ") + e.what());
  }

  const int g = impl_->grid;
  FeatureMap fm;
  fm.grid_h = g;
  fm.grid_w = g;
  fm.src_height = image.height;
  fm.src_width = image.width;

  if (out.dims == 3) {
    // [1, tokens, dim]
    int tokens = out.size[1], dim = out.size[2];
    int drop = impl_->cfg.drop_tokens;
    if (tokens - drop != g * g) {
      fail(errc::backend_load,
           "semantic output tokens (" + std::to_string(tokens) + ") do not match the " +
               std::to_string(g) + "x" + std::to_string(g) + " patch grid");
    }
    fm.dim = dim;
    fm.data.resize((size_t)g * g * dim);
    const float* src = out.ptr<float>(0) + (size_t)drop * dim;
    std::copy(src, src + (size_t)g * g * dim, fm.data.data());
  } else if (out.dims == 4) {
    // [1, dim, g, g]
    int dim = out.size[1];
    if (out.size[2] != g || out.size[3] != g) {
      fail(errc::backend_load, "semantic output grid does not match the expected patch grid");
    }
    fm.dim = dim;
    fm.data.resize((size_t)g * g * dim);
    const float* src = out.ptr<float>(0);
    for (int c = 0; c < dim; ++c) {
      for (int y = 0; y < g; ++y) {
        for (int x = 0; x < g; ++x) {
          fm.data[((size_t)y * g + x) * dim + c] = src[((size_t)c * g + y) * g + x];
        }
      }
    }
  } else {
    fail(errc::backend_load, "semantic output must be [1,tokens,dim] or [1,dim,g,g]");
  }
  return fm;
}

}  // namespace maskcount::onnx
