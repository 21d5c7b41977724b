// Copyright (C) 2026 maskcount contributors
// SPDX-License-Identifier: Apache-2.0

#include "maskcount/mock_backend.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "maskcount/common.hpp"

namespace maskcount::mock {

uint32_t pack_rgb(Rgb c) { return ((uint32_t)c[0] << 16) | ((uint32_t)c[1] << 8) | c[2]; }

Box Shape::bbox() const {
  if (kind == Kind::disk) return Box{cx - size, cy - size, cx + size + 1, cy + size + 1};
  int x0 = cx - size / 2, y0 = cy - size / 2;
  return Box{x0, y0, x0 + size, y0 + size};
}

bool Shape::contains(int x, int y) const {
  if (kind == Kind::disk) {
    int dx = x - cx, dy = y - cy;
    return dx * dx + dy * dy <= size * size;
  }
  return bbox().contains(x, y);
}

RawImage Scene::render() const {
  RawImage img = RawImage::filled(height, width, background_color);
  for (const auto& s : shapes) {
    Box b = Box::intersect(s.bbox(), Box{0, 0, width, height});
    for (int y = b.y0; y < b.y1; ++y) {
      for (int x = b.x0; x < b.x1; ++x) {
        if (s.contains(x, y)) img.set_pixel(x, y, s.color);
      }
    }
  }
  return img;
}

int Scene::target_count() const {
  int n = 0;
  for (const auto& s : shapes) {
    if (s.cls == target_class) ++n;
  }
  return n;
}

std::vector<Box> Scene::reference_boxes() const {
  std::vector<Box> out;
  for (int i : refs) out.push_back(shapes[(size_t)i].bbox());
  return out;
}

std::vector<Point> Scene::reference_points() const {
  std::vector<Point> out;
  for (int i : refs) out.push_back({shapes[(size_t)i].cx, shapes[(size_t)i].cy});
  return out;
}

std::vector<std::string> Scene::class_list() const {
  std::vector<std::string> cls{"background"};
  for (const auto& s : shapes) {
    if (std::find(cls.begin(), cls.end(), s.cls) == cls.end()) cls.push_back(s.cls);
  }
  return cls;
}

std::map<uint32_t, int> Scene::color_to_class() const {
  auto cls = class_list();
  auto index_of = [&](const std::string& c) {
    return (int)(std::find(cls.begin(), cls.end(), c) - cls.begin());
  };
  std::map<uint32_t, int> m;
  m[pack_rgb(background_color)] = 0;
  for (const auto& s : shapes) {
    uint32_t key = pack_rgb(s.color);
    int idx = index_of(s.cls);
    auto it = m.find(key);
    if (it != m.end() && it->second != idx) {
      fail(errc::invalid_parameter, "scene: one color used by two classes");
    }
    m[key] = idx;
  }
  return m;
}

void Scene::validate() const {
  if (width < 1 || height < 1) fail(errc::invalid_parameter, "scene: empty canvas");
  if (target_class.empty()) fail(errc::invalid_parameter, "scene: missing target_class");
  for (int i : refs) {
    if (i < 0 || i >= (int)shapes.size()) {
      fail(errc::invalid_parameter, "scene: reference index out of range");
    }
    if (shapes[(size_t)i].cls != target_class) {
      fail(errc::invalid_parameter, "scene: reference shape is not of the target class");
    }
  }
  color_to_class();  // throws on color/class conflicts
}

namespace {

using nlohmann::json;

Rgb rgb_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) fail(errc::ingestion, "scene: color must be [r,g,b]");
  return Rgb{(uint8_t)j[0].get<int>(), (uint8_t)j[1].get<int>(), (uint8_t)j[2].get<int>()};
}

}  // namespace

Scene Scene::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(errc::ingestion, std::string("scene: bad json: ") + e.what());
  }
  Scene s;
  try {
    s.width = j.at("width").get<int>();
    s.height = j.at("height").get<int>();
    s.background_color = rgb_from_json(j.at("background_color"));
    s.target_class = j.at("target_class").get<std::string>();
    for (const auto& js : j.at("shapes")) {
      Shape sh;
      std::string kind = js.at("kind").get<std::string>();
      if (kind == "disk") {
        sh.kind = Shape::Kind::disk;
      } else if (kind == "square") {
        sh.kind = Shape::Kind::square;
      } else {
        fail(errc::ingestion, "scene: unknown shape kind '" + kind + "'");
      }
      sh.cls = js.at("cls").get<std::string>();
      sh.cx = js.at("cx").get<int>();
      sh.cy = js.at("cy").get<int>();
      sh.size = js.at("size").get<int>();
      sh.color = rgb_from_json(js.at("color"));
      s.shapes.push_back(sh);
    }
    if (j.contains("refs")) s.refs = j.at("refs").get<std::vector<int>>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(errc::ingestion, std::string("scene: missing/invalid field: ") + e.what());
  }
  s.validate();
  return s;
}

Scene Scene::from_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(errc::ingestion, "scene: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json_text(ss.str());
}

std::string Scene::to_json_text() const {
  json j;
  j["width"] = width;
  j["height"] = height;
  j["background_color"] = {background_color[0], background_color[1], background_color[2]};
  j["target_class"] = target_class;
  j["shapes"] = json::array();
  for (const auto& s : shapes) {
    json js;
    js["kind"] = s.kind == Shape::Kind::disk ? "disk" : "square";
    js["cls"] = s.cls;
    js["cx"] = s.cx;
    js["cy"] = s.cy;
    js["size"] = s.size;
    js["color"] = {s.color[0], s.color[1], s.color[2]};
    j["shapes"].push_back(js);
  }
  j["refs"] = refs;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// MockSegmenter

namespace {

// Connected components over exact-color regions, 4-connectivity, raster
// label order.
struct RegionMap {
  int w = 0, h = 0;
  std::vector<int32_t> id;  // per pixel
  struct Region {
    int64_t area = 0;
    Box bbox;
    uint32_t color = 0;
  };
  std::vector<Region> regions;
};

RegionMap build_regions(const RawImage& img) {
  RegionMap rm;
  rm.w = img.width;
  rm.h = img.height;
  const int n = rm.w * rm.h;
  rm.id.assign((size_t)n, -1);
  std::vector<int> stack;
  for (int i = 0; i < n; ++i) {
    if (rm.id[i] >= 0) continue;
    int32_t rid = (int32_t)rm.regions.size();
    int sx = i % rm.w, sy = i / rm.w;
    uint32_t col = pack_rgb(img.pixel(sx, sy));
    RegionMap::Region reg;
    reg.color = col;
    reg.bbox = Box{sx, sy, sx + 1, sy + 1};
    stack.push_back(i);
    rm.id[i] = rid;
    while (!stack.empty()) {
      int p = stack.back();
      stack.pop_back();
      ++reg.area;
      int x = p % rm.w, y = p / rm.w;
      reg.bbox.x0 = std::min(reg.bbox.x0, x);
      reg.bbox.y0 = std::min(reg.bbox.y0, y);
      reg.bbox.x1 = std::max(reg.bbox.x1, x + 1);
      reg.bbox.y1 = std::max(reg.bbox.y1, y + 1);
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || nx[k] >= rm.w || ny[k] < 0 || ny[k] >= rm.h) continue;
        int q = ny[k] * rm.w + nx[k];
        if (rm.id[q] < 0 && pack_rgb(img.pixel(nx[k], ny[k])) == col) {
          rm.id[q] = rid;
          stack.push_back(q);
        }
      }
    }
    rm.regions.push_back(reg);
  }
  return rm;
}

class MockEmbedded : public EmbeddedImage {
 public:
  MockEmbedded(const RawImage& img) : EmbeddedImage(img.height, img.width), image(img) {
    regions = build_regions(img);
    // per-region bitmaps built once; decode hands out copies
    masks.resize(regions.regions.size());
    for (size_t r = 0; r < masks.size(); ++r) masks[r] = Bitmap(img.height, img.width);
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        masks[(size_t)regions.id[(size_t)y * img.width + x]].set(x, y);
      }
    }
  }
  RawImage image;
  RegionMap regions;
  std::vector<Bitmap> masks;
};

double jitter01(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t v = splitmix64(seed ^ splitmix64(a ^ splitmix64(b ^ splitmix64(c))));
  return (double)(v >> 11) * 0x1.0p-53;
}

}  // namespace

MockSegmenter::MockSegmenter(MockSegmenterOptions opts) : opts_(opts) {}

SegmenterInfo MockSegmenter::info() const {
  return SegmenterInfo{"mock-segmenter", "mock", 0, 0};
}

std::unique_ptr<EmbeddedImage> MockSegmenter::encode(const RawImage& image) {
  if (!image.valid()) fail(errc::invalid_parameter, "mock segmenter: invalid image");
  return std::make_unique<MockEmbedded>(image);
}

std::vector<MaskProposal> MockSegmenter::decode(const EmbeddedImage& emb,
                                                std::span<const Prompt> prompts) {
  const auto* me = dynamic_cast<const MockEmbedded*>(&emb);
  if (!me) fail(errc::invalid_parameter, "mock segmenter: foreign embedding");
  const RegionMap& rm = me->regions;

  std::vector<MaskProposal> out;
  out.reserve(prompts.size());
  for (const Prompt& p : prompts) {
    int px, py;
    if (const auto* pt = std::get_if<PointPrompt>(&p)) {
      px = pt->x;
      py = pt->y;
    } else {
      Point c = std::get<BoxPrompt>(p).box.center();
      px = c.x;
      py = c.y;
    }
    if (px < 0 || px >= rm.w || py < 0 || py >= rm.h) {
      out.push_back(MaskProposal::degenerate_entry(rm.h, rm.w, "prompt out of bounds"));
      continue;
    }
    int32_t rid = rm.id[(size_t)py * rm.w + px];
    const auto& reg = rm.regions[(size_t)rid];
    if (reg.area < opts_.min_region_px) {
      out.push_back(MaskProposal::degenerate_entry(rm.h, rm.w, "region below segmentable size"));
      continue;
    }
    float conf = (float)((double)reg.area / ((double)reg.area + 512.0));
    out.push_back(MaskProposal::from_bitmap(me->masks[(size_t)rid], conf));
  }
  return out;
}

FeatureMap MockSegmenter::features(const EmbeddedImage& emb) {
  const auto* me = dynamic_cast<const MockEmbedded*>(&emb);
  if (!me) fail(errc::invalid_parameter, "mock segmenter: foreign embedding");
  const RawImage& img = me->image;
  const int cell = std::max(1, opts_.feature_cell_px);
  FeatureMap fm;
  fm.grid_h = (img.height + cell - 1) / cell;
  fm.grid_w = (img.width + cell - 1) / cell;
  fm.dim = 4;  // mean rgb + bias channel: color-only features, no class info
  fm.src_height = img.height;
  fm.src_width = img.width;
  fm.data.assign((size_t)fm.grid_h * fm.grid_w * fm.dim, 0.0f);
  for (int gy = 0; gy < fm.grid_h; ++gy) {
    for (int gx = 0; gx < fm.grid_w; ++gx) {
      int x0 = gx * cell, x1 = std::min(img.width, x0 + cell);
      int y0 = gy * cell, y1 = std::min(img.height, y0 + cell);
      double r = 0, g = 0, b = 0;
      int cnt = 0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          Rgb c = img.pixel(x, y);
          r += c[0];
          g += c[1];
          b += c[2];
          ++cnt;
        }
      }
      float* f = fm.cell(gx, gy);
      f[0] = (float)(r / cnt / 255.0);
      f[1] = (float)(g / cnt / 255.0);
      f[2] = (float)(b / cnt / 255.0);
      f[3] = 0.25f;
      for (int d = 0; d < 4; ++d) {
        f[d] += (float)(opts_.feature_jitter * (2.0 * jitter01(opts_.seed, gx, gy, d) - 1.0));
      }
    }
  }
  return fm;
}

// ---------------------------------------------------------------------------
// MockSemanticEncoder

MockSemanticEncoder::MockSemanticEncoder(const Scene& scene, MockSemanticOptions opts)
    : MockSemanticEncoder(scene.color_to_class(), (int)scene.class_list().size(), opts) {}

MockSemanticEncoder::MockSemanticEncoder(std::map<uint32_t, int> color_to_class, int num_classes,
                                         MockSemanticOptions opts)
    : color_to_class_(std::move(color_to_class)), num_classes_(num_classes), opts_(opts) {
  if (num_classes_ < 1) fail(errc::invalid_parameter, "mock semantic: empty palette");
}

SemanticInfo MockSemanticEncoder::info() const {
  return SemanticInfo{"mock-semantic", 0, 0, num_classes_};
}

FeatureMap MockSemanticEncoder::embed(const RawImage& image) {
  if (!image.valid()) fail(errc::invalid_parameter, "mock semantic: invalid image");
  const int cell = std::max(1, opts_.cell_px);
  FeatureMap fm;
  fm.grid_h = (image.height + cell - 1) / cell;
  fm.grid_w = (image.width + cell - 1) / cell;
  fm.dim = num_classes_;
  fm.src_height = image.height;
  fm.src_width = image.width;
  fm.data.assign((size_t)fm.grid_h * fm.grid_w * fm.dim, 0.0f);

  auto class_of = [&](uint32_t packed) {
    auto it = color_to_class_.find(packed);
    if (it != color_to_class_.end()) return it->second;
    // nearest palette color; only reachable for pixels outside the palette
    int best = 0;
    int64_t bd = INT64_MAX;
    int r = (packed >> 16) & 0xff, g = (packed >> 8) & 0xff, b = packed & 0xff;
    for (const auto& [col, idx] : color_to_class_) {
      int cr = (col >> 16) & 0xff, cg = (col >> 8) & 0xff, cb = col & 0xff;
      int64_t d = (int64_t)(r - cr) * (r - cr) + (int64_t)(g - cg) * (g - cg) +
                  (int64_t)(b - cb) * (b - cb);
      if (d < bd) {
        bd = d;
        best = idx;
      }
    }
    return best;
  };

  for (int gy = 0; gy < fm.grid_h; ++gy) {
    for (int gx = 0; gx < fm.grid_w; ++gx) {
      int x0 = gx * cell, x1 = std::min(image.width, x0 + cell);
      int y0 = gy * cell, y1 = std::min(image.height, y0 + cell);
      float* f = fm.cell(gx, gy);
      int cnt = 0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          int ci = class_of(pack_rgb(image.pixel(x, y)));
          f[ci] += 1.0f;
          ++cnt;
        }
      }
      for (int d = 0; d < fm.dim; ++d) {
        f[d] = f[d] / (float)cnt +
               (float)(opts_.jitter * (2.0 * jitter01(opts_.seed, gx, gy, d) - 1.0));
      }
    }
  }
  return fm;
}

}  // namespace maskcount::mock
