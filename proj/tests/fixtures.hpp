#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lookupf/lookupf.hpp"

namespace fixtures {

inline std::string id(const char* prefix, std::size_t i) { return lookupf::numbered_id(prefix[0], i); }

// The 20-scene fixture corpus used for drift and detector ordering checks.
inline const std::vector<lookupf::ImageBuffer>& corpus() {
  static const std::vector<lookupf::ImageBuffer> images = [] {
    std::vector<lookupf::ImageBuffer> out;
    for (std::size_t i = 0; i < 20; ++i) out.push_back(lookupf::synthesize_scene(1000 + i, 96, 96, id("F", i)));
    return out;
  }();
  return images;
}

inline lookupf::ImageBuffer noise_image(int w, int h, int channels, std::uint64_t seed, std::string name = "noise") {
  lookupf::Rng rng(seed);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * channels);
  for (auto& v : px) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return lookupf::ImageBuffer(w, h, channels, std::move(px), std::move(name));
}

inline lookupf::BinaryMask random_mask(int w, int h, double density, std::uint64_t seed) {
  lookupf::Rng rng(seed);
  lookupf::BinaryMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, rng.bernoulli(density));
  return m;
}

inline lookupf::BinaryMask rect_mask(int w, int h, lookupf::Box b) {
  lookupf::BinaryMask m(w, h);
  for (int y = b.y; y < b.y + b.h; ++y)
    for (int x = b.x; x < b.x + b.w; ++x) m.set(x, y, true);
  return m;
}

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("lookupf-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
