#pragma once

// Procedural 28x28 digit glyphs written as standard IDX files. Seven-segment
// strokes with random affine jitter, stroke width, brightness and pixel
// noise. Stands in for handwritten-digit data where no real corpus is
// available; a two-hidden-layer MLP separates the 10 classes well but not
// perfectly once pixels go missing.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gil/rng.hpp"
#include "support/testdata.hpp"

namespace gil::testing {

namespace digit_detail {

struct Seg {
  double x0, y0, x1, y1;
};

// segment layout in a 28x28 design box
//   A top, B top-right, C bottom-right, D bottom, E bottom-left, F top-left,
//   G middle
inline const std::array<Seg, 7> kSegments = {{
    {9, 4, 19, 4},    // A
    {19, 4, 19, 14},  // B
    {19, 14, 19, 24}, // C
    {9, 24, 19, 24},  // D
    {9, 14, 9, 24},   // E
    {9, 4, 9, 14},    // F
    {9, 14, 19, 14},  // G
}};

inline const std::array<const char*, 10> kDigitSegments = {
    "ABCDEF",   // 0
    "BC",       // 1
    "ABGED",    // 2
    "ABGCD",    // 3
    "FGBC",     // 4
    "AFGCD",    // 5
    "AFGEDC",   // 6
    "ABC",      // 7
    "ABCDEFG",  // 8
    "ABCDFG",   // 9
};

inline double dist_to_segment(double px, double py, const Seg& s) {
  const double vx = s.x1 - s.x0, vy = s.y1 - s.y0;
  const double wx = px - s.x0, wy = py - s.y0;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? (wx * vx + wy * vy) / len2 : 0.0;
  t = std::min(1.0, std::max(0.0, t));
  const double dx = px - (s.x0 + t * vx), dy = py - (s.y0 + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace digit_detail

inline std::vector<std::uint8_t> render_digit(int digit, Rng& rng) {
  using namespace digit_detail;
  const double angle = rng.uniform(-0.21, 0.21);
  const double scale = rng.uniform(0.8, 1.15);
  const double shear = rng.uniform(-0.12, 0.12);
  const double tx = rng.uniform(-2.5, 2.5);
  const double ty = rng.uniform(-2.5, 2.5);
  const double stroke = rng.uniform(1.1, 2.0);
  const double brightness = rng.uniform(0.72, 1.0);
  const double cx = 14.0, cy = 14.0;
  const double ca = std::cos(angle), sa = std::sin(angle);

  std::vector<std::uint8_t> pixels(28 * 28, 0);
  const char* segs = kDigitSegments[static_cast<std::size_t>(digit)];
  for (int r = 0; r < 28; ++r) {
    for (int c = 0; c < 28; ++c) {
      // map the output pixel back into the glyph design frame
      double x = (c - cx - tx) / scale;
      double y = (r - cy - ty) / scale;
      const double xr = ca * x + sa * y;
      const double yr = -sa * x + ca * y;
      x = xr - shear * yr + cx;
      y = yr + cy;
      double dist = 1e9;
      for (const char* p = segs; *p; ++p) {
        dist = std::min(dist, dist_to_segment(x, y, kSegments[*p - 'A']));
      }
      double v = std::min(1.0, std::max(0.0, 1.4 * (stroke - dist))) * brightness;
      v += rng.normal(0.0, 0.04);
      v = std::min(1.0, std::max(0.0, v));
      pixels[static_cast<std::size_t>(r) * 28 + c] = static_cast<std::uint8_t>(v * 255.0);
    }
  }
  return pixels;
}

// n glyphs with uniformly cycled labels, as an IDX image/label file pair
inline void write_digit_idx(const std::string& images_path, const std::string& labels_path,
                            std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<std::uint8_t>> images;
  std::vector<std::uint8_t> labels;
  images.reserve(n);
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int digit = static_cast<int>(i % 10);
    images.push_back(render_digit(digit, rng));
    labels.push_back(static_cast<std::uint8_t>(digit));
  }
  // shuffle jointly so class order carries no information
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  shuffle(order, rng);
  std::vector<std::vector<std::uint8_t>> shuffled_images;
  std::vector<std::uint8_t> shuffled_labels;
  shuffled_images.reserve(n);
  shuffled_labels.reserve(n);
  for (std::size_t i : order) {
    shuffled_images.push_back(std::move(images[i]));
    shuffled_labels.push_back(labels[i]);
  }
  write_idx_pair(images_path, labels_path, shuffled_images, shuffled_labels, 28, 28);
}

}  // namespace gil::testing
