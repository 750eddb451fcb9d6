#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

namespace opg {

struct Vec2 {
  float x = 0.0f;
  float y = 0.0f;
};

inline bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }

/// Simple polygon, vertices in order (either winding), grid units.
using Polygon = std::vector<Vec2>;

struct Box {
  double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
};

/// Binary raster over the workspace grid. Cell (x, y) covers
/// [x, x+1) x [y, y+1); membership is sampled at the cell center.
class Mask {
 public:
  Mask() = default;
  Mask(int w, int h) : w_(w), h_(h), bits_(static_cast<size_t>(w) * h, 0) {}

  int width() const { return w_; }
  int height() const { return h_; }

  bool test(int x, int y) const {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return false;
    return bits_[static_cast<size_t>(y) * w_ + x] != 0;
  }
  void set(int x, int y) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    bits_[static_cast<size_t>(y) * w_ + x] = 1;
  }

  int count() const {
    int n = 0;
    for (uint8_t b : bits_) n += b;
    return n;
  }
  bool empty() const { return count() == 0; }

  bool intersects(const Mask& o) const {
    size_t n = std::min(bits_.size(), o.bits_.size());
    for (size_t i = 0; i < n; ++i)
      if (bits_[i] && o.bits_[i]) return true;
    return false;
  }
  int intersection_count(const Mask& o) const {
    int n = 0;
    size_t m = std::min(bits_.size(), o.bits_.size());
    for (size_t i = 0; i < m; ++i) n += (bits_[i] & o.bits_[i]);
    return n;
  }

  Mask& operator|=(const Mask& o) {
    for (size_t i = 0; i < bits_.size() && i < o.bits_.size(); ++i) bits_[i] |= o.bits_[i];
    return *this;
  }
  /// Cells in this mask but not in `o`.
  Mask minus(const Mask& o) const {
    Mask r = *this;
    for (size_t i = 0; i < r.bits_.size() && i < o.bits_.size(); ++i)
      if (o.bits_[i]) r.bits_[i] = 0;
    return r;
  }
  Mask intersect(const Mask& o) const {
    Mask r = *this;
    for (size_t i = 0; i < r.bits_.size() && i < o.bits_.size(); ++i) r.bits_[i] &= o.bits_[i];
    return r;
  }

  bool subset_of(const Mask& o) const {
    for (size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i] && !(i < o.bits_.size() && o.bits_[i])) return false;
    return true;
  }

  const std::vector<uint8_t>& raw() const { return bits_; }
  std::vector<uint8_t>& raw() { return bits_; }

  bool operator==(const Mask& o) const { return w_ == o.w_ && h_ == o.h_ && bits_ == o.bits_; }

 private:
  int w_ = 0, h_ = 0;
  std::vector<uint8_t> bits_;
};

inline Polygon transform_polygon(const Polygon& poly, float x, float y, float theta) {
  const double c = std::cos(static_cast<double>(theta));
  const double s = std::sin(static_cast<double>(theta));
  Polygon out;
  out.reserve(poly.size());
  for (const Vec2& v : poly) {
    double wx = x + c * v.x - s * v.y;
    double wy = y + s * v.x + c * v.y;
    out.push_back({static_cast<float>(wx), static_cast<float>(wy)});
  }
  return out;
}

inline Box polygon_bbox(const Polygon& poly) {
  Box b{poly[0].x, poly[0].y, poly[0].x, poly[0].y};
  for (const Vec2& v : poly) {
    b.min_x = std::min(b.min_x, static_cast<double>(v.x));
    b.min_y = std::min(b.min_y, static_cast<double>(v.y));
    b.max_x = std::max(b.max_x, static_cast<double>(v.x));
    b.max_y = std::max(b.max_y, static_cast<double>(v.y));
  }
  return b;
}

/// Even-odd rule ray cast.
inline bool point_in_polygon(const Polygon& poly, double px, double py) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const double xi = poly[i].x, yi = poly[i].y;
    const double xj = poly[j].x, yj = poly[j].y;
    if ((yi > py) != (yj > py)) {
      const double t = (py - yi) / (yj - yi);
      if (px < xi + t * (xj - xi)) inside = !inside;
    }
  }
  return inside;
}

/// Cells whose center lies inside the polygon (world coordinates).
inline Mask rasterize_polygon(const Polygon& poly, int w, int h) {
  Mask m(w, h);
  if (poly.size() < 3) return m;
  Box b = polygon_bbox(poly);
  int x0 = std::max(0, static_cast<int>(std::floor(b.min_x - 0.5)));
  int x1 = std::min(w - 1, static_cast<int>(std::ceil(b.max_x)));
  int y0 = std::max(0, static_cast<int>(std::floor(b.min_y - 0.5)));
  int y1 = std::min(h - 1, static_cast<int>(std::ceil(b.max_y)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (point_in_polygon(poly, x + 0.5, y + 0.5)) m.set(x, y);
  return m;
}

/// Rectangle in the frame anchored at (ox, oy) rotated by theta, spanning
/// [-back_len, forward_len] along the axis and [-half_width, half_width]
/// across it.
inline Polygon oriented_rect(double ox, double oy, double forward_len, double half_width,
                             double theta, double back_len = 0.0) {
  const double c = std::cos(theta), s = std::sin(theta);
  auto pt = [&](double u, double v) {
    return Vec2{static_cast<float>(ox + c * u - s * v), static_cast<float>(oy + s * u + c * v)};
  };
  return {pt(-back_len, -half_width), pt(forward_len, -half_width), pt(forward_len, half_width),
          pt(-back_len, half_width)};
}

/// Morphological dilation with a square (Chebyshev) structuring element.
inline Mask chebyshev_dilate(const Mask& in, int radius) {
  const int w = in.width(), h = in.height();
  Mask out(w, h);
  auto& bits = out.raw();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!in.test(x, y)) continue;
      int ry0 = std::max(0, y - radius), ry1 = std::min(h - 1, y + radius);
      int rx0 = std::max(0, x - radius), rx1 = std::min(w - 1, x + radius);
      for (int yy = ry0; yy <= ry1; ++yy)
        std::memset(bits.data() + static_cast<size_t>(yy) * w + rx0, 1,
                    static_cast<size_t>(rx1 - rx0 + 1));
    }
  }
  return out;
}

inline double polygon_area(const Polygon& poly) {
  double a = 0;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++)
    a += static_cast<double>(poly[j].x) * poly[i].y - static_cast<double>(poly[i].x) * poly[j].y;
  return std::abs(a) * 0.5;
}

namespace detail {
inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto cross = [](Vec2 o, Vec2 p, Vec2 q) {
    return (double(p.x) - o.x) * (double(q.y) - o.y) - (double(p.y) - o.y) * (double(q.x) - o.x);
  };
  double d1 = cross(c, d, a), d2 = cross(c, d, b), d3 = cross(a, b, c), d4 = cross(a, b, d);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}
}  // namespace detail

/// Non-adjacent edges must not cross.
inline bool polygon_is_simple(const Polygon& poly) {
  const size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      size_t i2 = (i + 1) % n, j2 = (j + 1) % n;
      if (j == i || j == i2 || j2 == i) continue;
      if (detail::segments_intersect(poly[i], poly[i2], poly[j], poly[j2])) return false;
    }
  }
  return true;
}

}  // namespace opg
