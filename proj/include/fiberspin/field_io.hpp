#pragma once

// Field export: CSV sample dumps and PPM intensity/phase maps.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "field.hpp"

namespace fiberspin {

/// Columns r_um, phi_rad, Re(Ex), Im(Ex), Re(Ey), Im(Ey); one row per sample.
inline void write_field_csv(const TransverseField& f, std::ostream& os) {
  const GridSpec& g = f.grid();
  os << "r_um,phi_rad,re_ex,im_ex,re_ey,im_ey\n";
  os << std::setprecision(17);
  for (int i = 0; i < g.n_r; ++i) {
    for (int j = 0; j < g.n_phi; ++j) {
      const Jones& s = f.at(i, j);
      os << g.r(i) << ',' << g.phi(j) << ',' << s.x.real() << ',' << s.x.imag() << ','
         << s.y.real() << ',' << s.y.imag() << '\n';
    }
  }
}

/// 8-bit RGB raster, row-major from the top-left pixel.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  std::uint8_t* pixel(int x, int y) { return &rgb[3 * (static_cast<std::size_t>(y) * width + x)]; }
  const std::uint8_t* pixel(int x, int y) const {
    return &rgb[3 * (static_cast<std::size_t>(y) * width + x)];
  }
};

/// Binary P6 pixmap.
inline void write_ppm(const Raster& image, std::ostream& os) {
  os << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(image.rgb.data()),
           static_cast<std::streamsize>(image.rgb.size()));
}

inline void write_ppm(const Raster& image, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_ppm(image, os);
}

namespace detail {

// Nearest polar sample to the Cartesian point (x, y), or nullptr outside r_max.
inline const Jones* nearest_sample(const TransverseField& f, double x, double y) {
  const GridSpec& g = f.grid();
  const double r = std::hypot(x, y);
  if (r >= g.r_max_um) return nullptr;
  const int i = std::min(static_cast<int>(r / g.dr()), g.n_r - 1);
  double phi = std::atan2(y, x);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  const int j = static_cast<int>(std::lround(phi / g.dphi())) % g.n_phi;
  return &f.at(i, j);
}

template <class PixelFn>
Raster render(const TransverseField& f, int size, PixelFn&& fn) {
  Raster image{size, size, std::vector<std::uint8_t>(3 * static_cast<std::size_t>(size) * size, 0)};
  const double r_max = f.grid().r_max_um;
  for (int py = 0; py < size; ++py) {
    for (int px = 0; px < size; ++px) {
      const double x = ((px + 0.5) / size * 2.0 - 1.0) * r_max;
      const double y = (1.0 - (py + 0.5) / size * 2.0) * r_max;
      if (const Jones* s = nearest_sample(f, x, y)) fn(*s, image.pixel(px, py));
    }
  }
  return image;
}

// Hue wheel: level 0 and 255 both sit near red, so the map is cyclic.
inline void hue_to_rgb(int level, std::uint8_t* out) {
  const double h = level / 256.0 * 6.0;
  const int sector = static_cast<int>(h);
  const double frac = h - sector;
  const auto up = static_cast<std::uint8_t>(std::lround(255.0 * frac));
  const auto down = static_cast<std::uint8_t>(255 - up);
  switch (sector) {
    case 0: out[0] = 255; out[1] = up; out[2] = 0; break;
    case 1: out[0] = down; out[1] = 255; out[2] = 0; break;
    case 2: out[0] = 0; out[1] = 255; out[2] = up; break;
    case 3: out[0] = 0; out[1] = down; out[2] = 255; break;
    case 4: out[0] = up; out[1] = 0; out[2] = 255; break;
    default: out[0] = 255; out[1] = 0; out[2] = down; break;
  }
}

}  // namespace detail

/// Phase in [-pi, pi) quantized into 256 levels.
inline int phase_level(double phase) {
  const double t = (phase + std::numbers::pi) / (2.0 * std::numbers::pi);
  return static_cast<int>(std::floor(t * 256.0)) & 0xff;
}

/// Linear grayscale map of |Ex|^2 + |Ey|^2, scaled to the field's peak.
inline Raster intensity_image(const TransverseField& f, int size = 256) {
  const double peak = f.peak_amplitude();
  const double scale = peak > 0.0 ? 255.0 / (peak * peak) : 0.0;
  return detail::render(f, size, [&](const Jones& s, std::uint8_t* px) {
    const auto v = static_cast<std::uint8_t>(std::lround(std::min(255.0, s.norm2() * scale)));
    px[0] = px[1] = px[2] = v;
  });
}

/// Per-pixel phase level of arg(Ex) (arg(Ey) where Ex vanishes), -1 where the
/// intensity is negligible or the pixel lies outside the grid.
inline std::vector<int> phase_level_map(const TransverseField& f, int size = 256) {
  std::vector<int> levels(static_cast<std::size_t>(size) * size, -1);
  const double floor2 = 1e-12 * f.peak_amplitude() * f.peak_amplitude();
  const double r_max = f.grid().r_max_um;
  for (int py = 0; py < size; ++py) {
    for (int px = 0; px < size; ++px) {
      const double x = ((px + 0.5) / size * 2.0 - 1.0) * r_max;
      const double y = (1.0 - (py + 0.5) / size * 2.0) * r_max;
      const Jones* s = detail::nearest_sample(f, x, y);
      if (!s || s->norm2() <= floor2) continue;
      const complex c = std::norm(s->x) > 1e-6 * s->norm2() ? s->x : s->y;
      levels[static_cast<std::size_t>(py) * size + px] = phase_level(std::arg(c));
    }
  }
  return levels;
}

inline Raster phase_image(const TransverseField& f, int size = 256) {
  const auto levels = phase_level_map(f, size);
  Raster image{size, size, std::vector<std::uint8_t>(3 * static_cast<std::size_t>(size) * size, 0)};
  for (int py = 0; py < size; ++py) {
    for (int px = 0; px < size; ++px) {
      const int level = levels[static_cast<std::size_t>(py) * size + px];
      if (level >= 0) detail::hue_to_rgb(level, image.pixel(px, py));
    }
  }
  return image;
}

}  // namespace fiberspin
