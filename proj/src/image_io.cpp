// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace mvfsad {
namespace {

bool has_png_extension(const std::string& path) {
  if (path.size() < 4) return false;
  std::string ext = path.substr(path.size() - 4);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png";
}

bool is_png_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  unsigned char sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), 8);
  return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

// Decoded greyscale or RGB raster with its full-scale value.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 0;
  double max_value = 255.0;
  std::vector<std::uint16_t> samples;
};

Raster read_png(const std::string& path, bool want_rgb) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw IoError("cannot decode PNG " + path + ": " + image.message);
  }
  Raster r;
  r.width = static_cast<int>(image.width);
  r.height = static_cast<int>(image.height);
  r.channels = want_rgb ? 3 : 1;
  const bool sixteen = !want_rgb && (image.format & PNG_FORMAT_FLAG_LINEAR) != 0;
  image.format = want_rgb ? PNG_FORMAT_RGB : (sixteen ? PNG_FORMAT_LINEAR_Y : PNG_FORMAT_GRAY);
  const std::size_t count = static_cast<std::size_t>(r.width) * r.height * r.channels;
  if (sixteen) {
    std::vector<png_uint_16> buf(count);
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
      throw IoError("cannot decode PNG " + path + ": " + image.message);
    }
    r.samples.assign(buf.begin(), buf.end());
    r.max_value = 65535.0;
  } else {
    std::vector<png_byte> buf(count);
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
      throw IoError("cannot decode PNG " + path + ": " + image.message);
    }
    r.samples.assign(buf.begin(), buf.end());
  }
  return r;
}

void skip_space_and_comments(std::istream& in) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

Raster read_netpbm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[2] = {};
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
    throw IoError(path + ": not a binary PGM/PPM file (byte offset 0)");
  }
  Raster r;
  r.channels = magic[1] == '6' ? 3 : 1;
  int max_value = 0;
  skip_space_and_comments(in);
  in >> r.width;
  skip_space_and_comments(in);
  in >> r.height;
  skip_space_and_comments(in);
  in >> max_value;
  if (!in || r.width <= 0 || r.height <= 0 || max_value <= 0 || max_value > 65535) {
    throw IoError(path + ": malformed Netpbm header (byte offset " + std::to_string(static_cast<long long>(in.tellg())) + ")");
  }
  in.get();  // single whitespace before the raster
  r.max_value = max_value;
  const std::size_t count = static_cast<std::size_t>(r.width) * r.height * r.channels;
  r.samples.resize(count);
  const bool wide = max_value > 255;
  std::vector<unsigned char> bytes(count * (wide ? 2 : 1));
  const auto offset = static_cast<long long>(in.tellg());
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
    throw IoError(path + ": truncated raster (expected " + std::to_string(bytes.size()) + " bytes from offset " +
                  std::to_string(offset) + ")");
  }
  for (std::size_t i = 0; i < count; ++i) {
    r.samples[i] = wide ? static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]) : bytes[i];
  }
  return r;
}

Raster read_raster(const std::string& path, bool want_rgb) {
  if (is_png_file(path)) return read_png(path, want_rgb);
  return read_netpbm(path);
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

void write_png(const std::string& path, int w, int h, png_uint_32 format, const void* data) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
    throw IoError("cannot write PNG " + path + ": " + image.message);
  }
}

void write_netpbm(const std::string& path, int w, int h, int channels, int max_value,
                  const std::vector<unsigned char>& raster) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << (channels == 3 ? "P6" : "P5") << "\n" << w << " " << h << "\n" << max_value << "\n";
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace

Image read_image(const std::string& path) {
  const Raster r = read_raster(path, true);
  Image img(r.height, r.width);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    for (int ch = 0; ch < 3; ++ch) {
      const std::size_t src = r.channels == 3 ? p * 3 + ch : p;
      img.data[p * 3 + ch] = r.samples[src] / r.max_value;
    }
  }
  return img;
}

void write_image(const std::string& path, const Image& image) {
  std::vector<unsigned char> raster(image.data.size());
  std::transform(image.data.begin(), image.data.end(), raster.begin(), to_byte);
  if (has_png_extension(path)) {
    write_png(path, image.width, image.height, PNG_FORMAT_RGB, raster.data());
  } else {
    write_netpbm(path, image.width, image.height, 3, 255, raster);
  }
}

ScalarMap read_gray(const std::string& path) {
  const Raster r = read_raster(path, false);
  ScalarMap m(r.height, r.width);
  for (std::size_t p = 0; p < m.size(); ++p) {
    double v = 0.0;
    if (r.channels == 3) {
      v = (r.samples[p * 3] + r.samples[p * 3 + 1] + r.samples[p * 3 + 2]) / 3.0;
    } else {
      v = r.samples[p];
    }
    m.values[p] = v / r.max_value;
  }
  return m;
}

Mask read_mask(const std::string& path) {
  const ScalarMap g = read_gray(path);
  Mask m(g.height, g.width, 0);
  for (std::size_t i = 0; i < g.size(); ++i) m.values[i] = g.values[i] >= 0.5 ? 1 : 0;
  return m;
}

void write_mask(const std::string& path, const Mask& mask) {
  std::vector<unsigned char> raster(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) raster[i] = mask.values[i] ? 255 : 0;
  if (has_png_extension(path)) {
    write_png(path, mask.width, mask.height, PNG_FORMAT_GRAY, raster.data());
  } else {
    write_netpbm(path, mask.width, mask.height, 1, 255, raster);
  }
}

void write_map16(const std::string& path, const ScalarMap& map) {
  std::vector<std::uint16_t> q(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    q[i] = static_cast<std::uint16_t>(std::lround(std::clamp(map.values[i], 0.0, 1.0) * 65535.0));
  }
  if (has_png_extension(path)) {
    write_png(path, map.width, map.height, PNG_FORMAT_LINEAR_Y, q.data());
    return;
  }
  std::vector<unsigned char> raster(q.size() * 2);
  for (std::size_t i = 0; i < q.size(); ++i) {
    raster[2 * i] = static_cast<unsigned char>(q[i] >> 8);
    raster[2 * i + 1] = static_cast<unsigned char>(q[i] & 0xff);
  }
  write_netpbm(path, map.width, map.height, 1, 65535, raster);
}

}  // namespace mvfsad
