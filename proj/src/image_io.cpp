#include "arianna/image_io.hpp"

#include <png.h>

#include <cstring>
#include <sstream>

#include "arianna/deployment_io.hpp"

namespace arianna {

std::string encode_ppm(const Frame& f) {
  std::string out = "P6\n" + std::to_string(f.width) + " " + std::to_string(f.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(f.rgb.data()), f.rgb.size());
  return out;
}

Frame decode_ppm(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string magic;
  int w = 0;
  int h = 0;
  int maxval = 0;
  in >> magic;
  // Skip comment lines between header tokens.
  auto next_int = [&in](int& out) {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string line;
      std::getline(in, line);
      in >> std::ws;
    }
    return static_cast<bool>(in >> out);
  };
  if (magic != "P6" || !next_int(w) || !next_int(h) || !next_int(maxval)) throw FormatError("not a P6 image");
  if (w <= 0 || h <= 0 || maxval != 255) throw FormatError("unsupported PPM dimensions or depth");
  in.get();
  Frame f(w, h);
  in.read(reinterpret_cast<char*>(f.rgb.data()), static_cast<std::streamsize>(f.rgb.size()));
  if (in.gcount() != static_cast<std::streamsize>(f.rgb.size())) throw FormatError("truncated PPM data");
  return f;
}

std::vector<std::uint8_t> encode_png(const Frame& f) {
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("png init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("png encode failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t len) {
        auto* v = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
        v->insert(v->end(), data, data + len);
      },
      nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(f.width), static_cast<png_uint_32>(f.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int v = 0; v < f.height; ++v) {
    png_write_row(png, const_cast<png_bytep>(f.rgb.data() + static_cast<std::size_t>(v) * static_cast<std::size_t>(f.width) * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void write_image(const std::filesystem::path& path, const Frame& f) {
  if (path.extension() == ".png") {
    const auto bytes = encode_png(f);
    write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  } else {
    write_file_atomic(path, encode_ppm(f));
  }
}

Frame floor_image(const FloorRaster& raster) {
  Frame f(raster.cols(), raster.rows());
  for (int row = 0; row < raster.rows(); ++row) {
    for (int col = 0; col < raster.cols(); ++col) {
      f.set(col, raster.rows() - 1 - row, raster.at(col, row));
    }
  }
  return f;
}

}  // namespace arianna
