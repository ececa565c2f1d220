#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "vatt/plane.hpp"

namespace vatt {

namespace fs = std::filesystem;

/// 8-bit sample to [0,1].
[[nodiscard]] inline double from_byte(std::uint8_t v) noexcept { return v / 255.0; }

[[nodiscard]] inline std::uint8_t to_byte(double v) noexcept {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

// ---------------------------------------------------------------------------
// Raw planar stream: "VRGB", u32 width, u32 height, u32 frame count (all
// little endian), u8 bit depth (8), 3 reserved bytes, then per frame the R,
// G and B planes, each width*height bytes, row-major.

inline constexpr std::array<char, 4> kRawMagic{'V', 'R', 'G', 'B'};
inline constexpr std::size_t kRawHeaderBytes = 20;

struct RawHeader {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t frame_count = 0;
};

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

/// True when the file starts with the raw stream magic.
[[nodiscard]] inline bool is_raw_stream(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::array<char, 4> head{};
  return in.read(head.data(), head.size()) && head == kRawMagic;
}

/// Sequential reader; holds one frame at a time.
class RawReader {
 public:
  explicit RawReader(const fs::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw InvalidInput("cannot open " + path.string());
    std::array<unsigned char, kRawHeaderBytes> h{};
    if (!in_.read(reinterpret_cast<char*>(h.data()), h.size())) {
      throw InvalidInput(path.string() + ": truncated raw stream header");
    }
    if (!std::equal(kRawMagic.begin(), kRawMagic.end(), h.begin())) {
      throw InvalidInput(path.string() + ": not a raw VRGB stream");
    }
    header_.width = detail::get_u32(&h[4]);
    header_.height = detail::get_u32(&h[8]);
    header_.frame_count = detail::get_u32(&h[12]);
    if (h[16] != 8) throw InvalidInput(path.string() + ": unsupported bit depth " + std::to_string(h[16]));
    if (header_.width == 0 || header_.height == 0) throw InvalidInput(path.string() + ": zero frame dimension");
    if (header_.width > 1u << 15 || header_.height > 1u << 15) {
      throw InvalidInput(path.string() + ": frame dimensions too large");
    }
    buffer_.resize(3 * plane_bytes());
  }

  [[nodiscard]] const RawHeader& header() const noexcept { return header_; }
  [[nodiscard]] long frames_read() const noexcept { return next_; }

  /// Next frame, or nothing once frame_count frames have been read.
  std::optional<Frame> next() {
    if (next_ >= static_cast<long>(header_.frame_count)) return std::nullopt;
    if (!in_.read(reinterpret_cast<char*>(buffer_.data()), static_cast<std::streamsize>(buffer_.size()))) {
      throw InvalidInput(path_.string() + ": stream ends inside frame " + std::to_string(next_));
    }
    const int w = static_cast<int>(header_.width);
    const int h = static_cast<int>(header_.height);
    Frame f{Plane<Rgb>(w, h), next_++};
    const std::size_t n = plane_bytes();
    auto px = f.pixels.values();
    for (std::size_t i = 0; i < n; ++i) {
      px[i] = {from_byte(buffer_[i]), from_byte(buffer_[n + i]), from_byte(buffer_[2 * n + i])};
    }
    return f;
  }

 private:
  [[nodiscard]] std::size_t plane_bytes() const noexcept {
    return static_cast<std::size_t>(header_.width) * header_.height;
  }

  std::ifstream in_;
  fs::path path_;
  RawHeader header_;
  std::vector<unsigned char> buffer_;
  long next_ = 0;
};

/// Sequential writer. The frame count in the header is patched on close().
class RawWriter {
 public:
  RawWriter(const fs::path& path, int width, int height)
      : out_(path, std::ios::binary | std::ios::trunc), path_(path), width_(width), height_(height) {
    if (!out_) throw InvalidInput("cannot write " + path.string());
    if (width <= 0 || height <= 0) throw InvalidInput("raw stream needs positive dimensions");
    write_header(0);
  }
  RawWriter(const RawWriter&) = delete;
  RawWriter& operator=(const RawWriter&) = delete;
  ~RawWriter() {
    try {
      close();
    } catch (...) {
    }
  }

  void write(const Frame& frame) {
    if (frame.width() != width_ || frame.height() != height_) {
      throw InvalidInput("frame size differs from the stream header");
    }
    const auto px = frame.pixels.values();
    std::vector<char> plane(px.size());
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < px.size(); ++i) {
        const double v = c == 0 ? px[i].r : c == 1 ? px[i].g : px[i].b;
        plane[i] = static_cast<char>(to_byte(v));
      }
      out_.write(plane.data(), static_cast<std::streamsize>(plane.size()));
    }
    ++count_;
    if (!out_) throw InvalidInput("write failed: " + path_.string());
  }

  void close() {
    if (!out_.is_open()) return;
    out_.seekp(0);
    write_header(count_);
    out_.close();
  }

 private:
  void write_header(std::uint32_t count) {
    out_.write(kRawMagic.data(), kRawMagic.size());
    detail::put_u32(out_, static_cast<std::uint32_t>(width_));
    detail::put_u32(out_, static_cast<std::uint32_t>(height_));
    detail::put_u32(out_, count);
    const char tail[4] = {8, 0, 0, 0};
    out_.write(tail, 4);
  }

  std::ofstream out_;
  fs::path path_;
  int width_;
  int height_;
  std::uint32_t count_ = 0;
};

// ---------------------------------------------------------------------------
// Binary netpbm: P5 (gray) and P6 (RGB), maxval up to 65535.

namespace detail {

inline int pnm_int(std::istream& in, const std::string& what) {
  int c = in.peek();
  while (c != EOF) {
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
    c = in.peek();
  }
  long v = -1;
  if (!(in >> v) || v < 0 || v > 65535) throw InvalidInput("bad netpbm " + what);
  return static_cast<int>(v);
}

}  // namespace detail

[[nodiscard]] inline Frame read_pnm(const fs::path& path, long index = 0) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P5" && magic != "P6") throw InvalidInput(path.string() + ": not a binary PGM/PPM file");
  const int channels = magic == "P6" ? 3 : 1;
  int w = 0, h = 0, maxval = 0;
  try {
    w = detail::pnm_int(in, "width");
    h = detail::pnm_int(in, "height");
    maxval = detail::pnm_int(in, "maxval");
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  if (w == 0 || h == 0) throw InvalidInput(path.string() + ": zero image dimension");
  if (maxval == 0) throw InvalidInput(path.string() + ": maxval must be positive");
  in.get();  // single whitespace before the raster
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<unsigned char> raw(n * channels * bytes_per);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw InvalidInput(path.string() + ": truncated raster");
  }
  auto sample = [&](std::size_t i) {
    const unsigned v = bytes_per == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
    return std::min(1.0, static_cast<double>(v) / maxval);
  };
  Frame f{Plane<Rgb>(w, h), index};
  auto px = f.pixels.values();
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = channels == 3 ? Rgb{sample(3 * i), sample(3 * i + 1), sample(3 * i + 2)}
                          : Rgb{sample(i), sample(i), sample(i)};
  }
  return f;
}

inline void write_ppm(const fs::path& path, const Plane<Rgb>& image) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::vector<char> raster;
  raster.reserve(image.size() * 3);
  for (const auto& p : image.values()) {
    raster.push_back(static_cast<char>(to_byte(p.r)));
    raster.push_back(static_cast<char>(to_byte(p.g)));
    raster.push_back(static_cast<char>(to_byte(p.b)));
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) throw InvalidInput("write failed: " + path.string());
}

/// Gray image of a [0,1] plane, value * 255 rounded.
inline void write_pgm(const fs::path& path, const RealPlane& plane) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << "P5\n" << plane.width() << ' ' << plane.height() << "\n255\n";
  std::vector<char> raster;
  raster.reserve(plane.size());
  for (double v : plane.values()) raster.push_back(static_cast<char>(to_byte(v)));
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) throw InvalidInput("write failed: " + path.string());
}

// ---------------------------------------------------------------------------

[[nodiscard]] inline std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

[[nodiscard]] inline bool is_pnm_extension(const std::string& ext) {
  return ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

/// Regular files in `dir` whose lowercase extension is in `extensions`,
/// sorted by file name (byte order).
[[nodiscard]] inline std::vector<fs::path> list_frames(const fs::path& dir, const std::vector<std::string>& extensions) {
  if (!fs::is_directory(dir)) throw InvalidInput(dir.string() + " is not a directory");
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = lower_extension(entry.path());
    if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end()) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  return out;
}

}  // namespace vatt
