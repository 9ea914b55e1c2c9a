#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "trackadv/errors.hpp"
#include "trackadv/grid.hpp"

namespace trackadv {

namespace {

// "TAGRID64" as little-endian bytes.
constexpr std::uint64_t kGridMagic = 0x3436444952474154ULL;
constexpr std::uint64_t kGridVersion = 1;

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

// Reads one whitespace-delimited PNM header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      if (!tok.empty()) {
        in.unget();
        break;
      }
    } else {
      tok.push_back(static_cast<char>(ch));
    }
    ch = in.get();
  }
  return tok;
}

std::uint64_t read_u64(std::istream& in) {
  std::array<unsigned char, 8> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[static_cast<std::size_t>(i)];
  return v;
}

void write_u64(std::ostream& out, std::uint64_t v) {
  std::array<unsigned char, 8> buf{};
  for (int i = 0; i < 8; ++i) buf[static_cast<std::size_t>(i)] = (v >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(buf.data()), 8);
}

std::uint64_t double_bits(double d) {
  std::uint64_t v = 0;
  std::memcpy(&v, &d, sizeof(v));
  return v;
}

double bits_double(std::uint64_t v) {
  double d = 0;
  std::memcpy(&d, &v, sizeof(d));
  return d;
}

}  // namespace

void save_ppm(const Frame& frame, const std::filesystem::path& path) {
  if (frame.c != 1 && frame.c != 3) {
    throw BadDimensionsError("save_ppm: channels must be 1 or 3");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_ppm: cannot open " + path.string());
  out << (frame.c == 3 ? "P6" : "P5") << "\n"
      << frame.w << " " << frame.h << "\n255\n";
  std::vector<std::uint8_t> bytes(frame.data.size());
  for (std::size_t i = 0; i < frame.data.size(); ++i) {
    bytes[i] = to_byte(frame.data[i]);
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("save_ppm: write failed for " + path.string());
}

Frame load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_ppm: cannot open " + path.string());
  const std::string magic = next_token(in);
  int channels = 0;
  if (magic == "P6") {
    channels = 3;
  } else if (magic == "P5") {
    channels = 1;
  } else {
    throw BadMagicError("load_ppm: not a binary PPM/PGM: " + path.string());
  }
  const std::string ws = next_token(in);
  const std::string hs = next_token(in);
  const std::string ms = next_token(in);
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(ws);
    h = std::stoi(hs);
    maxval = std::stoi(ms);
  } catch (const std::exception&) {
    throw BadDimensionsError("load_ppm: malformed header in " + path.string());
  }
  if (w <= 0 || h <= 0) {
    throw BadDimensionsError("load_ppm: non-positive dimensions in " +
                             path.string());
  }
  if (maxval != 255) {
    throw IoError("load_ppm: unsupported maxval in " + path.string());
  }
  in.get();  // single whitespace after maxval
  Frame frame(h, w, channels);
  std::vector<std::uint8_t> bytes(frame.data.size());
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!in) throw IoError("load_ppm: truncated payload in " + path.string());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    frame.data[i] = static_cast<double>(bytes[i]);
  }
  return frame;
}

void save_grid(const Grid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_grid: cannot open " + path.string());
  write_u64(out, kGridMagic);
  write_u64(out, kGridVersion);
  write_u64(out, static_cast<std::uint64_t>(grid.h));
  write_u64(out, static_cast<std::uint64_t>(grid.w));
  write_u64(out, static_cast<std::uint64_t>(grid.c));
  write_u64(out, double_bits(255.0));  // nominal value scale
  write_u64(out, 0);
  write_u64(out, 0);
  for (double v : grid.data) write_u64(out, double_bits(v));
  if (!out) throw IoError("save_grid: write failed for " + path.string());
}

Grid load_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_grid: cannot open " + path.string());
  if (read_u64(in) != kGridMagic || !in) {
    throw BadMagicError("load_grid: bad magic in " + path.string());
  }
  if (read_u64(in) != kGridVersion) {
    throw IoError("load_grid: unsupported version in " + path.string());
  }
  const std::uint64_t h = read_u64(in);
  const std::uint64_t w = read_u64(in);
  const std::uint64_t c = read_u64(in);
  read_u64(in);  // scale
  read_u64(in);
  read_u64(in);
  if (!in || h == 0 || w == 0 || c == 0 || h > 1u << 20 || w > 1u << 20 ||
      c > 16) {
    throw BadDimensionsError("load_grid: implausible dimensions in " +
                             path.string());
  }
  Grid grid(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
  for (double& v : grid.data) {
    v = bits_double(read_u64(in));
  }
  if (!in) throw IoError("load_grid: truncated payload in " + path.string());
  return grid;
}

}  // namespace trackadv
