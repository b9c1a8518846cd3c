#include "splatseg/pgm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "splatseg/error.hpp"

namespace splatseg {

namespace {

constexpr int kMaxMaxval = 65535;

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  // Skips whitespace and '#' comments, then reads a non-negative decimal.
  long next_int(const char* field) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) {
      throw PgmHeaderError(std::string("PGM header ends before ") + field);
    }
    if (!std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      throw PgmHeaderError(std::string("PGM header: expected a number for ") + field);
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) {
        throw PgmHeaderError(std::string("PGM header: ") + field + " is too large");
      }
      ++pos_;
    }
    return value;
  }

  std::size_t pos() const noexcept { return pos_; }
  void advance(std::size_t n) noexcept { pos_ += n; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

ScalarField parse_pgm(std::string_view bytes) {
  if (bytes.size() < 2) throw PgmHeaderError("PGM header is missing");
  if (bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw PgmMagicError("unsupported magic number '" + std::string(bytes.substr(0, 2)) +
                        "' (expected P2 or P5)");
  }
  const bool binary = bytes[1] == '5';

  HeaderReader header(bytes);
  header.advance(2);
  if (header.pos() < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[2])) &&
      bytes[2] != '#') {
    throw PgmHeaderError("PGM header: magic number must be followed by whitespace");
  }
  const long width = header.next_int("width");
  const long height = header.next_int("height");
  const long maxval = header.next_int("maxval");
  if (width < 1 || height < 1) throw PgmHeaderError("PGM header: dimensions must be >= 1");
  if (maxval < 1 || maxval > kMaxMaxval) {
    throw PgmHeaderError("PGM header: maxval must be in [1, 65535], got " +
                         std::to_string(maxval));
  }
  if (width * height > 1L << 28) throw PgmHeaderError("PGM header: image too large");

  const Dims dims{static_cast<int>(width), static_cast<int>(height)};
  const std::size_t n = dims.size();
  const double scale = 1.0 / static_cast<double>(maxval);
  std::vector<double> values(n);

  if (binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t pos = header.pos();
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      throw PgmTruncatedError("PGM payload is missing");
    }
    ++pos;
    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    if (bytes.size() - pos < n * sample_bytes) {
      throw PgmTruncatedError("PGM payload holds " +
                              std::to_string((bytes.size() - pos) / sample_bytes) +
                              " samples, header declares " + std::to_string(n));
    }
    for (std::size_t k = 0; k < n; ++k) {
      unsigned sample = static_cast<unsigned char>(bytes[pos + k * sample_bytes]);
      if (sample_bytes == 2) {
        sample = (sample << 8) | static_cast<unsigned char>(bytes[pos + k * 2 + 1]);
      }
      if (sample > static_cast<unsigned>(maxval)) {
        throw DataError("PGM sample exceeds maxval");
      }
      values[k] = sample * scale;
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      header.skip_space_and_comments();
      if (header.pos() >= bytes.size()) {
        throw PgmTruncatedError("PGM payload holds " + std::to_string(k) +
                                " samples, header declares " + std::to_string(n));
      }
      const long sample = header.next_int("sample");
      if (sample > maxval) throw DataError("PGM sample exceeds maxval");
      values[k] = static_cast<double>(sample) * scale;
    }
  }
  return ScalarField(dims, std::move(values));
}

ScalarField read_pgm(const std::filesystem::path& path) { return parse_pgm(slurp(path)); }

BinaryMask read_mask_pgm(const std::filesystem::path& path) {
  return threshold(read_pgm(path), 0.5);
}

std::string encode_pgm(const ScalarField& field, int maxval) {
  if (maxval < 1 || maxval > kMaxMaxval) throw UsageError("PGM maxval must be in [1, 65535]");
  std::ostringstream out;
  out << "P5\n" << field.width() << ' ' << field.height() << '\n' << maxval << '\n';
  std::string payload;
  payload.reserve(field.size() * (maxval > 255 ? 2 : 1));
  for (double v : field.values()) {
    if (v < 0.0 || v > 1.0) {
      throw UsageError("PGM output requires values in [0, 1]; map the field first");
    }
    const auto q = static_cast<unsigned>(std::lround(v * maxval));
    if (maxval > 255) payload.push_back(static_cast<char>((q >> 8) & 0xff));
    payload.push_back(static_cast<char>(q & 0xff));
  }
  return out.str() + payload;
}

void write_pgm(const ScalarField& field, const std::filesystem::path& path, int maxval) {
  const std::string bytes = encode_pgm(field, maxval);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

void write_pgm(const BinaryMask& mask, const std::filesystem::path& path) {
  write_pgm(to_field(mask), path, 255);
}

}  // namespace splatseg
