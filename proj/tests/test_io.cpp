#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "doctest.h"
#include "support.hpp"
#include "wplus/error.hpp"
#include "wplus/image.hpp"
#include "wplus/latent_file.hpp"

using namespace wplus;

namespace {

std::string format_error(const std::vector<unsigned char>& bytes) {
  try {
    decode_latent(bytes);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
    return e.what();
  }
  FAIL("expected a format error");
  return {};
}

}  // namespace

TEST_CASE("latent file layout") {
  const ExtendedLatent x = quantize_f32(testing::random_latent(3, 5, 1));
  const auto bytes = encode_latent(x);
  REQUIRE(bytes.size() == 16 + 4 * 3 * 5);
  CHECK(std::memcmp(bytes.data(), "WPLT", 4) == 0);
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[8] == 3);
  CHECK(bytes[12] == 5);
  // First value, little-endian float32.
  const float first = static_cast<float>(x.values()[0]);
  unsigned char expected[4];
  std::memcpy(expected, &first, 4);
  CHECK(std::memcmp(bytes.data() + 16, expected, 4) == 0);
}

TEST_CASE("latent file round trip is bit-exact") {
  const auto dir = testing::scratch_dir("latent_file");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ExtendedLatent x = quantize_f32(testing::random_latent(1 + seed, 7, seed));
    write_latent_file(x, dir / "x.wplt");
    CHECK(read_latent_file(dir / "x.wplt") == x);
    CHECK(testing::read_bytes(dir / "x.wplt") == encode_latent(x));
  }
  // Unquantized values round to float32 on the way out.
  const ExtendedLatent raw = testing::random_latent(2, 3, 9);
  CHECK(decode_latent(encode_latent(raw)) == quantize_f32(raw));
  CHECK(quantize_f32(quantize_f32(raw)) == quantize_f32(raw));
}

TEST_CASE("malformed latent files give distinct errors") {
  const auto good = encode_latent(ExtendedLatent(2, 2, 0.5));
  auto magic = good;
  magic[0] = 'X';
  auto version = good;
  version[4] = 2;
  auto size = good;
  size.pop_back();
  const std::vector<unsigned char> header(good.begin(), good.begin() + 10);

  const std::string e_magic = format_error(magic), e_version = format_error(version), e_size = format_error(size),
                    e_header = format_error(header);
  CHECK(e_magic.find("magic") != std::string::npos);
  CHECK(e_version.find("version 2") != std::string::npos);
  CHECK(e_size.find("size") != std::string::npos);
  CHECK(e_header.find("too short") != std::string::npos);
  CHECK(e_magic != e_version);
  CHECK(e_version != e_size);
  CHECK(e_size != e_header);

  try {
    read_latent_file(testing::scratch_dir("latent_missing") / "absent.wplt");
    FAIL("expected an I/O error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("PNG export quantizes with the stated rule") {
  const auto dir = testing::scratch_dir("png");
  ImageBuffer im(4);
  const double samples[] = {-0.5, 0.0, 0.001, 0.002, 0.5, 0.499, 0.998, 1.0, 1.7, 0.25, 0.75, 0.1};
  for (std::size_t i = 0; i < im.size(); ++i) im.pixels()[i] = samples[i % 12];
  write_png(im, dir / "q.png");
  const ImageBuffer back = read_png(dir / "q.png");
  REQUIRE(back.side() == 4);
  for (std::size_t i = 0; i < im.size(); ++i) {
    const double expected = std::round(std::clamp(im.pixels()[i], 0.0, 1.0) * 255.0) / 255.0;
    CHECK(back.pixels()[i] == doctest::Approx(expected).epsilon(1e-12));
  }
  // A quantized image survives a second round trip unchanged.
  write_png(back, dir / "q2.png");
  CHECK(testing::read_bytes(dir / "q.png") == testing::read_bytes(dir / "q2.png"));
}

TEST_CASE("PNG input errors") {
  const auto dir = testing::scratch_dir("png_errors");
  SUBCASE("non-square") {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = 6;
    img.height = 4;
    img.format = PNG_FORMAT_RGB;
    std::vector<unsigned char> px(6 * 4 * 3, 128);
    REQUIRE(png_image_write_to_file(&img, (dir / "rect.png").c_str(), 0, px.data(), 0, nullptr) != 0);
    try {
      read_png(dir / "rect.png");
      FAIL("expected a shape error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ShapeMismatch);
    }
  }
  SUBCASE("not a PNG") {
    testing::write_bytes(dir / "junk.png", {'n', 'o', 'p', 'e'});
    CHECK_THROWS_AS(read_png(dir / "junk.png"), Error);
  }
  SUBCASE("missing") { CHECK_THROWS_AS(read_png(dir / "absent.png"), Error); }
}
