#include <gtest/gtest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "aakit/io.hpp"
#include "aakit/serialize.hpp"
#include "aakit/synth.hpp"
#include "oracles.hpp"

using namespace aakit;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("aakit_io_" + name)).string();
}

}  // namespace

TEST(Csv, ObservationsBecomeColumns) {
  const auto x = parse_csv("1,2,3\n4,5,6\n");
  ASSERT_EQ(x.rows(), 3u);
  ASSERT_EQ(x.cols(), 2u);
  EXPECT_EQ(x(0, 1), 4.0);
  EXPECT_EQ(x(2, 0), 3.0);
}

TEST(Csv, HeaderCommentsAndBlankLinesAreSkipped) {
  const auto x = parse_csv("# produced by a test\nalpha,beta\n\n 1.5 , -2\r\n+3,4e-1\n", CsvOptions{true});
  ASSERT_EQ(x.rows(), 2u);
  ASSERT_EQ(x.cols(), 2u);
  EXPECT_EQ(x(0, 0), 1.5);
  EXPECT_EQ(x(1, 0), -2.0);
  EXPECT_EQ(x(0, 1), 3.0);
  EXPECT_EQ(x(1, 1), 0.4);
}

TEST(Csv, NonNumericFieldReportsLineAndField) {
  try {
    parse_csv("1,2\n3,abc\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), 2u);
  }
}

TEST(Csv, RejectsNonFiniteEmptyAndRaggedInput) {
  EXPECT_THROW(parse_csv("1,nan\n"), ParseError);
  EXPECT_THROW(parse_csv("1,inf\n"), ParseError);
  EXPECT_THROW(parse_csv("1,,2\n"), ParseError);
  EXPECT_THROW(parse_csv("1,2\n3\n"), ParseError);
  EXPECT_THROW(parse_csv("# only a comment\n"), ParseError);
  EXPECT_THROW(parse_csv(""), ParseError);
}

TEST(Csv, RoundTripRecoversEveryBit) {
  auto x = oracle::random_matrix(7, 40, 300);
  x(0, 0) = 1e-300;
  x(1, 0) = -123456789.123456789;
  x(2, 0) = 0.1;
  const auto back = parse_csv(format_csv(x, {}, "{\"note\":1}"));
  ASSERT_EQ(back.rows(), x.rows());
  ASSERT_EQ(back.cols(), x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j)
    for (std::size_t i = 0; i < x.rows(); ++i) EXPECT_LE(std::abs(back(i, j) - x(i, j)), 1e-15 * std::abs(x(i, j)));
  EXPECT_TRUE(back == x);
}

TEST(Csv, HeaderIsWrittenAndSkipped) {
  const auto x = oracle::random_matrix(2, 3, 301);
  const std::string text = format_csv(x, {"u", "v"});
  EXPECT_EQ(text.substr(0, 4), "u,v\n");
  EXPECT_TRUE(parse_csv(text, CsvOptions{true}) == x);
}

TEST(Binary, RoundTripIsBitwise) {
  auto x = oracle::random_matrix(5, 9, 302);
  x(4, 8) = -0.0;
  const auto back = decode_binary(encode_binary(x));
  ASSERT_EQ(back.rows(), 5u);
  ASSERT_EQ(back.cols(), 9u);
  EXPECT_EQ(std::memcmp(back.data().data(), x.data().data(), x.size() * sizeof(double)), 0);
}

TEST(Binary, EmptyMatrixRoundTrips) {
  const auto back = decode_binary(encode_binary(DenseMatrix(3, 0)));
  EXPECT_EQ(back.rows(), 3u);
  EXPECT_EQ(back.cols(), 0u);
}

TEST(Binary, CorruptInputIsRejected) {
  const std::string good = encode_binary(oracle::random_matrix(3, 4, 303));
  EXPECT_THROW(decode_binary(good.substr(0, good.size() - 1)), ParseError);
  EXPECT_THROW(decode_binary(good + "x"), ParseError);
  EXPECT_THROW(decode_binary("AAKIT2" + good.substr(6)), ParseError);
  EXPECT_THROW(decode_binary("AAK"), ParseError);
  std::string huge = good.substr(0, 22);
  for (int b = 14; b < 22; ++b) huge[b] = static_cast<char>(0xff);
  EXPECT_THROW(decode_binary(huge), ParseError);
}

TEST(Files, ReadMatrixDetectsFormatAndDigestsAgree) {
  const auto x = oracle::random_matrix(4, 11, 304);
  const std::string csv = temp_path("detect.csv");
  const std::string bin = temp_path("detect.bin");
  write_csv(csv, x);
  write_binary(bin, x);
  const auto from_csv = read_matrix(csv);
  const auto from_bin = read_matrix(bin);
  EXPECT_TRUE(from_csv == x);
  EXPECT_TRUE(from_bin == x);
  EXPECT_EQ(content_digest(from_csv), content_digest(from_bin));
  std::remove(csv.c_str());
  std::remove(bin.c_str());
}

TEST(Files, MissingFileIsAParseError) {
  EXPECT_THROW(read_matrix(temp_path("does_not_exist.csv")), ParseError);
}

TEST(Digest, SensitiveToShapeAndValues) {
  const auto x = oracle::random_matrix(2, 6, 305);
  auto y = x;
  y(1, 5) = std::nextafter(y(1, 5), 10.0);
  EXPECT_NE(content_digest(x), content_digest(y));
  const DenseMatrix a(2, 3, 1.0), b(3, 2, 1.0);
  EXPECT_NE(content_digest(a), content_digest(b));
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Serialize, ModelRoundTrip) {
  const auto pp = planted_polytope(60, 5, 3, 0.01, 306);
  AAConfig cfg;
  cfg.k = 3;
  const auto model = fit(pp.points, pp.points, cfg);
  const Json j = Json::parse(to_json(model).dump());
  const auto back = model_from_json(j);
  EXPECT_TRUE(back.a == model.a);
  EXPECT_TRUE(back.b == model.b);
  EXPECT_TRUE(back.archetypes == model.archetypes);
  EXPECT_EQ(back.objective_trace, model.objective_trace);
  EXPECT_EQ(back.converged, model.converged);
  EXPECT_EQ(back.outer_iterations, model.outer_iterations);
}

TEST(Serialize, ManifestCarriesDigestAsHex) {
  RunManifest m;
  m.command = "fit";
  m.seed = 9;
  m.input_digest = 0x1234;
  m.build_id = "test";
  const Json j = to_json(m);
  EXPECT_EQ(j["input_digest"], "0000000000001234");
  EXPECT_TRUE(j["timings"].is_null());
  m.timings = std::map<std::string, double>{{"total_ms", 1.5}};
  EXPECT_EQ(to_json(m)["timings"]["total_ms"], 1.5);
}
