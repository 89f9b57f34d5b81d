#include "test_util.hpp"

#include <plcseg/io.hpp>

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>

using namespace plcseg;
using plcseg::test::temp_dir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string read_bytes(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST(Io, ParsesTwoAsciiPoints)
{
    temp_dir dir;
    write_text(dir / "a.xyz", "0 0 0\n1 2 3");
    const auto c = read_cloud(dir / "a.xyz", cloud_format::xyz_ascii);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c.points[1], (point3{1, 2, 3}));
    EXPECT_FALSE(c.has_labels());
}

TEST(Io, EmptyFileGivesEmptyCloud)
{
    temp_dir dir;
    write_text(dir / "e.xyz", "");
    write_text(dir / "e.bin", "");
    EXPECT_TRUE(read_cloud(dir / "e.xyz", cloud_format::xyz_ascii).empty());
    EXPECT_TRUE(read_cloud(dir / "e.bin", cloud_format::xyz_binary).empty());
}

TEST(Io, CommentsBlankLinesAndLabels)
{
    temp_dir dir;
    write_text(dir / "l.xyz", "# header\n\n1 2 3 7\n  4\t5 6 -1  \n");
    const auto c = read_cloud(dir / "l.xyz", cloud_format::xyz_ascii);
    ASSERT_EQ(c.size(), 2u);
    ASSERT_TRUE(c.has_labels());
    EXPECT_EQ((*c.labels)[0], 7);
    EXPECT_EQ((*c.labels)[1], -1);
}

TEST(Io, AsciiErrorsNameTheLine)
{
    temp_dir dir;
    write_text(dir / "bad.xyz", "0 0 0\n1 x 3\n");
    try {
        (void)read_cloud(dir / "bad.xyz", cloud_format::xyz_ascii);
        FAIL() << "expected a parse error";
    } catch (const parse_error& e) {
        EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
        EXPECT_EQ(e.code(), error_code::io);
    }
    write_text(dir / "mixed.xyz", "0 0 0\n1 2 3 4\n");
    EXPECT_THROW((void)read_cloud(dir / "mixed.xyz", cloud_format::xyz_ascii), parse_error);
    write_text(dir / "nan.xyz", "0 nan 0\n");
    EXPECT_THROW((void)read_cloud(dir / "nan.xyz", cloud_format::xyz_ascii), parse_error);
    EXPECT_THROW((void)read_cloud(dir / "missing.xyz", cloud_format::xyz_ascii), io_error);
}

TEST(Io, BinaryRecordEncoding)
{
    temp_dir dir;
    point_cloud c;
    c.points.push_back({1.5, -2.0, 10.0});
    write_cloud(c, dir / "one.bin", cloud_format::xyz_binary);
    const auto bytes = read_bytes(dir / "one.bin");
    ASSERT_EQ(bytes.size(), 24u);
    // 1.5 = 0x3FF8000000000000, little-endian
    EXPECT_EQ(static_cast<unsigned char>(bytes[7]), 0x3F);
    EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 0xF8);
    const auto back = read_cloud(dir / "one.bin", cloud_format::xyz_binary);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back.points[0], (point3{1.5, -2.0, 10.0}));
}

TEST(Io, BinaryRoundTripIsExact)
{
    temp_dir dir;
    const auto c = test::random_cloud(1000, 7, 1000.0);
    write_cloud(c, dir / "r.bin", cloud_format::xyz_binary);
    const auto back = read_cloud(dir / "r.bin", cloud_format::xyz_binary);
    EXPECT_EQ(back.points, c.points);
}

TEST(Io, AsciiRoundTripIsExact)
{
    temp_dir dir;
    auto c = test::random_cloud(500, 8, 1e6);
    c.labels = std::vector<label_t>(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        (*c.labels)[i] = static_cast<label_t>(i % 5) - 1;
    write_cloud(c, dir / "r.xyz", cloud_format::xyz_ascii);
    const auto back = read_cloud(dir / "r.xyz", cloud_format::xyz_ascii);
    EXPECT_EQ(back.points, c.points);
    EXPECT_EQ(back.labels, c.labels);
}

TEST(Io, TruncatedBinaryIsAnError)
{
    temp_dir dir;
    write_text(dir / "t.bin", std::string(30, '\0'));
    EXPECT_THROW((void)read_cloud(dir / "t.bin", cloud_format::xyz_binary), parse_error);
}

TEST(Io, EmptyCloudWritesEmptyFile)
{
    temp_dir dir;
    write_cloud(point_cloud{}, dir / "e.xyz", cloud_format::xyz_ascii);
    write_cloud(point_cloud{}, dir / "e.bin", cloud_format::xyz_binary);
    EXPECT_EQ(std::filesystem::file_size(dir / "e.xyz"), 0u);
    EXPECT_EQ(std::filesystem::file_size(dir / "e.bin"), 0u);
}

TEST(Io, LabeledCloudIsFourColumnAscii)
{
    temp_dir dir;
    point_cloud c;
    c.points = {{0, 0, 0}, {1, 2, 3}};
    c.labels = std::vector<label_t>{3, 0};
    write_cloud(c, dir / "l.xyz", cloud_format::xyz_ascii);
    EXPECT_EQ(read_bytes(dir / "l.xyz"), "0 0 0 3\n1 2 3 0\n");
}

TEST(Io, LabelFileRoundTrip)
{
    temp_dir dir;
    const std::vector<label_t> labels{0, 1, 2, 100, 105, -1};
    write_labels(labels, dir / "x.labels");
    EXPECT_EQ(read_labels(dir / "x.labels"), labels);
}

TEST(Io, FormatNames)
{
    EXPECT_EQ(parse_cloud_format("xyz-ascii"), cloud_format::xyz_ascii);
    EXPECT_EQ(parse_cloud_format("xyz-binary"), cloud_format::xyz_binary);
    EXPECT_THROW(parse_cloud_format("las"), config_error);
}
