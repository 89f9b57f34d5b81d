#ifndef PLCSEG_IO_HPP
#define PLCSEG_IO_HPP

#include <plcseg/errors.hpp>
#include <plcseg/point_cloud.hpp>

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace plcseg {

/// xyz_ascii: one whitespace separated "x y z" (or "x y z label") per line, '#' comments.
/// xyz_binary: consecutive 24-byte records of three little-endian IEEE-754 doubles.
enum class cloud_format { xyz_ascii, xyz_binary };

inline cloud_format parse_cloud_format(std::string_view name)
{
    if (name == "xyz-ascii")
        return cloud_format::xyz_ascii;
    if (name == "xyz-binary")
        return cloud_format::xyz_binary;
    throw config_error("unknown cloud format '" + std::string(name) + "' (expected xyz-ascii or xyz-binary)");
}

inline const char* to_string(cloud_format f) noexcept
{
    return f == cloud_format::xyz_ascii ? "xyz-ascii" : "xyz-binary";
}

namespace detail {

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open '" + path.string() + "' for reading");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw io_error("read failure on '" + path.string() + "'");
    return data;
}

inline bool is_space(char c) noexcept
{
    return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

inline std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i]))
            ++i;
        const std::size_t start = i;
        while (i < line.size() && !is_space(line[i]))
            ++i;
        if (i > start)
            fields.push_back(line.substr(start, i - start));
    }
    return fields;
}

inline double parse_double(std::string_view field, const std::string& where)
{
    // from_chars rejects a leading '+', which some writers emit
    if (!field.empty() && field.front() == '+')
        field.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec == std::errc::result_out_of_range)
        throw parse_error(where + ": coordinate '" + std::string(field) + "' out of range");
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw parse_error(where + ": cannot parse '" + std::string(field) + "' as a number");
    if (!std::isfinite(value))
        throw parse_error(where + ": non-finite coordinate '" + std::string(field) + "'");
    return value;
}

inline label_t parse_label(std::string_view field, const std::string& where)
{
    label_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw parse_error(where + ": cannot parse label '" + std::string(field) + "'");
    return value;
}

inline std::uint64_t load_le64(const unsigned char* p) noexcept
{
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | p[i];
    return v;
}

inline void store_le64(std::uint64_t v, char* p) noexcept
{
    for (int i = 0; i < 8; ++i) {
        p[i] = static_cast<char>(v & 0xffu);
        v >>= 8;
    }
}

inline point_cloud parse_ascii(std::string_view text, const std::string& name)
{
    point_cloud cloud;
    std::size_t line_no = 0;
    std::size_t columns = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        const auto fields = split_fields(line);
        if (fields.empty() || fields.front().front() == '#')
            continue;
        const std::string where = name + ":" + std::to_string(line_no);
        if (fields.size() != 3 && fields.size() != 4)
            throw parse_error(where + ": expected 3 or 4 fields, found " + std::to_string(fields.size()));
        if (columns == 0) {
            columns = fields.size();
            if (columns == 4)
                cloud.labels.emplace();
        } else if (fields.size() != columns) {
            throw parse_error(where + ": expected " + std::to_string(columns) + " fields like earlier lines, found " +
                              std::to_string(fields.size()));
        }
        cloud.points.push_back({parse_double(fields[0], where), parse_double(fields[1], where),
                                parse_double(fields[2], where)});
        if (columns == 4)
            cloud.labels->push_back(parse_label(fields[3], where));
    }
    return cloud;
}

inline point_cloud parse_binary(std::string_view bytes, const std::string& name)
{
    constexpr std::size_t record = 24;
    if (bytes.size() % record != 0) {
        const std::size_t offset = bytes.size() - bytes.size() % record;
        throw parse_error(name + ": truncated record at byte offset " + std::to_string(offset) + " (" +
                          std::to_string(bytes.size() % record) + " trailing bytes)");
    }
    point_cloud cloud;
    cloud.points.reserve(bytes.size() / record);
    const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
    for (std::size_t off = 0; off < bytes.size(); off += record) {
        std::array<double, 3> xyz{};
        for (std::size_t k = 0; k < 3; ++k)
            xyz[k] = std::bit_cast<double>(load_le64(data + off + 8 * k));
        point3 p{xyz[0], xyz[1], xyz[2]};
        if (!is_finite(p))
            throw parse_error(name + ": non-finite coordinate in record at byte offset " + std::to_string(off));
        cloud.points.push_back(p);
    }
    return cloud;
}

inline void append_double(std::string& out, double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out.append(buf, res.ptr);
}

} // namespace detail

inline point_cloud read_cloud(const std::filesystem::path& path, cloud_format format)
{
    const std::string data = detail::read_file(path);
    if (format == cloud_format::xyz_ascii)
        return detail::parse_ascii(data, path.string());
    return detail::parse_binary(data, path.string());
}

/// ASCII output carries 17 significant digits, so it reads back bit-exactly.
/// Binary output holds coordinates only; labels are dropped (write them separately).
inline void write_cloud(const point_cloud& cloud, const std::filesystem::path& path, cloud_format format)
{
    cloud.validate();
    std::string out;
    if (format == cloud_format::xyz_ascii) {
        out.reserve(cloud.size() * 64);
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const auto& p = cloud.points[i];
            detail::append_double(out, p.x);
            out.push_back(' ');
            detail::append_double(out, p.y);
            out.push_back(' ');
            detail::append_double(out, p.z);
            if (cloud.labels) {
                out.push_back(' ');
                out += std::to_string((*cloud.labels)[i]);
            }
            out.push_back('\n');
        }
    } else {
        out.resize(cloud.size() * 24);
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const auto& p = cloud.points[i];
            detail::store_le64(std::bit_cast<std::uint64_t>(p.x), out.data() + 24 * i);
            detail::store_le64(std::bit_cast<std::uint64_t>(p.y), out.data() + 24 * i + 8);
            detail::store_le64(std::bit_cast<std::uint64_t>(p.z), out.data() + 24 * i + 16);
        }
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw io_error("cannot open '" + path.string() + "' for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file)
        throw io_error("write failure on '" + path.string() + "'");
}

/// One integer label per line; the companion file of a binary cloud.
inline void write_labels(std::span<const label_t> labels, const std::filesystem::path& path)
{
    std::string out;
    out.reserve(labels.size() * 4);
    for (auto l : labels) {
        out += std::to_string(l);
        out.push_back('\n');
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw io_error("cannot open '" + path.string() + "' for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file)
        throw io_error("write failure on '" + path.string() + "'");
}

inline std::vector<label_t> read_labels(const std::filesystem::path& path)
{
    const std::string data = detail::read_file(path);
    std::vector<label_t> labels;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    const std::string_view text(data);
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        const auto fields = detail::split_fields(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (fields.empty() || fields.front().front() == '#')
            continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (fields.size() != 1)
            throw parse_error(where + ": expected one label per line");
        labels.push_back(detail::parse_label(fields.front(), where));
    }
    return labels;
}

} // namespace plcseg

#endif // PLCSEG_IO_HPP
