#include "sparsegpt/matrix.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace sparsegpt {

namespace {

constexpr std::array<char, 8> kMagic = {'F', 'M', 'A', 'T', '\x01', '\x00', '\x00', '\x00'};
// Refuse headers that would need more than 2^34 doubles (128 GiB).
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 34;

void put_u64(std::ostream& out, std::uint64_t v)
{
    std::array<char, 8> bytes{};
    for (std::size_t i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    }
    out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in)
{
    std::array<unsigned char, 8> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
        throw FormatError("FMAT1: unexpected end of input");
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    }
    return v;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode)
{
    std::ofstream out(path, mode);
    if (!out) {
        throw FormatError("cannot open '" + path + "' for writing");
    }
    return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode)
{
    std::ifstream in(path, mode);
    if (!in) {
        throw FormatError("cannot open '" + path + "' for reading");
    }
    return in;
}

bool ends_with_csv(const std::string& path)
{
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace

void write_fmat(std::ostream& out, ConstMatrixView m)
{
    out.write(kMagic.data(), kMagic.size());
    put_u64(out, m.rows());
    put_u64(out, m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (double v : m.row(r)) {
            put_u64(out, std::bit_cast<std::uint64_t>(v));
        }
    }
    if (!out) {
        throw FormatError("FMAT1: write failed");
    }
}

DenseMatrix read_fmat(std::istream& in)
{
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw FormatError("FMAT1: bad magic");
    }
    const std::uint64_t rows = get_u64(in);
    const std::uint64_t cols = get_u64(in);
    if (rows != 0 && cols > kMaxElements / rows) {
        throw FormatError("FMAT1: header dimensions too large");
    }
    std::vector<double> data(rows * cols);
    for (auto& v : data) {
        v = std::bit_cast<double>(get_u64(in));
    }
    return DenseMatrix(rows, cols, data);
}

void write_fmat(const std::string& path, ConstMatrixView m)
{
    auto out = open_out(path, std::ios::binary | std::ios::trunc);
    write_fmat(out, m);
}

DenseMatrix read_fmat(const std::string& path)
{
    auto in = open_in(path, std::ios::binary);
    return read_fmat(in);
}

void write_csv(std::ostream& out, ConstMatrixView m)
{
    std::array<char, 32> buf{};
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            auto res = std::to_chars(buf.data(), buf.data() + buf.size(), row[c]);
            if (c != 0) {
                out << ',';
            }
            out.write(buf.data(), res.ptr - buf.data());
        }
        out << '\n';
    }
}

DenseMatrix read_csv(std::istream& in)
{
    std::vector<double> data;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view sv = trim(line);
        if (sv.empty()) {
            continue;
        }
        std::size_t count = 0;
        while (true) {
            const auto comma = sv.find(',');
            std::string_view field = trim(sv.substr(0, comma));
            double v = 0.0;
            auto res = std::from_chars(field.data(), field.data() + field.size(), v);
            if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
                throw FormatError("CSV: cannot parse '" + std::string(field) + "' on row " + std::to_string(rows));
            }
            data.push_back(v);
            ++count;
            if (comma == std::string_view::npos) {
                break;
            }
            sv.remove_prefix(comma + 1);
        }
        if (rows == 0) {
            cols = count;
        } else if (count != cols) {
            throw FormatError("CSV: row " + std::to_string(rows) + " has " + std::to_string(count) +
                              " fields, expected " + std::to_string(cols));
        }
        ++rows;
    }
    return DenseMatrix(rows, cols, data);
}

void write_csv(const std::string& path, ConstMatrixView m)
{
    auto out = open_out(path, std::ios::trunc);
    write_csv(out, m);
}

DenseMatrix read_csv(const std::string& path)
{
    auto in = open_in(path, std::ios::in);
    return read_csv(in);
}

DenseMatrix read_matrix(const std::string& path)
{
    return ends_with_csv(path) ? read_csv(path) : read_fmat(path);
}

void write_matrix(const std::string& path, ConstMatrixView m)
{
    if (ends_with_csv(path)) {
        write_csv(path, m);
    } else {
        write_fmat(path, m);
    }
}

} // namespace sparsegpt
