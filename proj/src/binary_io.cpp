#include "rbh/binary_io.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "rbh/errors.hpp"

namespace rbh::io {

void put_magic(std::ostream& out, std::string_view magic) {
    out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> b{};
    for (std::size_t i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(b.data(), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_f64s(std::ostream& out, std::span<const double> v) {
    for (double x : v) put_f64(out, x);
}

void expect_magic(std::istream& in, std::string_view magic) {
    std::string buf(magic.size(), '\0');
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!in || buf != magic) {
        throw IoError("bad container magic, expected " + std::string(magic));
    }
}

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> b{};
    in.read(reinterpret_cast<char*>(b.data()), 8);
    if (!in) throw IoError("unexpected end of binary container");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void get_f64s(std::istream& in, std::span<double> out) {
    for (double& x : out) x = get_f64(in);
}

void write_atomically(const std::filesystem::path& path, bool binary,
                      const std::function<void(std::ostream&)>& fill) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        fill(out);
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace rbh::io
