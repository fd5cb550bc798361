#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace rbh::io {

// Little-endian primitives for the MRB1/MRB2 containers.

void put_magic(std::ostream& out, std::string_view magic);
void put_u64(std::ostream& out, std::uint64_t v);
void put_f64(std::ostream& out, double v);
void put_f64s(std::ostream& out, std::span<const double> v);

/// Throws IoError if the next four bytes differ from `magic`.
void expect_magic(std::istream& in, std::string_view magic);
std::uint64_t get_u64(std::istream& in);
double get_f64(std::istream& in);
void get_f64s(std::istream& in, std::span<double> out);

/// Writes through `fill` into `<path>.tmp` and renames it onto `path`, so a
/// reader never observes a partially written file.
void write_atomically(const std::filesystem::path& path, bool binary,
                      const std::function<void(std::ostream&)>& fill);

}  // namespace rbh::io
