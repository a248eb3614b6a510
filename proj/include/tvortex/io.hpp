#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <type_traits>

#include "tvortex/errors.hpp"

namespace tvortex::io {

template <typename T>
void append_le(std::string& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    static_assert(sizeof(T) == sizeof(U));
    const U bits = std::bit_cast<U>(value);
    for (std::size_t b = 0; b < sizeof(U); ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
}

class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    std::string_view take(std::size_t count) {
        if (count > remaining()) throw FormatError("unexpected end of binary data");
        const auto out = data_.substr(pos_, count);
        pos_ += count;
        return out;
    }

    template <typename T>
    T read_le() {
        using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
        const auto bytes = take(sizeof(U));
        U bits = 0;
        for (std::size_t b = 0; b < sizeof(U); ++b)
            bits |= static_cast<U>(static_cast<unsigned char>(bytes[b])) << (8 * b);
        return std::bit_cast<T>(bits);
    }

    std::size_t remaining() const { return data_.size() - pos_; }

private:
    std::string_view data_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over the target.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

// Shortest round-trip-safe text form: printf("%.17g").
std::string format_double(double v);

}  // namespace tvortex::io
