#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nmlab {

// Fixed-length bit string. Index 0 is the leftmost bit; words are packed
// most-significant-bit first and the unused tail of the last word is zero.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t len);

    // Low `len` bits of `v`, the most significant of them first.
    static BitString from_uint(std::uint64_t v, std::size_t len);
    // '0'/'1' characters only.
    static BitString parse_binary(std::string_view s);
    // Hex digits, four bits each.
    static BitString parse_hex(std::string_view s);

    std::size_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    bool get(std::size_t i) const { return (w_[i >> 6] >> (63 - (i & 63))) & 1u; }
    void set(std::size_t i, bool v);

    // Bits [pos, pos+n) as an integer, first bit most significant. n <= 64.
    std::uint64_t read(std::size_t pos, std::size_t n) const;
    void write(std::size_t pos, std::size_t n, std::uint64_t v);
    // All bits as an integer; requires size() <= 64.
    std::uint64_t to_uint() const { return read(0, len_); }

    std::size_t popcount() const;
    bool is_zero() const;

    std::string to_binary() const;
    std::string to_hex() const;  // requires size() % 4 == 0

    BitString operator^(const BitString& o) const;

    const std::vector<std::uint64_t>& words() const { return w_; }

    friend bool operator==(const BitString& a, const BitString& b) = default;
    friend std::strong_ordering operator<=>(const BitString& a, const BitString& b);

private:
    std::size_t len_ = 0;
    std::vector<std::uint64_t> w_;
};

struct BitStringHash {
    std::size_t operator()(const BitString& b) const noexcept;
};

// First w bits of y.
BitString slice(const BitString& y, std::size_t w);
// Bits of y from position w to the end.
BitString suffix(const BitString& y, std::size_t w);
BitString concat(const BitString& a, const BitString& b);

// L >= 1 rows sharing one width.
class RowMatrix {
public:
    RowMatrix() = default;
    explicit RowMatrix(std::vector<BitString> rows);
    RowMatrix(std::size_t rows, std::size_t width);

    std::size_t rows() const { return rows_.size(); }
    std::size_t width() const { return width_; }
    const BitString& row(std::size_t i) const { return rows_.at(i); }
    const std::vector<BitString>& data() const { return rows_; }

    // Rows [first, first+count) clipped to the matrix; count >= 1 after clipping.
    RowMatrix block(std::size_t first, std::size_t count) const;

    friend bool operator==(const RowMatrix&, const RowMatrix&) = default;

private:
    std::size_t width_ = 0;
    std::vector<BitString> rows_;
};

}  // namespace nmlab
