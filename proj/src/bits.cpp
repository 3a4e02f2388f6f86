#include "nmlab/bits.hpp"

#include <bit>

#include "nmlab/errors.hpp"

namespace nmlab {

namespace {

std::size_t words_for(std::size_t len) { return (len + 63) / 64; }

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

BitString::BitString(std::size_t len) : len_(len), w_(words_for(len), 0) {}

BitString BitString::from_uint(std::uint64_t v, std::size_t len) {
    if (len > 64) throw LengthError("from_uint: length exceeds 64");
    BitString b(len);
    b.write(0, len, v);
    return b;
}

BitString BitString::parse_binary(std::string_view s) {
    BitString b(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1') b.set(i, true);
        else if (s[i] != '0') throw ShapeError("binary string contains '" + std::string(1, s[i]) + "'");
    }
    return b;
}

BitString BitString::parse_hex(std::string_view s) {
    BitString b(4 * s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        int v = hex_value(s[i]);
        if (v < 0) throw ShapeError("hex string contains '" + std::string(1, s[i]) + "'");
        b.write(4 * i, 4, static_cast<std::uint64_t>(v));
    }
    return b;
}

void BitString::set(std::size_t i, bool v) {
    std::uint64_t m = std::uint64_t{1} << (63 - (i & 63));
    if (v) w_[i >> 6] |= m;
    else w_[i >> 6] &= ~m;
}

std::uint64_t BitString::read(std::size_t pos, std::size_t n) const {
    if (n == 0) return 0;
    if (n > 64 || pos + n > len_) throw LengthError("read past end of bit string");
    std::size_t wi = pos >> 6, off = pos & 63;
    std::uint64_t hi = w_[wi] << off;
    if (off + n > 64) hi |= w_[wi + 1] >> (64 - off);
    return hi >> (64 - n);
}

void BitString::write(std::size_t pos, std::size_t n, std::uint64_t v) {
    if (n == 0) return;
    if (n > 64 || pos + n > len_) throw LengthError("write past end of bit string");
    if (n < 64) v &= (std::uint64_t{1} << n) - 1;
    std::size_t wi = pos >> 6, off = pos & 63;
    // Place v left-aligned at bit offset `off` across at most two words.
    std::uint64_t mask = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1) << (64 - n);
    std::uint64_t aligned = v << (64 - n);
    w_[wi] = (w_[wi] & ~(mask >> off)) | (aligned >> off);
    if (off + n > 64) {
        std::size_t sh = 64 - off;
        w_[wi + 1] = (w_[wi + 1] & ~(mask << sh)) | (aligned << sh);
    }
}

std::size_t BitString::popcount() const {
    std::size_t c = 0;
    for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

bool BitString::is_zero() const {
    for (auto w : w_)
        if (w) return false;
    return true;
}

std::string BitString::to_binary() const {
    std::string s(len_, '0');
    for (std::size_t i = 0; i < len_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

std::string BitString::to_hex() const {
    if (len_ % 4) throw ShapeError("hex encoding needs a length divisible by 4");
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(len_ / 4, '0');
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = digits[read(4 * i, 4)];
    return s;
}

BitString BitString::operator^(const BitString& o) const {
    if (o.len_ != len_) throw ShapeError("xor of bit strings with different lengths");
    BitString r = *this;
    for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] ^= o.w_[i];
    return r;
}

std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
    if (auto c = a.len_ <=> b.len_; c != 0) return c;
    return a.w_ <=> b.w_;
}

std::size_t BitStringHash::operator()(const BitString& b) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ b.size();
    for (auto w : b.words()) {
        h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

BitString slice(const BitString& y, std::size_t w) {
    if (w > y.size()) throw LengthError("slice width " + std::to_string(w) + " exceeds length " + std::to_string(y.size()));
    BitString r(w);
    for (std::size_t pos = 0; pos < w; pos += 64) {
        std::size_t n = std::min<std::size_t>(64, w - pos);
        r.write(pos, n, y.read(pos, n));
    }
    return r;
}

BitString suffix(const BitString& y, std::size_t w) {
    if (w > y.size()) throw LengthError("suffix start exceeds length");
    BitString r(y.size() - w);
    for (std::size_t pos = 0; pos < r.size(); pos += 64) {
        std::size_t n = std::min<std::size_t>(64, r.size() - pos);
        r.write(pos, n, y.read(w + pos, n));
    }
    return r;
}

BitString concat(const BitString& a, const BitString& b) {
    BitString r(a.size() + b.size());
    for (std::size_t pos = 0; pos < a.size(); pos += 64) {
        std::size_t n = std::min<std::size_t>(64, a.size() - pos);
        r.write(pos, n, a.read(pos, n));
    }
    for (std::size_t pos = 0; pos < b.size(); pos += 64) {
        std::size_t n = std::min<std::size_t>(64, b.size() - pos);
        r.write(a.size() + pos, n, b.read(pos, n));
    }
    return r;
}

RowMatrix::RowMatrix(std::vector<BitString> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw ShapeError("row matrix needs at least one row");
    width_ = rows_.front().size();
    for (const auto& r : rows_)
        if (r.size() != width_) throw ShapeError("row matrix rows differ in width");
}

RowMatrix::RowMatrix(std::size_t rows, std::size_t width)
    : width_(width), rows_(rows, BitString(width)) {
    if (rows == 0) throw ShapeError("row matrix needs at least one row");
}

RowMatrix RowMatrix::block(std::size_t first, std::size_t count) const {
    if (first >= rows_.size()) throw ShapeError("row block starts past the last row");
    std::size_t end = std::min(rows_.size(), first + count);
    return RowMatrix(std::vector<BitString>(rows_.begin() + first, rows_.begin() + end));
}

}  // namespace nmlab
