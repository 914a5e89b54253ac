#include "adabatt/bitstream.hpp"

#include <algorithm>
#include <stdexcept>

namespace adabatt {

BitSequence BitSequence::from_bytes(std::span<const std::uint8_t> data) {
  std::vector<std::uint64_t> words((data.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    words[i >> 3] |= static_cast<std::uint64_t>(data[i]) << (56 - 8 * (i & 7));
  }
  return BitSequence(std::move(words), 8 * static_cast<std::uint64_t>(data.size()));
}

BitSequence BitSequence::from_bits(std::span<const std::uint8_t> bits) {
  BitWriter w;
  w.reserve(bits.size());
  for (std::uint8_t b : bits) {
    if (b > 1) throw std::invalid_argument("from_bits: symbol is not 0 or 1");
    w.push_bit(b != 0);
  }
  return std::move(w).take();
}

BitSequence BitSequence::from_string(std::string_view s) {
  BitWriter w;
  w.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("from_string: symbol is not 0 or 1");
    w.push_bit(c == '1');
  }
  return std::move(w).take();
}

BitSequence BitSequence::from_word_bits(std::uint64_t value, unsigned n_bits) {
  if (n_bits > 64) throw std::invalid_argument("from_word_bits: width > 64");
  BitWriter w;
  w.push_msb_bits(value, n_bits);
  return std::move(w).take();
}

std::vector<std::uint8_t> BitSequence::to_bytes() const {
  std::vector<std::uint8_t> out((size_ + 7) / 8);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = byte(i);
  return out;
}

std::string BitSequence::to_string() const {
  std::string s;
  s.reserve(size_);
  for (std::uint64_t i = 0; i < size_; ++i) s.push_back(bit(i) ? '1' : '0');
  return s;
}

BitSequence BitSequence::slice(std::uint64_t start, std::uint64_t length) const {
  if (start > size_ || length > size_ - start)
    throw std::out_of_range("slice: range exceeds sequence length");
  BitWriter w;
  w.reserve(length);
  for (std::uint64_t i = 0; i < length; ++i) w.push_bit(bit(start + i));
  return std::move(w).take();
}

void BitWriter::push_msb_bits(std::uint64_t value, unsigned width) {
  if (width == 0) return;
  if (width > 64) throw std::invalid_argument("push_msb_bits: width > 64");
  if (width < 64) value &= (1ull << width) - 1;
  while (width > 0) {
    const unsigned off = static_cast<unsigned>(size_ & 63);
    if (off == 0) words_.push_back(0);
    const unsigned room = 64 - off;
    const unsigned take = std::min(room, width);
    const std::uint64_t chunk =
        (take == width) ? value : (value >> (width - take));
    const std::uint64_t masked =
        (take == 64) ? chunk : (chunk & ((1ull << take) - 1));
    words_.back() |= masked << (room - take);
    size_ += take;
    width -= take;
  }
}

void BitWriter::append(const BitSequence& s) {
  reserve(size_ + s.size());
  const auto ws = s.words();
  std::uint64_t remaining = s.size();
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const unsigned take = static_cast<unsigned>(std::min<std::uint64_t>(64, remaining));
    push_msb_bits(ws[i] >> (64 - take), take);
    remaining -= take;
  }
}

BitSequence BitWriter::take() {
  BitSequence s(std::move(words_), size_);
  words_.clear();
  size_ = 0;
  return s;
}

BitSequence BitWriter::snapshot() const {
  return BitSequence(words_, size_);
}

BitSequence decimate(const BitSequence& x, std::uint64_t step) {
  if (step == 0) throw std::invalid_argument("decimate: step must be >= 1");
  BitWriter w;
  w.reserve(x.size() / step + 1);
  for (std::uint64_t pos = 0; pos < x.size(); pos += step) w.push_bit(x.bit(pos));
  return std::move(w).take();
}

BitSequence mix(const BitSequence& good, const BitSequence& bad, std::uint64_t d) {
  if (good.size() != bad.size())
    throw std::invalid_argument("mix: sequences must have equal length");
  if (d == 0) throw std::invalid_argument("mix: d must be >= 1");
  BitWriter w;
  w.reserve(good.size());
  for (std::uint64_t pos = 0; pos < good.size(); ++pos) {
    const std::uint64_t i = pos + 1;  // 1-based position
    w.push_bit((i % d != 0) ? good.bit(pos) : bad.bit(pos));
  }
  return std::move(w).take();
}

}  // namespace adabatt
