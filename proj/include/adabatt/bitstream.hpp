#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adabatt {

/// An immutable finite binary word.
///
/// Storage is packed, 64 bits per word, with the first symbol of the
/// sequence at the most significant bit of words()[0]. Public formulas in
/// this library index symbols 1-based (x1 x2 ... xn); the accessor bit()
/// uses 0-based positions, so x_i == bit(i-1).
class BitSequence {
 public:
  BitSequence() = default;

  static BitSequence from_bytes(std::span<const std::uint8_t> data);
  /// Each element of `bits` must be 0 or 1.
  static BitSequence from_bits(std::span<const std::uint8_t> bits);
  /// Parses a string of '0'/'1' characters; anything else throws.
  static BitSequence from_string(std::string_view s);
  /// The low `n_bits` of `value`, emitted most significant first (n_bits <= 64).
  static BitSequence from_word_bits(std::uint64_t value, unsigned n_bits);

  std::uint64_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  /// 0-based access; pos must be < size().
  bool bit(std::uint64_t pos) const {
    return (words_[pos >> 6] >> (63 - (pos & 63))) & 1u;
  }

  /// Byte i of the MSB-first packing (i < size()/8 for fully defined bytes).
  std::uint8_t byte(std::uint64_t i) const {
    return static_cast<std::uint8_t>(words_[i >> 3] >> (56 - 8 * (i & 7)));
  }

  /// Packed words; trailing bits beyond size() are zero.
  std::span<const std::uint64_t> words() const { return words_; }

  /// MSB-first bytes; a trailing partial byte is zero-padded.
  std::vector<std::uint8_t> to_bytes() const;
  std::string to_string() const;

  BitSequence slice(std::uint64_t start, std::uint64_t length) const;

  bool operator==(const BitSequence&) const = default;

 private:
  friend class BitWriter;
  BitSequence(std::vector<std::uint64_t> words, std::uint64_t size)
      : words_(std::move(words)), size_(size) {}

  std::vector<std::uint64_t> words_;
  std::uint64_t size_ = 0;
};

/// Incremental builder producing a BitSequence.
class BitWriter {
 public:
  void reserve(std::uint64_t n_bits) { words_.reserve((n_bits + 63) / 64); }

  void push_bit(bool b) {
    const unsigned off = static_cast<unsigned>(size_ & 63);
    if (off == 0) words_.push_back(0);
    if (b) words_.back() |= (1ull << (63 - off));
    ++size_;
  }

  /// Appends the low `width` bits of `value`, most significant first.
  void push_msb_bits(std::uint64_t value, unsigned width);

  void append(const BitSequence& s);

  std::uint64_t size() const { return size_; }

  /// Consumes the writer.
  BitSequence take();
  /// Copy of the current content; the writer remains usable.
  BitSequence snapshot() const;

 private:
  std::vector<std::uint64_t> words_;
  std::uint64_t size_ = 0;
};

/// Subsequence at 1-based positions 1, 1+step, 1+2*step, ...
/// Output length is ceil(n/step). step == 0 throws.
BitSequence decimate(const BitSequence& x, std::uint64_t step);

/// Positionwise mixture m_i = good_i when i mod d != 0, else bad_i
/// (1-based i). Inputs must have equal length; d == 0 throws.
BitSequence mix(const BitSequence& good, const BitSequence& bad, std::uint64_t d);

}  // namespace adabatt
