#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "adabatt/bitstream.hpp"

namespace adabatt {

// --------------------------------------------------------------------------
// Generator specifications
// --------------------------------------------------------------------------

struct Mrg32k3aSpec {
  bool operator==(const Mrg32k3aSpec&) const = default;
};

/// Linear congruential generator x' = (a*x + c) mod m. The default is the
/// classically weak RANDU family (m = 2^31, a = 65539, c = 0); all three
/// parameters are configurable. Output words are the raw states, widened
/// to 32 bits.
struct LcgSpec {
  std::uint64_t modulus = 1ull << 31;
  std::uint64_t multiplier = 65539;
  std::uint64_t increment = 0;
  bool operator==(const LcgSpec&) const = default;
};

struct BernoulliSpec {
  double p = 0.5;  // probability of symbol 1
  bool operator==(const BernoulliSpec&) const = default;
};

struct MarkovSpec {
  /// transition[s][t] = P(next = t | current = s); rows must sum to 1.
  std::array<std::array<double, 2>, 2> transition{{{0.5, 0.5}, {0.5, 0.5}}};
  bool operator==(const MarkovSpec&) const = default;
};

using SimpleKind = std::variant<Mrg32k3aSpec, LcgSpec, BernoulliSpec, MarkovSpec>;

/// Component of a mixed source. When seed is not set it is derived from the
/// enclosing GeneratorSpec's seed.
struct SimpleSpec {
  SimpleKind kind;
  std::optional<std::uint64_t> seed;
  bool operator==(const SimpleSpec&) const = default;
};

/// m_i = good_i when i mod d != 0, else bad_i (1-based i). The components
/// cannot themselves be mixed.
struct MixedSpec {
  SimpleSpec good;
  SimpleSpec bad;
  std::uint64_t d = 2;
  bool operator==(const MixedSpec&) const = default;
};

using GeneratorKind =
    std::variant<Mrg32k3aSpec, LcgSpec, BernoulliSpec, MarkovSpec, MixedSpec>;

struct GeneratorSpec {
  GeneratorKind kind;
  std::uint64_t seed = 1;
  bool operator==(const GeneratorSpec&) const = default;
};

/// Throws std::invalid_argument when a field is out of range.
void validate(const GeneratorSpec& spec);

/// Entropy rate in bits per symbol when analytically known (Bernoulli,
/// Markov); nullopt otherwise.
std::optional<double> true_entropy(const GeneratorSpec& spec);

/// One-line description for reports.
std::string describe(const GeneratorSpec& spec);

/// Binary entropy h(p) in bits.
double binary_entropy(double p);

/// Stationary distribution (pi0, pi1) of a two-state chain. Falls back to
/// (1/2, 1/2) when the chain has no unique stationary distribution.
std::array<double, 2> markov_stationary(const MarkovSpec& m);

// --------------------------------------------------------------------------
// Raw word engines (exposed for known-answer tests)
// --------------------------------------------------------------------------

/// Combined multiple recursive generator MRG32k3a: two order-3 recurrences
/// modulo 4294967087 and 4294944443, combined as z = s1 - s2 mod m1 with
/// the zero case mapped to m1.
class Mrg32k3a {
 public:
  explicit Mrg32k3a(std::uint64_t seed);
  /// State vector: s1[0..2] in [1, m1), s2[0..2] in [1, m2).
  explicit Mrg32k3a(const std::array<std::uint64_t, 6>& state);
  std::uint32_t next_word();

 private:
  std::int64_t s1_[3];
  std::int64_t s2_[3];
};

class Lcg {
 public:
  Lcg(const LcgSpec& spec, std::uint64_t seed);
  std::uint32_t next_word();

 private:
  LcgSpec spec_;
  std::uint64_t state_;
};

// --------------------------------------------------------------------------
// Bit sources
// --------------------------------------------------------------------------

/// A positioned, deterministic stream of bits. (spec, seed) determines the
/// infinite stream; position() is the number of bits consumed from its
/// start. Seeking backward rewinds by replay from the seed, so any
/// generator-backed source is seekable.
class BitSource {
 public:
  virtual ~BitSource() = default;

  BitSequence generate(std::uint64_t n_bits);
  void seek(std::uint64_t bit_offset);
  void skip(std::uint64_t n_bits);
  std::uint64_t position() const { return pos_; }

 protected:
  virtual void reset() = 0;
  virtual void emit(BitWriter& w, std::uint64_t n_bits) = 0;
  virtual void discard(std::uint64_t n_bits);

 private:
  std::uint64_t pos_ = 0;
};

std::unique_ptr<BitSource> make_source(const GeneratorSpec& spec);

/// Source over an in-memory byte buffer (e.g. a file); exhausting it throws.
class ByteBufferSource final : public BitSource {
 public:
  explicit ByteBufferSource(std::vector<std::uint8_t> bytes);
  std::uint64_t total_bits() const { return data_.size(); }

 protected:
  void reset() override { cursor_ = 0; }
  void emit(BitWriter& w, std::uint64_t n_bits) override;

 private:
  BitSequence data_;
  std::uint64_t cursor_ = 0;
};

/// SplitMix64 step; used to derive seed material for sub-generators.
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace adabatt
