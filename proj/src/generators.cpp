#include "adabatt/generators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <type_traits>

namespace adabatt {
namespace {

constexpr std::int64_t kM1 = 4294967087;  // 2^32 - 209
constexpr std::int64_t kM2 = 4294944443;  // 2^32 - 22853
constexpr std::int64_t kA12 = 1403580;
constexpr std::int64_t kA13 = 810728;
constexpr std::int64_t kA21 = 527612;
constexpr std::int64_t kA23 = 1370589;

double uniform53(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base ^ (0xa0761d6478bd642full * (stream + 1));
  std::uint64_t r = splitmix64(s);
  return splitmix64(s) ^ r;
}

// --------------------------------------------------------------------------
// Spec validation and entropy
// --------------------------------------------------------------------------

namespace {

void validate_simple(const SimpleKind& kind) {
  if (const auto* lcg = std::get_if<LcgSpec>(&kind)) {
    if (lcg->modulus < 2 || lcg->modulus > (1ull << 32))
      throw std::invalid_argument("lcg: modulus must be in [2, 2^32]");
    if (lcg->multiplier == 0 || lcg->multiplier >= lcg->modulus)
      throw std::invalid_argument("lcg: multiplier must be in [1, modulus)");
    if (lcg->increment >= lcg->modulus)
      throw std::invalid_argument("lcg: increment must be in [0, modulus)");
  } else if (const auto* b = std::get_if<BernoulliSpec>(&kind)) {
    if (!(b->p >= 0.0 && b->p <= 1.0))
      throw std::invalid_argument("bernoulli: p must be in [0, 1]");
  } else if (const auto* m = std::get_if<MarkovSpec>(&kind)) {
    for (const auto& row : m->transition) {
      for (double v : row)
        if (!(v >= 0.0)) throw std::invalid_argument("markov: entries must be >= 0");
      if (std::fabs(row[0] + row[1] - 1.0) > 1e-12)
        throw std::invalid_argument("markov: rows must sum to 1");
    }
  }
}

double simple_entropy(const SimpleKind& kind, bool& known) {
  known = true;
  if (const auto* b = std::get_if<BernoulliSpec>(&kind)) return binary_entropy(b->p);
  if (const auto* m = std::get_if<MarkovSpec>(&kind)) {
    const auto pi = markov_stationary(*m);
    return pi[0] * binary_entropy(m->transition[0][1]) +
           pi[1] * binary_entropy(m->transition[1][1]);
  }
  known = false;
  return 0.0;
}

// Applies f to a SimpleKind view of a GeneratorKind that is known not to
// hold a MixedSpec.
template <typename F>
void visit_simple(const GeneratorKind& kind, F&& f) {
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (!std::is_same_v<T, MixedSpec>) f(SimpleKind{k});
      },
      kind);
}

std::string describe_simple(const SimpleKind& kind) {
  std::ostringstream os;
  if (std::holds_alternative<Mrg32k3aSpec>(kind)) {
    os << "mrg32k3a";
  } else if (const auto* lcg = std::get_if<LcgSpec>(&kind)) {
    os << "lcg(m=" << lcg->modulus << ",a=" << lcg->multiplier
       << ",c=" << lcg->increment << ")";
  } else if (const auto* b = std::get_if<BernoulliSpec>(&kind)) {
    os << "bernoulli(p=" << b->p << ")";
  } else if (const auto* m = std::get_if<MarkovSpec>(&kind)) {
    os << "markov(" << m->transition[0][0] << "," << m->transition[0][1] << ";"
       << m->transition[1][0] << "," << m->transition[1][1] << ")";
  }
  return os.str();
}

}  // namespace

void validate(const GeneratorSpec& spec) {
  if (const auto* mixed = std::get_if<MixedSpec>(&spec.kind)) {
    if (mixed->d == 0) throw std::invalid_argument("mixed: d must be >= 1");
    validate_simple(mixed->good.kind);
    validate_simple(mixed->bad.kind);
    return;
  }
  visit_simple(spec.kind, [](const SimpleKind& k) { validate_simple(k); });
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

std::array<double, 2> markov_stationary(const MarkovSpec& m) {
  const double p01 = m.transition[0][1];
  const double p10 = m.transition[1][0];
  if (p01 + p10 <= 0.0) return {0.5, 0.5};
  return {p10 / (p01 + p10), p01 / (p01 + p10)};
}

std::optional<double> true_entropy(const GeneratorSpec& spec) {
  if (std::holds_alternative<MixedSpec>(spec.kind)) return std::nullopt;
  bool known = false;
  double h = 0.0;
  visit_simple(spec.kind,
               [&](const SimpleKind& k) { h = simple_entropy(k, known); });
  if (!known) return std::nullopt;
  return h;
}

std::string describe(const GeneratorSpec& spec) {
  std::ostringstream os;
  if (const auto* mixed = std::get_if<MixedSpec>(&spec.kind)) {
    os << "mixed(good=" << describe_simple(mixed->good.kind)
       << ",bad=" << describe_simple(mixed->bad.kind) << ",d=" << mixed->d << ")";
  } else {
    visit_simple(spec.kind,
                 [&](const SimpleKind& k) { os << describe_simple(k); });
  }
  os << " seed=" << spec.seed;
  return os.str();
}

// --------------------------------------------------------------------------
// Word engines
// --------------------------------------------------------------------------

Mrg32k3a::Mrg32k3a(std::uint64_t seed) {
  std::uint64_t s = seed ^ 0x1b8f2d4c96a5e37dull;
  for (int i = 0; i < 3; ++i) s1_[i] = 1 + static_cast<std::int64_t>(splitmix64(s) % (kM1 - 1));
  for (int i = 0; i < 3; ++i) s2_[i] = 1 + static_cast<std::int64_t>(splitmix64(s) % (kM2 - 1));
}

Mrg32k3a::Mrg32k3a(const std::array<std::uint64_t, 6>& state) {
  for (int i = 0; i < 3; ++i) {
    if (state[i] == 0 || state[i] >= static_cast<std::uint64_t>(kM1))
      throw std::invalid_argument("mrg32k3a: s1 state out of range");
    if (state[3 + i] == 0 || state[3 + i] >= static_cast<std::uint64_t>(kM2))
      throw std::invalid_argument("mrg32k3a: s2 state out of range");
    s1_[i] = static_cast<std::int64_t>(state[i]);
    s2_[i] = static_cast<std::int64_t>(state[3 + i]);
  }
}

std::uint32_t Mrg32k3a::next_word() {
  std::int64_t p1 = (kA12 * s1_[1] - kA13 * s1_[0]) % kM1;
  if (p1 < 0) p1 += kM1;
  s1_[0] = s1_[1];
  s1_[1] = s1_[2];
  s1_[2] = p1;

  std::int64_t p2 = (kA21 * s2_[2] - kA23 * s2_[0]) % kM2;
  if (p2 < 0) p2 += kM2;
  s2_[0] = s2_[1];
  s2_[1] = s2_[2];
  s2_[2] = p2;

  const std::int64_t z = (p1 > p2) ? (p1 - p2) : (p1 - p2 + kM1);
  return static_cast<std::uint32_t>(z);
}

Lcg::Lcg(const LcgSpec& spec, std::uint64_t seed) : spec_(spec) {
  state_ = seed % spec_.modulus;
  if (spec_.increment == 0) {
    // Multiplicative generators need a nonzero state; power-of-two moduli
    // additionally need an odd one to reach the maximal period.
    if (state_ == 0) state_ = 1;
    if ((spec_.modulus & (spec_.modulus - 1)) == 0) state_ |= 1;
  }
}

std::uint32_t Lcg::next_word() {
  state_ = static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(spec_.multiplier) * state_ + spec_.increment) %
      spec_.modulus);
  return static_cast<std::uint32_t>(state_);
}

// --------------------------------------------------------------------------
// Bit sources
// --------------------------------------------------------------------------

BitSequence BitSource::generate(std::uint64_t n_bits) {
  BitWriter w;
  w.reserve(n_bits);
  emit(w, n_bits);
  pos_ += n_bits;
  return std::move(w).take();
}

void BitSource::skip(std::uint64_t n_bits) {
  discard(n_bits);
  pos_ += n_bits;
}

void BitSource::seek(std::uint64_t bit_offset) {
  if (bit_offset == pos_) return;
  if (bit_offset > pos_) {
    skip(bit_offset - pos_);
    return;
  }
  reset();
  pos_ = 0;
  skip(bit_offset);
}

void BitSource::discard(std::uint64_t n_bits) {
  constexpr std::uint64_t kChunk = 1u << 20;
  while (n_bits > 0) {
    const std::uint64_t take = std::min(n_bits, kChunk);
    BitWriter scratch;
    scratch.reserve(take);
    emit(scratch, take);
    n_bits -= take;
  }
}

namespace {

/// Adapts a 32-bit word engine to a bit stream; each word contributes its
/// 32 bits most significant first.
template <typename Engine>
class WordSource final : public BitSource {
 public:
  template <typename... Args>
  explicit WordSource(Args&&... args)
      : make_([=] { return Engine(args...); }), engine_(make_()) {}

 protected:
  void reset() override {
    engine_ = make_();
    current_ = 0;
    avail_ = 0;
  }

  void emit(BitWriter& w, std::uint64_t n_bits) override {
    while (n_bits > 0) {
      if (avail_ == 0) {
        current_ = engine_.next_word();
        avail_ = 32;
      }
      const unsigned take = static_cast<unsigned>(
          std::min<std::uint64_t>(avail_, n_bits));
      w.push_msb_bits(current_ >> (avail_ - take), take);
      avail_ -= take;
      if (avail_ > 0) current_ &= (1u << avail_) - 1;
      n_bits -= take;
    }
  }

 private:
  std::function<Engine()> make_;
  Engine engine_;
  std::uint32_t current_ = 0;
  unsigned avail_ = 0;
};

class BernoulliSource final : public BitSource {
 public:
  BernoulliSource(double p, std::uint64_t seed) : p_(p), seed_(seed) { reset(); }

 protected:
  void reset() override { eng_.seed(derive_seed(seed_, 0xbe7)); }
  void emit(BitWriter& w, std::uint64_t n_bits) override {
    for (std::uint64_t i = 0; i < n_bits; ++i) w.push_bit(uniform53(eng_) < p_);
  }

 private:
  double p_;
  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

class MarkovSource final : public BitSource {
 public:
  MarkovSource(const MarkovSpec& spec, std::uint64_t seed)
      : spec_(spec), seed_(seed) {
    reset();
  }

 protected:
  void reset() override {
    eng_.seed(derive_seed(seed_, 0x3a2));
    started_ = false;
    state_ = 0;
  }
  void emit(BitWriter& w, std::uint64_t n_bits) override {
    for (std::uint64_t i = 0; i < n_bits; ++i) {
      if (!started_) {
        const auto pi = markov_stationary(spec_);
        state_ = uniform53(eng_) < pi[1] ? 1 : 0;
        started_ = true;
      } else {
        state_ = uniform53(eng_) < spec_.transition[state_][1] ? 1 : 0;
      }
      w.push_bit(state_ != 0);
    }
  }

 private:
  MarkovSpec spec_;
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  unsigned state_ = 0;
  bool started_ = false;
};

std::unique_ptr<BitSource> make_simple_source(const SimpleKind& kind,
                                              std::uint64_t seed) {
  if (std::holds_alternative<Mrg32k3aSpec>(kind))
    return std::make_unique<WordSource<Mrg32k3a>>(seed);
  if (const auto* lcg = std::get_if<LcgSpec>(&kind))
    return std::make_unique<WordSource<Lcg>>(*lcg, seed);
  if (const auto* b = std::get_if<BernoulliSpec>(&kind))
    return std::make_unique<BernoulliSource>(b->p, seed);
  const auto& m = std::get<MarkovSpec>(kind);
  return std::make_unique<MarkovSource>(m, seed);
}

class MixedSource final : public BitSource {
 public:
  MixedSource(const MixedSpec& spec, std::uint64_t seed) : d_(spec.d) {
    good_ = make_simple_source(spec.good.kind,
                               spec.good.seed.value_or(derive_seed(seed, 0x600d)));
    bad_ = make_simple_source(spec.bad.kind,
                              spec.bad.seed.value_or(derive_seed(seed, 0xbad)));
  }

 protected:
  void reset() override {
    good_->seek(0);
    bad_->seek(0);
  }
  void emit(BitWriter& w, std::uint64_t n_bits) override {
    const std::uint64_t start = position();
    const BitSequence g = good_->generate(n_bits);
    const BitSequence b = bad_->generate(n_bits);
    for (std::uint64_t j = 0; j < n_bits; ++j) {
      const std::uint64_t i = start + j + 1;  // 1-based stream position
      w.push_bit((i % d_ != 0) ? g.bit(j) : b.bit(j));
    }
  }
  void discard(std::uint64_t n_bits) override {
    good_->skip(n_bits);
    bad_->skip(n_bits);
  }

 private:
  std::uint64_t d_;
  std::unique_ptr<BitSource> good_;
  std::unique_ptr<BitSource> bad_;
};

}  // namespace

std::unique_ptr<BitSource> make_source(const GeneratorSpec& spec) {
  validate(spec);
  if (const auto* mixed = std::get_if<MixedSpec>(&spec.kind))
    return std::make_unique<MixedSource>(*mixed, spec.seed);
  std::unique_ptr<BitSource> src;
  visit_simple(spec.kind, [&](const SimpleKind& k) {
    src = make_simple_source(k, spec.seed);
  });
  return src;
}

ByteBufferSource::ByteBufferSource(std::vector<std::uint8_t> bytes)
    : data_(BitSequence::from_bytes(bytes)) {}

void ByteBufferSource::emit(BitWriter& w, std::uint64_t n_bits) {
  if (cursor_ + n_bits > data_.size())
    throw std::runtime_error("input exhausted: needs " +
                             std::to_string(cursor_ + n_bits) + " bits, file has " +
                             std::to_string(data_.size()));
  w.append(data_.slice(cursor_, n_bits));
  cursor_ += n_bits;
}

}  // namespace adabatt
