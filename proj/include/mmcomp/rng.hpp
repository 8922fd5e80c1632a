#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace mmcomp {

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Independent random streams used by one simulated path.
enum class StreamRole : std::uint64_t { Price = 1, Noise = 2, BuyArrival = 3, SellArrival = 4, Fill = 5 };

/// Counter-based generator: output k is mix64(key + k * golden), the key being a hash of
/// (master seed, path index, role). Any (seed, path, role) triple is reproducible on its own,
/// which is what makes common random numbers across strategies exact.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t path, StreamRole role)
      : key_(derive_key(seed, path, static_cast<std::uint64_t>(role))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return detail::mix64(key_ + (++counter_) * detail::kGolden); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t counter() const { return counter_; }

  static constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t path, std::uint64_t role) {
    std::uint64_t k = detail::mix64(seed + detail::kGolden);
    k = detail::mix64(k ^ (path + 0x632BE59BD9B4E019ULL));
    k = detail::mix64(k ^ (role * 0xD1B54A32D192ED03ULL));
    return k;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Draws consumed by one simulation step. Every step consumes all of them regardless of
/// the strategy, so two strategies on the same path see the same draws.
struct StepDraws {
  double buy_uniform = 1.0;
  double sell_uniform = 1.0;
  double fill_ask_uniform = 1.0;
  double fill_bid_uniform = 1.0;
  double price_normal = 0.0;
  double noise_normal = 0.0;
};

class PathStreams {
 public:
  PathStreams(std::uint64_t seed, std::uint64_t path)
      : price_(seed, path, StreamRole::Price),
        noise_(seed, path, StreamRole::Noise),
        buy_(seed, path, StreamRole::BuyArrival),
        sell_(seed, path, StreamRole::SellArrival),
        fill_(seed, path, StreamRole::Fill) {}

  StepDraws next() {
    StepDraws d;
    d.buy_uniform = buy_.uniform();
    d.sell_uniform = sell_.uniform();
    d.fill_ask_uniform = fill_.uniform();
    d.fill_bid_uniform = fill_.uniform();
    d.price_normal = price_normal_(price_);
    d.noise_normal = noise_normal_(noise_);
    return d;
  }

 private:
  CounterRng price_;
  CounterRng noise_;
  CounterRng buy_;
  CounterRng sell_;
  CounterRng fill_;
  std::normal_distribution<double> price_normal_;
  std::normal_distribution<double> noise_normal_;
};

}  // namespace mmcomp
