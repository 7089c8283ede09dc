#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "scfo/error.hpp"

namespace scfo {

using int128 = __int128;

std::string to_string(int128 v);

/// Exact signed rational with 128-bit numerator and denominator.
///
/// Always stored reduced with a positive denominator. Every arithmetic
/// operation is overflow-checked and throws ErrorCode::Overflow rather than
/// wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(int128 num, int128 den = 1);  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t v) : Rational(int128{v}, 1) {}  // NOLINT
  Rational(int v) : Rational(int128{v}, 1) {}  // NOLINT

  /// Parses "num/den", an integer, or an exact decimal such as "3000000000.1"
  /// or "4.0e9". No floating-point conversion is involved.
  static Rational parse(std::string_view text);

  int128 num() const { return num_; }
  int128 den() const { return den_; }

  double to_double() const;
  long double to_long_double() const;

  int128 floor() const;
  int128 ceil() const;
  int128 round_half_even() const;
  Rational frac() const { return *this - Rational(floor()); }
  Rational abs() const { return num_ < 0 ? -*this : *this; }
  bool is_integer() const { return den_ == 1; }

  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  int128 num_ = 0;
  int128 den_ = 1;
};

/// Clock frequency in Hz, held exactly. Never negative.
class RationalFreq {
 public:
  RationalFreq() = default;
  explicit RationalFreq(const Rational& hz);

  static RationalFreq parse(std::string_view text) { return RationalFreq(Rational::parse(text)); }

  const Rational& hz() const { return hz_; }
  int128 num() const { return hz_.num(); }
  int128 den() const { return hz_.den(); }
  double to_double() const { return hz_.to_double(); }
  std::string str() const { return hz_.str(); }

  /// Duration of one period, exact.
  Rational period() const;

  friend bool operator==(const RationalFreq&, const RationalFreq&) = default;
  friend auto operator<=>(const RationalFreq& a, const RationalFreq& b) { return a.hz_ <=> b.hz_; }

 private:
  Rational hz_;
};

/// Builds a reduced, non-negative frequency from an integer ratio.
RationalFreq make_rational(std::int64_t num, std::int64_t den);

struct AccumulatorStep {
  int advance = 1;    // input samples consumed by this output: 0 repeat, 1 normal, 2 skip
  int lut_index = 0;  // coefficient phase in [0, P)
};

/// Exact sample-phase synthesizer driving the resampler.
///
/// The position (in input samples) advances by the input/output rate ratio on
/// every output clock. The position is rounded (half to even) onto a grid of
/// 1/P samples; the grid point is split into an integer base sample and a LUT
/// index i that encodes the fractional delay (i - P/2) / P in [-1/2, 1/2).
///
/// State is an integer part plus a numerator over a fixed denominator, so a
/// step is a handful of integer operations and never rounds.
class PhaseAccumulator {
 public:
  PhaseAccumulator(const Rational& ratio, int phases, const Rational& start = Rational{});

  /// Advance one output clock.
  AccumulatorStep step();

  /// Advance n output clocks at once; same state as n calls to step().
  void advance_by(std::int64_t n);

  /// Position after `n` further steps, computed in closed form.
  Rational position_after(std::int64_t n) const;

  Rational position() const;
  const Rational& ratio() const { return ratio_; }
  int phases() const { return phases_; }
  std::int64_t base() const { return base_; }
  /// floor(position()).
  std::int64_t position_floor() const { return whole_; }
  int lut_index() const { return lut_; }
  std::int64_t steps_taken() const { return steps_; }

  /// Fractional delay in samples represented by a LUT index.
  static Rational delay_of_index(int index, int phases) {
    return Rational(int128{index} - phases / 2, phases);
  }

  /// Splits an exact position into (base sample, LUT index).
  static std::pair<std::int64_t, int> quantize(const Rational& position, int phases);

 private:
  void requantize();

  Rational ratio_;
  int phases_;
  int128 denom_;      // common denominator of position
  int128 step_num_;   // ratio * denom_
  std::int64_t whole_ = 0;  // integer part of position
  int128 rem_ = 0;          // fractional numerator, 0 <= rem_ < denom_
  std::int64_t base_ = 0;
  int lut_ = 0;
  std::int64_t steps_ = 0;
};

/// Functional form: returns the step result and the advanced accumulator.
struct AccumulatorResult {
  int advance;
  int lut_index;
  PhaseAccumulator next;
};
AccumulatorResult accumulator_step(const PhaseAccumulator& acc);

}  // namespace scfo
