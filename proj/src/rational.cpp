#include "scfo/rational.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace scfo {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::NegativeFrequency: return "NegativeFrequency";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RatioOutOfRange: return "RatioOutOfRange";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::UnknownAntenna: return "UnknownAntenna";
    case ErrorCode::BandZoneMismatch: return "BandZoneMismatch";
    case ErrorCode::AlreadyQuantized: return "AlreadyQuantized";
    case ErrorCode::DesignInfeasible: return "DesignInfeasible";
    case ErrorCode::StreamTooShort: return "StreamTooShort";
    case ErrorCode::ChainWasQuantized: return "ChainWasQuantized";
    case ErrorCode::TapCountNotDivisible: return "TapCountNotDivisible";
    case ErrorCode::RateMismatch: return "RateMismatch";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::EnvelopeRegimeViolated: return "EnvelopeRegimeViolated";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::PulseTooNarrow: return "PulseTooNarrow";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

int128 abs128(int128 v) { return v < 0 ? -v : v; }

int128 gcd128(int128 a, int128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

int128 mul(int128 a, int128 b) {
  int128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "rational multiply");
  return r;
}

int128 add(int128 a, int128 b) {
  int128 r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "rational add");
  return r;
}

// Floor division for a positive divisor.
int128 floor_div(int128 a, int128 b) {
  int128 q = a / b;
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}

}  // namespace

std::string to_string(int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  // Avoid negating INT128_MIN by working digit-wise on negative values.
  std::string s;
  while (v != 0) {
    int d = static_cast<int>(v % 10);
    s.push_back(static_cast<char>('0' + (d < 0 ? -d : d)));
    v /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

Rational::Rational(int128 num, int128 den) {
  if (den == 0) throw Error(ErrorCode::ZeroDenominator, "denominator is zero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

Rational Rational::parse(std::string_view text) {
  auto fail = [&] { return Error(ErrorCode::ParseError, "cannot parse rational '" + std::string(text) + "'"); };
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw fail();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational n = parse(text.substr(0, slash));
    Rational d = parse(text.substr(slash + 1));
    if (d.num() == 0) throw Error(ErrorCode::ZeroDenominator, "denominator is zero in '" + std::string(text) + "'");
    return n / d;
  }

  std::size_t i = 0;
  bool neg = false;
  if (text[i] == '+' || text[i] == '-') {
    neg = text[i] == '-';
    ++i;
  }
  int128 mant = 0;
  int128 scale = 1;
  bool any = false;
  bool frac = false;
  for (; i < text.size(); ++i) {
    char ch = text[i];
    if (ch == '.') {
      if (frac) throw fail();
      frac = true;
      continue;
    }
    if (ch == 'e' || ch == 'E') break;
    if (!std::isdigit(static_cast<unsigned char>(ch))) throw fail();
    any = true;
    mant = add(mul(mant, 10), ch - '0');
    if (frac) scale = mul(scale, 10);
  }
  if (!any) throw fail();
  Rational value(neg ? -mant : mant, scale);
  if (i < text.size()) {
    ++i;  // skip 'e'
    bool eneg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      eneg = text[i] == '-';
      ++i;
    }
    if (i >= text.size()) throw fail();
    int exp = 0;
    for (; i < text.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) throw fail();
      exp = exp * 10 + (text[i] - '0');
      if (exp > 36) throw Error(ErrorCode::Overflow, "exponent too large");
    }
    int128 p = 1;
    for (int k = 0; k < exp; ++k) p = mul(p, 10);
    value = eneg ? value / Rational(p) : value * Rational(p);
  }
  return value;
}

double Rational::to_double() const { return static_cast<double>(to_long_double()); }

long double Rational::to_long_double() const {
  // Split off the integer part so large values keep their fractional bits.
  int128 q = floor();
  int128 r = num_ - q * den_;
  return static_cast<long double>(q) + static_cast<long double>(r) / static_cast<long double>(den_);
}

int128 Rational::floor() const { return floor_div(num_, den_); }

int128 Rational::ceil() const { return -floor_div(-num_, den_); }

int128 Rational::round_half_even() const {
  int128 q = floor();
  int128 r = num_ - q * den_;  // 0 <= r < den
  int128 twice = r * 2;
  if (twice > den_ || (twice == den_ && (q % 2 != 0))) ++q;
  return q;
}

std::string Rational::str() const {
  if (den_ == 1) return to_string(num_);
  return to_string(num_) + "/" + to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  int128 g = gcd128(a.den_, b.den_);
  int128 bd = b.den_ / g;
  int128 num = add(mul(a.num_, bd), mul(b.num_, a.den_ / g));
  return Rational(num, mul(a.den_, bd));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  int128 g1 = gcd128(a.num_, b.den_);
  int128 g2 = gcd128(b.num_, a.den_);
  if (g1 == 0) g1 = 1;
  if (g2 == 0) g2 = 1;
  return Rational(mul(a.num_ / g1, b.num_ / g2), mul(a.den_ / g2, b.den_ / g1));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw Error(ErrorCode::ZeroDenominator, "division by zero rational");
  return a * Rational(b.den_, b.num_);
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return a.num_ <=> b.num_;
  Rational d = a - b;
  return d.num_ <=> int128{0};
}

RationalFreq::RationalFreq(const Rational& hz) : hz_(hz) {
  if (hz.num() < 0) throw Error(ErrorCode::NegativeFrequency, "frequency " + hz.str() + " is negative");
}

Rational RationalFreq::period() const {
  if (hz_.num() == 0) throw Error(ErrorCode::ZeroDenominator, "period of a zero frequency");
  return Rational(hz_.den(), hz_.num());
}

RationalFreq make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::ZeroDenominator, "make_rational with zero denominator");
  return RationalFreq(Rational(num, den));
}

// ---------------------------------------------------------------------------

std::pair<std::int64_t, int> PhaseAccumulator::quantize(const Rational& position, int phases) {
  int128 q = (position * Rational(phases)).round_half_even();
  int128 shifted = q + phases / 2;
  int128 base = floor_div(shifted, phases);
  return {static_cast<std::int64_t>(base), static_cast<int>(shifted - base * phases)};
}

PhaseAccumulator::PhaseAccumulator(const Rational& ratio, int phases, const Rational& start)
    : ratio_(ratio), phases_(phases) {
  if (phases < 2 || (phases & (phases - 1)) != 0)
    throw Error(ErrorCode::InvalidArgument, "phase count must be a power of two >= 2");
  if (ratio.num() <= 0 || (ratio - Rational(1)).abs() >= Rational(1, 2))
    throw Error(ErrorCode::RatioOutOfRange, "rate ratio " + ratio.str() + " is not within 50% of unity");
  int128 g = gcd128(ratio.den(), start.den());
  denom_ = mul(ratio.den() / g, start.den());
  step_num_ = mul(ratio.num(), denom_ / ratio.den());
  int128 w = start.floor();
  whole_ = static_cast<std::int64_t>(w);
  rem_ = mul(start.num() - w * start.den(), denom_ / start.den());
  requantize();
}

void PhaseAccumulator::requantize() {
  int128 num = mul(rem_, phases_);
  int128 q = num / denom_;
  int128 r = num - q * denom_;
  int128 twice = r * 2;
  if (twice > denom_ || (twice == denom_ && (q % 2 != 0))) ++q;
  int128 shifted = add(mul(whole_, phases_), q + phases_ / 2);
  int128 base = floor_div(shifted, phases_);
  base_ = static_cast<std::int64_t>(base);
  lut_ = static_cast<int>(shifted - base * phases_);
}

AccumulatorStep PhaseAccumulator::step() {
  std::int64_t prev = base_;
  rem_ += step_num_;
  int128 carry = rem_ / denom_;
  whole_ += static_cast<std::int64_t>(carry);
  rem_ -= carry * denom_;
  ++steps_;
  requantize();
  return {static_cast<int>(base_ - prev), lut_};
}

void PhaseAccumulator::advance_by(std::int64_t n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "cannot step an accumulator backwards");
  rem_ = add(rem_, mul(step_num_, n));
  int128 carry = rem_ / denom_;
  whole_ += static_cast<std::int64_t>(carry);
  rem_ -= carry * denom_;
  steps_ += n;
  requantize();
}

Rational PhaseAccumulator::position() const { return Rational(int128{whole_}) + Rational(rem_, denom_); }

Rational PhaseAccumulator::position_after(std::int64_t n) const { return position() + ratio_ * Rational(n); }

AccumulatorResult accumulator_step(const PhaseAccumulator& acc) {
  PhaseAccumulator next = acc;
  AccumulatorStep s = next.step();
  return {s.advance, s.lut_index, next};
}

}  // namespace scfo
