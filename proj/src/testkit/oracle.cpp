#include "pceve/testkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pceve/error.hpp"

namespace pceve::testkit {

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::kNonFiniteLogit, "oracle needs finite values");
  if (x == 0.0) return Rational(0);
  int exponent = 0;
  const double fraction = std::frexp(x, &exponent);  // x = fraction * 2^exponent
  const auto mantissa = static_cast<std::int64_t>(std::ldexp(fraction, 53));
  exponent -= 53;
  Rational r(mantissa);
  const boost::multiprecision::cpp_int scale = boost::multiprecision::cpp_int(1)
                                               << std::abs(exponent);
  return exponent >= 0 ? r * Rational(scale) : r / Rational(scale);
}

std::vector<Rational> oracle_shapley_permutation_exact(const ScalarGame& game, unsigned k) {
  if (k == 0 || k > kMaxOraclePlayers) {
    throw Error(ErrorCode::kTooManyPlayers,
                "oracle enumerates K! orderings; K must be 1.." + std::to_string(kMaxOraclePlayers));
  }
  std::vector<Rational> values(std::size_t{1} << k);
  for (std::uint64_t bits = 0; bits < values.size(); ++bits) values[bits] = exact_rational(game(bits));

  std::vector<Rational> sums(k, Rational(0));
  std::vector<unsigned> order(k);
  std::iota(order.begin(), order.end(), 0U);
  std::uint64_t orderings = 0;
  do {
    std::uint64_t before = 0;
    for (unsigned player : order) {
      const std::uint64_t after = before | (std::uint64_t{1} << player);
      sums[player] += values[after] - values[before];
      before = after;
    }
    ++orderings;
  } while (std::next_permutation(order.begin(), order.end()));

  for (auto& s : sums) s /= Rational(orderings);
  return sums;
}

std::vector<double> oracle_shapley_permutation(const ScalarGame& game, unsigned k) {
  const auto exact = oracle_shapley_permutation_exact(game, k);
  std::vector<double> out;
  out.reserve(exact.size());
  for (const auto& r : exact) out.push_back(static_cast<double>(r));
  return out;
}

}  // namespace pceve::testkit
