#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace pceve::testkit {

using Rational = boost::multiprecision::cpp_rational;
using ScalarGame = std::function<double(std::uint64_t coalition_bits)>;

inline constexpr unsigned kMaxOraclePlayers = 10;

// Exact conversion of a finite double into a rational.
Rational exact_rational(double x);

// Shapley values from the permutation form: the average, over all K!
// orderings, of each player's marginal gain when joining its predecessors.
// Rational arithmetic throughout; converted to double once at the end.
// TooManyPlayers when k > 10.
std::vector<double> oracle_shapley_permutation(const ScalarGame& game, unsigned k);
std::vector<Rational> oracle_shapley_permutation_exact(const ScalarGame& game, unsigned k);

}  // namespace pceve::testkit
