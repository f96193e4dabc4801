#include "pceve/coalition.hpp"

#include "pceve/error.hpp"

namespace pceve {

namespace {

void check_width(unsigned width, unsigned max_width) {
  if (width == 0 || width > max_width) {
    throw Error(ErrorCode::kPartCountOutOfRange,
                "part count " + std::to_string(width) + " outside [1, " +
                    std::to_string(max_width) + "]");
  }
}

// C(n, r) for n <= 23: the running product stays below 2^63.
std::uint64_t binomial(unsigned n, unsigned r) {
  std::uint64_t result = 1;
  for (unsigned i = 1; i <= r; ++i) {
    result = result * (n - r + i) / i;
  }
  return result;
}

}  // namespace

Coalition::Coalition(std::uint64_t bits, unsigned width)
    : bits_(bits), width_(width), count_(static_cast<unsigned>(std::popcount(bits))) {
  check_width(width, kMaxCoalitionWidth);
  if ((bits & ~full_mask(width)) != 0) {
    throw Error(ErrorCode::kInvalidCoalition,
                "coalition has bits set beyond width " + std::to_string(width));
  }
}

Coalition Coalition::full(unsigned width) {
  check_width(width, kMaxCoalitionWidth);
  return {full_mask(width), width};
}

Coalition Coalition::from_string(std::string_view text) {
  if (text.empty() || text.size() > kMaxCoalitionWidth) {
    throw Error(ErrorCode::kInvalidCoalition, "bad coalition string '" + std::string(text) + "'");
  }
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1') {
      bits |= std::uint64_t{1} << i;
    } else if (text[i] != '0') {
      throw Error(ErrorCode::kInvalidCoalition, "bad coalition string '" + std::string(text) + "'");
    }
  }
  return {bits, static_cast<unsigned>(text.size())};
}

Coalition Coalition::with(unsigned part) const {
  if (part >= width_) {
    throw Error(ErrorCode::kPartIndexOutOfRange, "part " + std::to_string(part));
  }
  return {bits_ | (std::uint64_t{1} << part), width_};
}

Coalition Coalition::without(unsigned part) const {
  if (part >= width_) {
    throw Error(ErrorCode::kPartIndexOutOfRange, "part " + std::to_string(part));
  }
  return {bits_ & ~(std::uint64_t{1} << part), width_};
}

std::string Coalition::to_string() const {
  std::string out(width_, '0');
  for (unsigned i = 0; i < width_; ++i) {
    if (contains(i)) out[i] = '1';
  }
  return out;
}

CoalitionSpace::CoalitionSpace(unsigned k) : k_(k) {
  check_width(k, kMaxExactParts);
  // s!(K-s-1)!/K! == 1 / (K * C(K-1, s)); the denominator is an exact integer.
  weights_.reserve(k);
  for (unsigned s = 0; s < k; ++s) {
    const std::uint64_t denom = std::uint64_t{k} * binomial(k - 1, s);
    weights_.push_back(1.0 / static_cast<double>(denom));
  }
}

double CoalitionSpace::weight(unsigned s) const {
  if (s >= k_) {
    throw Error(ErrorCode::kSizeOutOfRange,
                "coalition size " + std::to_string(s) + " >= K=" + std::to_string(k_));
  }
  return weights_[s];
}

std::vector<Coalition> enumerate_coalitions(unsigned k) {
  check_width(k, kMaxExactParts);
  const std::uint64_t n = std::uint64_t{1} << k;
  std::vector<Coalition> out;
  out.reserve(n);
  for (std::uint64_t bits = 0; bits < n; ++bits) out.emplace_back(bits, k);
  return out;
}

double shapley_weight(const CoalitionSpace& space, unsigned s) { return space.weight(s); }

std::vector<std::pair<Coalition, Coalition>> marginal_pairs(const CoalitionSpace& space,
                                                            unsigned part) {
  const unsigned k = space.k();
  if (part >= k) {
    throw Error(ErrorCode::kPartIndexOutOfRange,
                "part " + std::to_string(part) + " >= K=" + std::to_string(k));
  }
  const std::uint64_t half = std::uint64_t{1} << (k - 1);
  const std::uint64_t part_bit = std::uint64_t{1} << part;
  std::vector<std::pair<Coalition, Coalition>> out;
  out.reserve(half);
  for (std::uint64_t compact = 0; compact < half; ++compact) {
    const std::uint64_t without = expand_without(compact, part);
    out.emplace_back(Coalition(without, k), Coalition(without | part_bit, k));
  }
  return out;
}

}  // namespace pceve
