#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pceve {

// Largest part count for exact enumeration. The permutation estimator accepts
// up to kMaxCoalitionWidth.
inline constexpr unsigned kMaxExactParts = 24;
inline constexpr unsigned kMaxCoalitionWidth = 64;

// A subset of K parts; bit k set means part k is present.
class Coalition {
 public:
  Coalition() = default;
  // Throws PartCountOutOfRange for a bad width and InvalidCoalition when a bit
  // at index >= width is set.
  Coalition(std::uint64_t bits, unsigned width);

  static Coalition empty(unsigned width) { return {0, width}; }
  static Coalition full(unsigned width);
  // Parses a bitstring with part 0 leftmost ("101" = parts 0 and 2).
  static Coalition from_string(std::string_view text);

  std::uint64_t bits() const noexcept { return bits_; }
  unsigned width() const noexcept { return width_; }
  unsigned size() const noexcept { return count_; }
  bool contains(unsigned part) const noexcept {
    return part < width_ && ((bits_ >> part) & 1U) != 0;
  }
  bool is_full() const noexcept { return count_ == width_; }

  Coalition with(unsigned part) const;
  Coalition without(unsigned part) const;

  // Bitstring with part 0 leftmost; used for file names and cache keys.
  std::string to_string() const;

  friend bool operator==(const Coalition&, const Coalition&) = default;
  friend auto operator<=>(const Coalition& a, const Coalition& b) {
    return a.bits_ <=> b.bits_;
  }

 private:
  std::uint64_t bits_ = 0;
  unsigned width_ = 0;
  unsigned count_ = 0;
};

inline std::uint64_t full_mask(unsigned width) {
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

// Inserts a zero bit at position `part`, mapping an index over the other K-1
// parts to the coalition bits of S ⊆ P \ {part}. Order preserving.
inline std::uint64_t expand_without(std::uint64_t compact, unsigned part) {
  const std::uint64_t low = compact & ((std::uint64_t{1} << part) - 1);
  const std::uint64_t high = compact >> part;
  return low | (high << (part + 1));
}

// Shapley weights |S|!(K-|S|-1)!/K! for a fixed part count.
class CoalitionSpace {
 public:
  explicit CoalitionSpace(unsigned k);

  unsigned k() const noexcept { return k_; }
  std::uint64_t num_coalitions() const noexcept { return std::uint64_t{1} << k_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight(unsigned s) const;

 private:
  unsigned k_;
  std::vector<double> weights_;
};

// All 2^k coalitions in ascending bit-pattern order.
std::vector<Coalition> enumerate_coalitions(unsigned k);

double shapley_weight(const CoalitionSpace& space, unsigned s);

// Pairs (S, S ∪ {part}) for every S ⊆ P \ {part}, ascending in S.
std::vector<std::pair<Coalition, Coalition>> marginal_pairs(
    const CoalitionSpace& space, unsigned part);

}  // namespace pceve
