#include "pceve/shapley.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "pceve/error.hpp"

namespace pceve {

namespace {

constexpr std::uint64_t kRenderChunk = 256;

void rethrow_first(const std::vector<std::exception_ptr>& errors) {
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::uint64_t factorial_or_zero(unsigned k) {
  if (k > 20) return 0;
  std::uint64_t f = 1;
  for (unsigned i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

std::vector<double> PartShapleyMatrix::column(unsigned c) const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& row : values) out.push_back(row.at(c));
  return out;
}

void PairwiseSum::add(double x) {
  stack_.push_back({x, 0});
  while (stack_.size() >= 2 && stack_[stack_.size() - 1].level == stack_[stack_.size() - 2].level) {
    const Node right = stack_.back();
    stack_.pop_back();
    stack_.back().value += right.value;
    ++stack_.back().level;
  }
}

double PairwiseSum::result() const {
  if (stack_.empty()) return 0.0;
  double acc = stack_.back().value;
  for (std::size_t i = stack_.size() - 1; i-- > 0;) acc = stack_[i].value + acc;
  return acc;
}

CoalitionLogits evaluate_coalitions(const ValueFunction& vf, const CoalitionImageSet& set) {
  const unsigned k = set.num_parts();
  if (k > kMaxExactParts) {
    throw Error(ErrorCode::kPartCountOutOfRange,
                std::to_string(k) + " parts exceed the exact limit of 24; use the permutation estimator");
  }
  const std::uint64_t n = set.size();
  CoalitionLogits cache;
  cache.num_parts = k;
  cache.logits.resize(n);

  for (std::uint64_t start = 0; start < n; start += kRenderChunk) {
    const std::uint64_t count = std::min(kRenderChunk, n - start);
    std::vector<RasterImage> images(count);
    std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
      try {
        images[i] = set.render(Coalition(start + i, k));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    rethrow_first(errors);
    auto logits = vf.evaluate_batch(images);
    std::move(logits.begin(), logits.end(), cache.logits.begin() + static_cast<std::ptrdiff_t>(start));
  }
  return cache;
}

PartShapleyMatrix shapley_from_logits(const CoalitionSpace& space, const CoalitionLogits& cache,
                                      std::vector<std::string> part_names,
                                      std::vector<std::string> class_names) {
  const unsigned k = space.k();
  if (cache.num_parts != k || cache.logits.size() != space.num_coalitions()) {
    throw Error(ErrorCode::kPartCountMismatch, "logit cache does not match the coalition space");
  }
  const std::size_t num_classes = cache.logits.front().size();
  PartShapleyMatrix out{std::move(part_names), std::move(class_names),
                        std::vector<std::vector<double>>(k, std::vector<double>(num_classes))};
  const auto& weights = space.weights();
  const std::uint64_t half = space.num_coalitions() / 2;

#pragma omp parallel for schedule(static)
  for (std::int64_t part = 0; part < static_cast<std::int64_t>(k); ++part) {
    const std::uint64_t part_bit = std::uint64_t{1} << part;
    std::vector<PairwiseSum> sums(num_classes);
    for (std::uint64_t compact = 0; compact < half; ++compact) {
      const std::uint64_t without = expand_without(compact, static_cast<unsigned>(part));
      const double w = weights[static_cast<unsigned>(std::popcount(without))];
      const LogitVector& lo = cache.logits[without];
      const LogitVector& hi = cache.logits[without | part_bit];
      for (std::size_t c = 0; c < num_classes; ++c) sums[c].add(w * (hi[c] - lo[c]));
    }
    for (std::size_t c = 0; c < num_classes; ++c) out.values[part][c] = sums[c].result();
  }
  return out;
}

SampleExplanation explain_sample_detailed(const ValueFunction& vf, const RasterImage& img,
                                          const PartSet& parts) {
  const CoalitionSpace space(parts.size());
  const CoalitionImageSet set = generate_set(img, parts);
  SampleExplanation result;
  result.cache = evaluate_coalitions(vf, set);
  result.matrix = shapley_from_logits(space, result.cache, parts.names(), vf.class_names());
  return result;
}

PartShapleyMatrix explain_sample(const ValueFunction& vf, const RasterImage& img,
                                 const PartSet& parts) {
  return explain_sample_detailed(vf, img, parts).matrix;
}

PartShapleyMatrix explain_sample_reference(const ValueFunction& vf, const RasterImage& img,
                                           const PartSet& parts) {
  const unsigned k = parts.size();
  const CoalitionSpace space(k);
  const CoalitionImageSet set = generate_set(img, parts);
  std::vector<LogitVector> logits(space.num_coalitions());
  for (std::uint64_t bits = 0; bits < space.num_coalitions(); ++bits) {
    logits[bits] = vf.evaluate(set.render(Coalition(bits, k)));
  }
  const unsigned num_classes = vf.num_classes();
  PartShapleyMatrix out{parts.names(), vf.class_names(),
                        std::vector<std::vector<double>>(k, std::vector<double>(num_classes, 0.0))};
  for (unsigned part = 0; part < k; ++part) {
    const std::uint64_t part_bit = std::uint64_t{1} << part;
    for (unsigned c = 0; c < num_classes; ++c) {
      double sum = 0.0;
      for (std::uint64_t s = 0; s < space.num_coalitions(); ++s) {
        if ((s & part_bit) != 0) continue;
        const unsigned size = static_cast<unsigned>(std::popcount(s));
        sum += space.weight(size) * (logits[s | part_bit][c] - logits[s][c]);
      }
      out.values[part][c] = sum;
    }
  }
  return out;
}

PartShapleyMatrix estimate_shapley_mc(const ValueFunction& vf, const RasterImage& img,
                                      const PartSet& parts, std::uint64_t num_permutations,
                                      std::uint64_t seed) {
  if (num_permutations == 0) throw Error(ErrorCode::kUsage, "num_permutations must be >= 1");
  const unsigned k = parts.size();
  const CoalitionImageSet set = generate_set(img, parts);

  std::vector<std::vector<unsigned>> orderings;
  std::vector<unsigned> order(k);
  std::iota(order.begin(), order.end(), 0U);
  const std::uint64_t all = factorial_or_zero(k);
  if (k <= 10 && num_permutations >= all) {
    do {
      orderings.push_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
  } else {
    std::mt19937_64 rng(seed);
    orderings.reserve(num_permutations);
    for (std::uint64_t i = 0; i < num_permutations; ++i) {
      std::iota(order.begin(), order.end(), 0U);
      std::shuffle(order.begin(), order.end(), rng);
      orderings.push_back(order);
    }
  }

  std::set<std::uint64_t> needed;
  for (const auto& o : orderings) {
    std::uint64_t bits = 0;
    needed.insert(bits);
    for (unsigned p : o) needed.insert(bits |= std::uint64_t{1} << p);
  }
  std::map<std::uint64_t, LogitVector> values;
  std::vector<std::uint64_t> pending(needed.begin(), needed.end());
  for (std::size_t start = 0; start < pending.size(); start += kRenderChunk) {
    const std::size_t count = std::min<std::size_t>(kRenderChunk, pending.size() - start);
    std::vector<RasterImage> images(count);
    std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
      try {
        images[i] = set.render(Coalition(pending[start + i], k));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    rethrow_first(errors);
    auto logits = vf.evaluate_batch(images);
    for (std::size_t i = 0; i < count; ++i) values.emplace(pending[start + i], std::move(logits[i]));
  }

  const unsigned num_classes = vf.num_classes();
  std::vector<std::vector<double>> sums(k, std::vector<double>(num_classes, 0.0));
  for (const auto& o : orderings) {
    std::uint64_t bits = 0;
    for (unsigned p : o) {
      const LogitVector& before = values.at(bits);
      bits |= std::uint64_t{1} << p;
      const LogitVector& after = values.at(bits);
      for (unsigned c = 0; c < num_classes; ++c) sums[p][c] += after[c] - before[c];
    }
  }
  const double n = static_cast<double>(orderings.size());
  for (auto& row : sums) {
    for (double& v : row) v /= n;
  }
  return {parts.names(), vf.class_names(), std::move(sums)};
}

SampleContribution select_target(const PartShapleyMatrix& matrix, const LogitVector& full_logits,
                                 TargetSelection selection) {
  SampleContribution out;
  out.predicted_class = argmax_index(full_logits);
  out.mode = selection.mode;
  out.target_class =
      selection.mode == TargetSelection::Mode::kPredicted ? out.predicted_class : selection.label;
  if (out.target_class >= matrix.num_classes()) {
    throw Error(ErrorCode::kUsage, "target class " + std::to_string(out.target_class) +
                                       " out of range");
  }
  out.histogram = matrix.column(out.target_class);
  out.argmax_part = argmax_index(out.histogram);
  const double max = out.histogram[out.argmax_part];
  out.normalized = out.histogram;
  if (max > 0.0) {
    for (double& v : out.normalized) v /= max;
    out.normalization_applied = true;
  }
  return out;
}

}  // namespace pceve
