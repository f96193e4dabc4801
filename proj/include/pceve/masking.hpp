#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pceve/coalition.hpp"
#include "pceve/image.hpp"

namespace pceve {

// Axis-aligned pixel rectangle, inclusive min / exclusive max.
struct Box {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  int width() const noexcept { return x_max - x_min; }
  int height() const noexcept { return y_max - y_min; }
  long area() const noexcept { return static_cast<long>(width()) * height(); }
  bool contains(int x, int y) const noexcept {
    return x >= x_min && x < x_max && y >= y_min && y < y_max;
  }
  bool valid_for(int image_width, int image_height) const noexcept {
    return 0 <= x_min && x_min < x_max && x_max <= image_width && 0 <= y_min &&
           y_min < y_max && y_max <= image_height;
  }

  friend bool operator==(const Box&, const Box&) = default;
};

struct PartAnnotation {
  std::string name;
  Box box;

  friend bool operator==(const PartAnnotation&, const PartAnnotation&) = default;
};

// Ordered parts; position in the list is the coalition bit index.
class PartSet {
 public:
  PartSet() = default;
  // Throws InvalidPartSet on an empty list, empty names, or duplicate names.
  explicit PartSet(std::vector<PartAnnotation> parts);

  unsigned size() const noexcept { return static_cast<unsigned>(parts_.size()); }
  const PartAnnotation& operator[](unsigned i) const { return parts_[i]; }
  const std::vector<PartAnnotation>& parts() const noexcept { return parts_; }
  std::vector<std::string> names() const;
  // Index of the named part or -1.
  int find(const std::string& name) const;

  // Throws BoxOutOfBounds naming the first offending part.
  void check_bounds(int image_width, int image_height) const;

  friend bool operator==(const PartSet&, const PartSet&) = default;

 private:
  std::vector<PartAnnotation> parts_;
};

using FillValue = std::vector<std::uint8_t>;

// Per-channel mean over all pixels, rounded half-up.
FillValue compute_fill_value(const RasterImage& img);

// Fills `box` of `img` with `fill` in place.
void fill_box(RasterImage& img, const Box& box, const FillValue& fill);

// The 2^K masked variants of one image. Renders on demand; holds no mutable
// state, so concurrent render() calls are safe.
class CoalitionImageSet {
 public:
  CoalitionImageSet(RasterImage base, PartSet parts);

  const RasterImage& base() const noexcept { return base_; }
  const PartSet& part_set() const noexcept { return parts_; }
  const FillValue& fill_value() const noexcept { return fill_; }
  unsigned num_parts() const noexcept { return parts_.size(); }
  std::uint64_t size() const noexcept { return std::uint64_t{1} << parts_.size(); }

  // Base copy with every box of an excluded part filled. Exclusion wins where
  // boxes overlap; pixels outside all excluded boxes are untouched.
  RasterImage render(const Coalition& c) const;

 private:
  RasterImage base_;
  PartSet parts_;
  FillValue fill_;
};

RasterImage render_coalition(const CoalitionImageSet& set, const Coalition& c);

// Validates boxes against the image (BoxOutOfBounds) and builds the set.
CoalitionImageSet generate_set(RasterImage img, PartSet parts);

}  // namespace pceve
