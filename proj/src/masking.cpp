#include "pceve/masking.hpp"

#include <algorithm>
#include <set>

#include "pceve/error.hpp"

namespace pceve {

PartSet::PartSet(std::vector<PartAnnotation> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw Error(ErrorCode::kInvalidPartSet, "part set must not be empty");
  if (parts_.size() > kMaxCoalitionWidth) {
    throw Error(ErrorCode::kPartCountOutOfRange, "too many parts: " + std::to_string(parts_.size()));
  }
  std::set<std::string> seen;
  for (const auto& p : parts_) {
    if (p.name.empty()) throw Error(ErrorCode::kInvalidPartSet, "part name must not be empty");
    if (!seen.insert(p.name).second) {
      throw Error(ErrorCode::kInvalidPartSet, "duplicate part name '" + p.name + "'");
    }
  }
}

std::vector<std::string> PartSet::names() const {
  std::vector<std::string> out;
  out.reserve(parts_.size());
  for (const auto& p : parts_) out.push_back(p.name);
  return out;
}

int PartSet::find(const std::string& name) const {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void PartSet::check_bounds(int image_width, int image_height) const {
  for (const auto& p : parts_) {
    if (!p.box.valid_for(image_width, image_height)) {
      throw Error(ErrorCode::kBoxOutOfBounds,
                  "part '" + p.name + "' box [" + std::to_string(p.box.x_min) + "," +
                      std::to_string(p.box.y_min) + "," + std::to_string(p.box.x_max) + "," +
                      std::to_string(p.box.y_max) + "] outside " + std::to_string(image_width) +
                      "x" + std::to_string(image_height) + " image");
    }
  }
}

FillValue compute_fill_value(const RasterImage& img) {
  if (img.empty()) throw Error(ErrorCode::kEmptyImage, "cannot average an empty image");
  const int channels = img.channels();
  std::vector<std::uint64_t> sums(channels, 0);
  const auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); i += channels) {
    for (int c = 0; c < channels; ++c) sums[c] += px[i + c];
  }
  // round(sum / n) half-up == floor((2 sum + n) / 2n), all in integers.
  const std::uint64_t n = img.pixel_count();
  FillValue fill(channels);
  for (int c = 0; c < channels; ++c) {
    fill[c] = static_cast<std::uint8_t>((2 * sums[c] + n) / (2 * n));
  }
  return fill;
}

void fill_box(RasterImage& img, const Box& box, const FillValue& fill) {
  const int channels = img.channels();
  auto px = img.pixels();
  for (int y = box.y_min; y < box.y_max; ++y) {
    std::size_t o = img.offset(box.x_min, y);
    for (int x = box.x_min; x < box.x_max; ++x) {
      for (int c = 0; c < channels; ++c) px[o++] = fill[c];
    }
  }
}

CoalitionImageSet::CoalitionImageSet(RasterImage base, PartSet parts)
    : base_(std::move(base)), parts_(std::move(parts)), fill_(compute_fill_value(base_)) {
  parts_.check_bounds(base_.width(), base_.height());
}

RasterImage CoalitionImageSet::render(const Coalition& c) const {
  if (c.width() != parts_.size()) {
    throw Error(ErrorCode::kInvalidCoalition,
                "coalition width " + std::to_string(c.width()) + " != part count " +
                    std::to_string(parts_.size()));
  }
  RasterImage out = base_;
  for (unsigned k = 0; k < parts_.size(); ++k) {
    if (!c.contains(k)) fill_box(out, parts_[k].box, fill_);
  }
  return out;
}

RasterImage render_coalition(const CoalitionImageSet& set, const Coalition& c) {
  return set.render(c);
}

CoalitionImageSet generate_set(RasterImage img, PartSet parts) {
  return CoalitionImageSet(std::move(img), std::move(parts));
}

}  // namespace pceve
