#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>

namespace orthomart {

/// Largest lattice dimension supported by the inline MultiIndex storage.
inline constexpr std::size_t kMaxDim = 8;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Point of Z^d with inline storage. Ordering is lexicographic.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim, std::int64_t fill = 0);
  MultiIndex(std::initializer_list<std::int64_t> coords);
  explicit MultiIndex(std::span<const std::int64_t> coords);

  static MultiIndex ones(std::size_t dim) { return MultiIndex(dim, 1); }
  static MultiIndex unit(std::size_t dim, std::size_t axis);

  std::size_t dim() const { return dim_; }
  std::int64_t operator[](std::size_t i) const { return coords_[i]; }
  std::int64_t& operator[](std::size_t i) { return coords_[i]; }
  std::span<const std::int64_t> coords() const { return {coords_.data(), dim_}; }

  MultiIndex& operator+=(const MultiIndex& other);
  MultiIndex& operator-=(const MultiIndex& other);
  friend MultiIndex operator+(MultiIndex a, const MultiIndex& b) { return a += b; }
  friend MultiIndex operator-(MultiIndex a, const MultiIndex& b) { return a -= b; }

  /// Copy with coordinate `axis` replaced by `value`.
  MultiIndex with(std::size_t axis, std::int64_t value) const;

  /// Product of the coordinates (cell count of the window 1..n).
  std::int64_t volume() const;

  std::string to_string() const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.dim_ == b.dim_ &&
           std::equal(a.coords_.begin(), a.coords_.begin() + a.dim_, b.coords_.begin());
  }
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
    if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
    for (std::size_t i = 0; i < a.dim_; ++i) {
      if (auto c = a.coords_[i] <=> b.coords_[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

 private:
  std::array<std::int64_t, kMaxDim> coords_{};
  std::size_t dim_ = 0;
};

void require_same_dim(const MultiIndex& a, const MultiIndex& b);

/// Componentwise partial order a <= b.
bool leq(const MultiIndex& a, const MultiIndex& b);
MultiIndex meet(const MultiIndex& a, const MultiIndex& b);
MultiIndex join(const MultiIndex& a, const MultiIndex& b);

/// Calls `fn(u)` for every u with lo <= u <= hi, last coordinate fastest.
template <class Fn>
void for_each_in_box(const MultiIndex& lo, const MultiIndex& hi, Fn&& fn) {
  require_same_dim(lo, hi);
  const std::size_t d = lo.dim();
  for (std::size_t i = 0; i < d; ++i) {
    if (lo[i] > hi[i]) return;
  }
  MultiIndex u = lo;
  while (true) {
    fn(static_cast<const MultiIndex&>(u));
    std::size_t axis = d;
    while (axis > 0) {
      --axis;
      if (u[axis] < hi[axis]) {
        ++u[axis];
        break;
      }
      u[axis] = lo[axis];
      if (axis == 0) return;
    }
  }
}

/// Axis-aligned box of lattice sites, used for innovation windows.
struct Box {
  MultiIndex lo;
  MultiIndex hi;

  std::size_t dim() const { return lo.dim(); }
  std::int64_t extent(std::size_t axis) const { return hi[axis] - lo[axis] + 1; }
  std::int64_t size() const;
  bool contains(const MultiIndex& u) const { return leq(lo, u) && leq(u, hi); }
  /// Row-major offset of u, last coordinate fastest.
  std::int64_t offset(const MultiIndex& u) const;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& u) const noexcept;
};

}  // namespace orthomart
