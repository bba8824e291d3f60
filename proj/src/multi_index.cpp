#include "orthomart/multi_index.hpp"

namespace orthomart {

MultiIndex::MultiIndex(std::size_t dim, std::int64_t fill) : dim_(dim) {
  if (dim == 0 || dim > kMaxDim) {
    throw std::invalid_argument("MultiIndex dimension must be in 1.." + std::to_string(kMaxDim));
  }
  std::fill(coords_.begin(), coords_.begin() + dim, fill);
}

MultiIndex::MultiIndex(std::initializer_list<std::int64_t> coords)
    : MultiIndex(std::span<const std::int64_t>(coords.begin(), coords.size())) {}

MultiIndex::MultiIndex(std::span<const std::int64_t> coords) : dim_(coords.size()) {
  if (dim_ == 0 || dim_ > kMaxDim) {
    throw std::invalid_argument("MultiIndex dimension must be in 1.." + std::to_string(kMaxDim));
  }
  std::copy(coords.begin(), coords.end(), coords_.begin());
}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t axis) {
  MultiIndex u(dim, 0);
  u[axis] = 1;
  return u;
}

MultiIndex& MultiIndex::operator+=(const MultiIndex& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < dim_; ++i) coords_[i] += other.coords_[i];
  return *this;
}

MultiIndex& MultiIndex::operator-=(const MultiIndex& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < dim_; ++i) coords_[i] -= other.coords_[i];
  return *this;
}

MultiIndex MultiIndex::with(std::size_t axis, std::int64_t value) const {
  MultiIndex out = *this;
  out[axis] = value;
  return out;
}

std::int64_t MultiIndex::volume() const {
  std::int64_t v = 1;
  for (std::size_t i = 0; i < dim_; ++i) v *= coords_[i];
  return v;
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < dim_; ++i) {
    if (i) s += ',';
    s += std::to_string(coords_[i]);
  }
  s += ')';
  return s;
}

void require_same_dim(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("dimension mismatch: " + a.to_string() + " vs " + b.to_string());
  }
}

bool leq(const MultiIndex& a, const MultiIndex& b) {
  require_same_dim(a, b);
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

MultiIndex meet(const MultiIndex& a, const MultiIndex& b) {
  require_same_dim(a, b);
  MultiIndex out = a;
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = std::min(a[i], b[i]);
  return out;
}

MultiIndex join(const MultiIndex& a, const MultiIndex& b) {
  require_same_dim(a, b);
  MultiIndex out = a;
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = std::max(a[i], b[i]);
  return out;
}

std::int64_t Box::size() const {
  std::int64_t n = 1;
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto e = extent(i);
    if (e <= 0) return 0;
    n *= e;
  }
  return n;
}

std::int64_t Box::offset(const MultiIndex& u) const {
  std::int64_t off = 0;
  for (std::size_t i = 0; i < dim(); ++i) off = off * extent(i) + (u[i] - lo[i]);
  return off;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& u) const noexcept {
  std::uint64_t h = 0x9E3779B97F4A7C15ull ^ u.dim();
  for (auto c : u.coords()) {
    h ^= static_cast<std::uint64_t>(c) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

}  // namespace orthomart
