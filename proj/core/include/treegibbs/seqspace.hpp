#pragma once

// Real-valued functions on a local state space (a symmetric window of Z or
// the cyclic group Z_q): l^p norms, convolution, powers and the splice of
// functions defined on a finite set A and on its complement.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace treegibbs {

using Element = std::int64_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class GroupSpace {
 public:
  enum class Kind { IntegerWindow, Cyclic };

  /// Z intersected with [-radius, radius]; elements keep their Z identity.
  static GroupSpace window(std::int64_t radius);
  /// Z_q with representatives 0, ..., q-1.
  static GroupSpace cyclic(std::int64_t modulus);

  Kind kind() const noexcept { return kind_; }
  bool is_cyclic() const noexcept { return kind_ == Kind::Cyclic; }
  std::int64_t radius() const;
  std::int64_t modulus() const;
  std::size_t size() const noexcept { return size_; }

  /// Cyclic spaces contain every integer (read mod q); windows only |e| <= L.
  bool contains(Element e) const noexcept;
  /// Canonical representative: e mod q on Z_q, e itself on a window.
  Element reduce(Element e) const noexcept;
  Element element(std::size_t index) const;
  std::size_t index(Element e) const;

  Element add(Element a, Element b) const noexcept { return reduce(a + b); }
  Element sub(Element a, Element b) const noexcept { return reduce(a - b); }
  Element neg(Element a) const noexcept { return reduce(-a); }

  std::string describe() const;

  friend bool operator==(const GroupSpace&, const GroupSpace&) = default;

 private:
  GroupSpace(Kind kind, std::int64_t param);

  Kind kind_;
  std::int64_t param_;
  std::size_t size_;
};

class SeqFn {
 public:
  SeqFn(GroupSpace space, std::vector<double> values);

  static SeqFn zeros(const GroupSpace& space);
  static SeqFn constant(const GroupSpace& space, double value);
  static SeqFn indicator(const GroupSpace& space, std::span<const Element> set);

  template <class Fn>
  static SeqFn from_function(const GroupSpace& space, Fn&& fn) {
    std::vector<double> v(space.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(space.element(k));
    return SeqFn(space, std::move(v));
  }

  const GroupSpace& space() const noexcept { return space_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t index) const { return values_[index]; }
  /// Value at a group element; zero outside a window.
  double at(Element e) const;

  bool all_positive() const noexcept;
  bool all_nonnegative() const noexcept;

 private:
  GroupSpace space_;
  std::vector<double> values_;
};

/// (sum |f|^p)^(1/p), or sup |f| for p = kInfinity. Requires p >= 1.
double lp_norm(std::span<const double> f, double p);
double lp_norm(const SeqFn& f, double p);

/// (f*g)(i) = sum_j f(i-j) g(j). On a window, terms with i-j outside the
/// window are dropped; on Z_q indices wrap.
SeqFn convolve(const SeqFn& f, const SeqFn& g);

/// Raw-array form of convolve() used by the iterative solvers.
void convolve_into(const GroupSpace& space, std::span<const double> f,
                   std::span<const double> g, std::span<double> out);
double convolve_at(const GroupSpace& space, std::span<const double> f,
                   std::span<const double> g, std::size_t index);

SeqFn pointwise_pow(const SeqFn& f, int d);

/// Index split of a space into a finite set A and its complement A^c,
/// both listed in increasing index order.
class Partition {
 public:
  Partition(const GroupSpace& space, std::span<const Element> set);

  const GroupSpace& space() const noexcept { return space_; }
  std::span<const std::size_t> inside() const noexcept { return inside_; }
  std::span<const std::size_t> outside() const noexcept { return outside_; }
  std::span<const Element> set() const noexcept { return set_; }
  bool contains_index(std::size_t index) const { return member_[index] != 0; }

 private:
  GroupSpace space_;
  std::vector<Element> set_;
  std::vector<std::size_t> inside_;
  std::vector<std::size_t> outside_;
  std::vector<char> member_;
};

/// x0 on A^c glued to x1 on A.
SeqFn splice(std::span<const double> x0, std::span<const double> x1,
             const Partition& partition);

std::vector<double> restrict_to(std::span<const double> f,
                                std::span<const std::size_t> indices);
std::vector<double> restrict_to(const SeqFn& f,
                                std::span<const std::size_t> indices);

}  // namespace treegibbs
