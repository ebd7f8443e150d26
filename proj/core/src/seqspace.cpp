#include "treegibbs/seqspace.hpp"

#include <algorithm>
#include <cmath>

#include "treegibbs/error.hpp"

namespace treegibbs {

GroupSpace::GroupSpace(Kind kind, std::int64_t param)
    : kind_(kind),
      param_(param),
      size_(kind == Kind::Cyclic ? static_cast<std::size_t>(param)
                                 : static_cast<std::size_t>(2 * param + 1)) {}

GroupSpace GroupSpace::window(std::int64_t radius) {
  if (radius < 1) throw InvalidArgument("window radius must be >= 1");
  return GroupSpace(Kind::IntegerWindow, radius);
}

GroupSpace GroupSpace::cyclic(std::int64_t modulus) {
  if (modulus < 2) throw InvalidArgument("cyclic modulus must be >= 2");
  return GroupSpace(Kind::Cyclic, modulus);
}

std::int64_t GroupSpace::radius() const {
  if (kind_ != Kind::IntegerWindow)
    throw InvalidArgument("radius() on a cyclic space");
  return param_;
}

std::int64_t GroupSpace::modulus() const {
  if (kind_ != Kind::Cyclic) throw InvalidArgument("modulus() on a window");
  return param_;
}

bool GroupSpace::contains(Element e) const noexcept {
  if (kind_ == Kind::Cyclic) return true;
  return e >= -param_ && e <= param_;
}

Element GroupSpace::reduce(Element e) const noexcept {
  if (kind_ == Kind::IntegerWindow) return e;
  Element r = e % param_;
  return r < 0 ? r + param_ : r;
}

Element GroupSpace::element(std::size_t index) const {
  if (index >= size_) throw InvalidArgument("element index out of range");
  const auto k = static_cast<Element>(index);
  return kind_ == Kind::Cyclic ? k : k - param_;
}

std::size_t GroupSpace::index(Element e) const {
  if (!contains(e))
    throw InvalidArgument("element " + std::to_string(e) + " not in " +
                          describe());
  return kind_ == Kind::Cyclic ? static_cast<std::size_t>(reduce(e))
                               : static_cast<std::size_t>(e + param_);
}

std::string GroupSpace::describe() const {
  if (kind_ == Kind::Cyclic) return "Z_" + std::to_string(param_);
  return "Z[-" + std::to_string(param_) + "," + std::to_string(param_) + "]";
}

SeqFn::SeqFn(GroupSpace space, std::vector<double> values)
    : space_(space), values_(std::move(values)) {
  if (values_.size() != space_.size())
    throw InvalidArgument("SeqFn length does not match space size");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("SeqFn entries must be finite");
}

SeqFn SeqFn::zeros(const GroupSpace& space) {
  return SeqFn(space, std::vector<double>(space.size(), 0.0));
}

SeqFn SeqFn::constant(const GroupSpace& space, double value) {
  return SeqFn(space, std::vector<double>(space.size(), value));
}

SeqFn SeqFn::indicator(const GroupSpace& space, std::span<const Element> set) {
  std::vector<double> v(space.size(), 0.0);
  for (Element e : set) v[space.index(e)] = 1.0;
  return SeqFn(space, std::move(v));
}

double SeqFn::at(Element e) const {
  if (!space_.contains(e)) return 0.0;
  return values_[space_.index(e)];
}

bool SeqFn::all_positive() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v > 0.0; });
}

bool SeqFn::all_nonnegative() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v >= 0.0; });
}

double lp_norm(std::span<const double> f, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm requires p >= 1");
  double peak = 0.0;
  for (double v : f) peak = std::max(peak, std::abs(v));
  if (std::isinf(p) || peak == 0.0) return peak;
  // Scale by the peak so that tiny entries raised to p do not underflow.
  double sum = 0.0;
  for (double v : f) sum += std::pow(std::abs(v) / peak, p);
  return peak * std::pow(sum, 1.0 / p);
}

double lp_norm(const SeqFn& f, double p) { return lp_norm(f.values(), p); }

double convolve_at(const GroupSpace& space, std::span<const double> f,
                   std::span<const double> g, std::size_t i) {
  const std::size_t n = space.size();
  double acc = 0.0;
  if (space.is_cyclic()) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = (i + n - j) % n;
      acc += f[k] * g[j];
    }
    return acc;
  }
  // Window indices: element = index - L, so f-index of (i - j) is i - j + L.
  const auto L = static_cast<std::ptrdiff_t>(space.radius());
  const auto ii = static_cast<std::ptrdiff_t>(i);
  const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, ii - L);
  const std::ptrdiff_t hi =
      std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1, ii + L);
  for (std::ptrdiff_t j = lo; j <= hi; ++j)
    acc += f[static_cast<std::size_t>(ii - j + L)] * g[static_cast<std::size_t>(j)];
  return acc;
}

void convolve_into(const GroupSpace& space, std::span<const double> f,
                   std::span<const double> g, std::span<double> out) {
  const std::size_t n = space.size();
  if (f.size() != n || g.size() != n || out.size() != n)
    throw InvalidArgument("convolve_into: size mismatch");
  for (std::size_t i = 0; i < n; ++i) out[i] = convolve_at(space, f, g, i);
}

SeqFn convolve(const SeqFn& f, const SeqFn& g) {
  if (!(f.space() == g.space()))
    throw InvalidArgument("convolve: operands live on different spaces");
  std::vector<double> out(f.size());
  convolve_into(f.space(), f.values(), g.values(), out);
  return SeqFn(f.space(), std::move(out));
}

SeqFn pointwise_pow(const SeqFn& f, int d) {
  if (d < 1) throw InvalidArgument("pointwise_pow requires d >= 1");
  if (!f.all_nonnegative())
    throw InvalidArgument("pointwise_pow requires nonnegative entries");
  std::vector<double> out(f.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::pow(f[k], d);
  return SeqFn(f.space(), std::move(out));
}

Partition::Partition(const GroupSpace& space, std::span<const Element> set)
    : space_(space), member_(space.size(), 0) {
  for (Element e : set) {
    if (!space.contains(e))
      throw InvalidArgument("localization set is not a subset of " +
                            space.describe());
    const std::size_t k = space.index(e);
    if (member_[k]) throw InvalidArgument("localization set has duplicates");
    member_[k] = 1;
  }
  for (std::size_t k = 0; k < space.size(); ++k) {
    if (member_[k]) {
      inside_.push_back(k);
      set_.push_back(space.element(k));
    } else {
      outside_.push_back(k);
    }
  }
}

SeqFn splice(std::span<const double> x0, std::span<const double> x1,
             const Partition& partition) {
  if (x0.size() != partition.outside().size() ||
      x1.size() != partition.inside().size())
    throw InvalidArgument("splice: part sizes do not match the partition");
  std::vector<double> out(partition.space().size());
  for (std::size_t k = 0; k < x0.size(); ++k) out[partition.outside()[k]] = x0[k];
  for (std::size_t k = 0; k < x1.size(); ++k) out[partition.inside()[k]] = x1[k];
  return SeqFn(partition.space(), std::move(out));
}

std::vector<double> restrict_to(std::span<const double> f,
                                std::span<const std::size_t> indices) {
  std::vector<double> out;
  out.reserve(indices.size());
  for (std::size_t k : indices) out.push_back(f[k]);
  return out;
}

std::vector<double> restrict_to(const SeqFn& f,
                                std::span<const std::size_t> indices) {
  return restrict_to(f.values(), indices);
}

}  // namespace treegibbs
