#include "igt/spaces.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace igt {

Space Space::box(Vec lower, Vec upper) {
  if (lower.size() != upper.size())
    throw std::invalid_argument("Space::box: lower/upper dimension mismatch");
  if ((lower.array() > upper.array()).any())
    throw std::invalid_argument("Space::box: requires lower <= upper componentwise");
  Space s;
  s.kind_ = Kind::Box;
  s.dim_ = lower.size();
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

Space Space::box(Index dim, double lo, double hi) {
  return box(Vec::Constant(dim, lo), Vec::Constant(dim, hi));
}

Space Space::simplex(Index dim, double scale) {
  if (dim <= 0) throw std::invalid_argument("Space::simplex: dim must be positive");
  if (scale <= 0.0) throw std::invalid_argument("Space::simplex: scale must be positive");
  Space s;
  s.kind_ = Kind::Simplex;
  s.dim_ = dim;
  s.scale_ = scale;
  return s;
}

Space Space::nonnegative_orthant(Index dim) {
  if (dim <= 0) throw std::invalid_argument("Space::nonnegative_orthant: dim must be positive");
  Space s;
  s.kind_ = Kind::NonnegativeOrthant;
  s.dim_ = dim;
  return s;
}

Space Space::product(std::vector<Space> factors) {
  Space s;
  s.kind_ = Kind::Product;
  s.factors_ = std::move(factors);
  s.offsets_.reserve(s.factors_.size() + 1);
  Index off = 0;
  s.offsets_.push_back(0);
  for (const Space& f : s.factors_) {
    off += f.dim();
    s.offsets_.push_back(off);
  }
  s.dim_ = off;
  return s;
}

Index Space::factor_offset(std::size_t f) const {
  if (kind_ != Kind::Product || f >= factors_.size())
    throw std::invalid_argument("Space::factor_offset: not a product factor index");
  return offsets_[f];
}

bool Space::bounded() const {
  switch (kind_) {
    case Kind::Box:
    case Kind::Simplex:
      return true;
    case Kind::NonnegativeOrthant:
      return false;
    case Kind::Product:
      return std::all_of(factors_.begin(), factors_.end(),
                         [](const Space& f) { return f.bounded(); });
  }
  return false;
}

bool Space::contains(const Vec& z, double tol) const {
  if (z.size() != dim_) return false;
  switch (kind_) {
    case Kind::Box:
      return (z.array() >= lower_.array() - tol).all() &&
             (z.array() <= upper_.array() + tol).all();
    case Kind::Simplex:
      return (z.array() >= -tol).all() && std::abs(z.sum() - scale_) <= tol * std::max(1.0, scale_);
    case Kind::NonnegativeOrthant:
      return (z.array() >= -tol).all();
    case Kind::Product: {
      for (std::size_t f = 0; f < factors_.size(); ++f) {
        if (!factors_[f].contains(z.segment(offsets_[f], factors_[f].dim()), tol)) return false;
      }
      return true;
    }
  }
  return false;
}

std::string Space::describe() const {
  switch (kind_) {
    case Kind::Box:
      return "box(" + std::to_string(dim_) + ")";
    case Kind::Simplex:
      return "simplex(" + std::to_string(dim_) + "," + std::to_string(scale_) + ")";
    case Kind::NonnegativeOrthant:
      return "orthant(" + std::to_string(dim_) + ")";
    case Kind::Product: {
      std::string out = "product(";
      for (std::size_t f = 0; f < factors_.size(); ++f) {
        if (f) out += ",";
        out += factors_[f].describe();
      }
      return out + ")";
    }
  }
  return "space";
}

namespace {

// Sort-and-threshold projection onto {z >= 0, sum z = scale}.
Vec project_simplex(const Vec& z, double scale) {
  const Index n = z.size();
  std::vector<double> u(z.data(), z.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double tau = (z.sum() - scale) / static_cast<double>(n);
  for (Index k = 0; k < n; ++k) {
    cumsum += u[static_cast<std::size_t>(k)];
    const double cand = (cumsum - scale) / static_cast<double>(k + 1);
    if (u[static_cast<std::size_t>(k)] - cand > 0.0)
      tau = cand;
    else
      break;
  }
  return (z.array() - tau).max(0.0);
}

}  // namespace

Vec project(const Space& space, const Vec& z) {
  if (z.size() != space.dim())
    throw std::invalid_argument("project: vector dim " + std::to_string(z.size()) +
                                " does not match space dim " + std::to_string(space.dim()));
  switch (space.kind()) {
    case Space::Kind::Box:
      return z.cwiseMax(space.lower()).cwiseMin(space.upper());
    case Space::Kind::Simplex:
      return project_simplex(z, space.scale());
    case Space::Kind::NonnegativeOrthant:
      return z.cwiseMax(0.0);
    case Space::Kind::Product: {
      Vec out(space.dim());
      const auto& factors = space.factors();
      for (std::size_t f = 0; f < factors.size(); ++f) {
        const Index off = space.factor_offset(f);
        out.segment(off, factors[f].dim()) = project(factors[f], z.segment(off, factors[f].dim()));
      }
      return out;
    }
  }
  throw std::logic_error("project: unknown space kind");
}

Vec sample_uniform(const Space& space, Rng& rng) {
  if (!space.bounded())
    throw std::invalid_argument("sample_uniform: space is unbounded: " + space.describe());
  switch (space.kind()) {
    case Space::Kind::Box: {
      Vec out(space.dim());
      for (Index i = 0; i < space.dim(); ++i)
        out[i] = rng.uniform(space.lower()[i], space.upper()[i]);
      return out;
    }
    case Space::Kind::Simplex: {
      Vec out(space.dim());
      for (Index i = 0; i < space.dim(); ++i) out[i] = rng.exponential();
      out *= space.scale() / out.sum();
      return out;
    }
    case Space::Kind::Product: {
      Vec out(space.dim());
      const auto& factors = space.factors();
      for (std::size_t f = 0; f < factors.size(); ++f)
        out.segment(space.factor_offset(f), factors[f].dim()) = sample_uniform(factors[f], rng);
      return out;
    }
    case Space::Kind::NonnegativeOrthant:
      break;
  }
  throw std::logic_error("sample_uniform: unreachable");
}

Vec centroid(const Space& space) {
  switch (space.kind()) {
    case Space::Kind::Box:
      return 0.5 * (space.lower() + space.upper());
    case Space::Kind::Simplex:
      return Vec::Constant(space.dim(), space.scale() / static_cast<double>(space.dim()));
    case Space::Kind::NonnegativeOrthant:
      return Vec::Zero(space.dim());
    case Space::Kind::Product: {
      Vec out(space.dim());
      const auto& factors = space.factors();
      for (std::size_t f = 0; f < factors.size(); ++f)
        out.segment(space.factor_offset(f), factors[f].dim()) = centroid(factors[f]);
      return out;
    }
  }
  throw std::logic_error("centroid: unknown space kind");
}

}  // namespace igt
