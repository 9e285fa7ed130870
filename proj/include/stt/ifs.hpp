#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stt/exact.hpp"
#include "stt/interval.hpp"
#include "stt/word.hpp"

namespace stt {

// One similarity branch f(x) = a * O * x + b with exact rational data.
// The isometry part O is the identity, except in dimension one where a
// reflection is allowed (orientation = -1).
struct SimilarityMap {
  Rational ratio;                      // a, in (0,1)
  std::vector<Rational> translation;   // b, one entry per coordinate
  int orientation = +1;

  void validate(int ambient_dim) const {
    if (!(ratio > 0 && ratio < 1)) throw std::invalid_argument("ratio must lie in (0,1)");
    if (static_cast<int>(translation.size()) != ambient_dim)
      throw std::invalid_argument("translation dimension mismatch");
    if (orientation != 1 && orientation != -1)
      throw std::invalid_argument("orientation must be +-1");
    if (orientation == -1 && ambient_dim != 1)
      throw std::invalid_argument("reflections supported only in dimension 1");
  }
};

// Bound-based description of a conformal system: per-branch derivative
// enclosures over cylinders, plus optional tighter whole-word hooks used by
// systems (like the continued-fraction one) that can do better than the
// chain-rule product.
struct ConformalSystem {
  double a_min = 0, a_max = 0;
  // Enclosure of ||f_i'|| over the cylinder X_w.
  std::function<Interval(int branch, const Word& w)> branch_derivative;
  // Optional: enclosure of ||f_w'|| over X (tighter than the product form).
  std::function<Interval(const Word& w)> word_derivative;
  // Optional: image of a point enclosure under f_w, enabling projection.
  std::function<Interval(const Word& w, const Interval& point)> apply;
};

enum class IfsMode { similarity, conformal };
enum class Separation { ssc, osc_only, overlapping, unknown };

struct SeparationReport {
  Separation kind = Separation::unknown;
  std::optional<Rational> gap;  // min distance between first-level images (SSC only)
};

// A finite contracting system, exact in similarity mode and enclosure-based
// in conformal mode. Immutable after construction.
class IfsSpec {
 public:
  static IfsSpec similarity(std::vector<SimilarityMap> maps, int ambient_dim = 1,
                            std::optional<Rational> diam = std::nullopt) {
    IfsSpec s;
    s.mode_ = IfsMode::similarity;
    s.dim_ = ambient_dim;
    s.maps_ = std::move(maps);
    if (s.maps_.empty()) throw std::invalid_argument("need at least one map");
    for (auto& m : s.maps_) m.validate(ambient_dim);
    s.a_min_ = s.a_max_ = s.maps_[0].ratio;
    for (const auto& m : s.maps_) {
      if (m.ratio < s.a_min_) s.a_min_ = m.ratio;
      if (m.ratio > s.a_max_) s.a_max_ = m.ratio;
    }
    s.distortion_c_ = 1.0;
    for (const auto& m : s.maps_) s.log_ratios_.push_back(log_rational(m.ratio));
    s.hull_ = s.compute_hull();
    if (ambient_dim == 1) {
      Rational computed = s.hull_[0].second - s.hull_[0].first;
      if (diam && *diam != computed)
        throw std::invalid_argument("declared diameter " + format_rational(*diam) +
                                    " does not match attractor hull " + format_rational(computed));
      s.diam_ = computed;
    } else {
      if (!diam)
        throw std::invalid_argument("attractor diameter must be supplied for dimension > 1");
      s.diam_ = *diam;
    }
    if (s.diam_ <= 0) throw std::invalid_argument("degenerate attractor (zero diameter)");
    return s;
  }

  static IfsSpec conformal(int alphabet_size, ConformalSystem sys, Rational diam,
                           double distortion_c) {
    if (alphabet_size < 1) throw std::invalid_argument("empty alphabet");
    if (!(sys.a_min > 0 && sys.a_min <= sys.a_max && sys.a_max < 1))
      throw std::invalid_argument("contraction certificate must satisfy 0<a_min<=a_max<1");
    if (distortion_c < 1) throw std::invalid_argument("distortion constant must be >= 1");
    IfsSpec s;
    s.mode_ = IfsMode::conformal;
    s.dim_ = 1;
    s.alphabet_override_ = alphabet_size;
    s.conformal_ = std::move(sys);
    s.diam_ = diam;
    s.distortion_c_ = distortion_c;
    return s;
  }

  IfsMode mode() const { return mode_; }
  int alphabet_size() const {
    return mode_ == IfsMode::similarity ? static_cast<int>(maps_.size()) : alphabet_override_;
  }
  int ambient_dim() const { return dim_; }
  const Rational& diam() const { return diam_; }
  double distortion_c() const { return distortion_c_; }
  const std::vector<SimilarityMap>& maps() const { return maps_; }
  const ConformalSystem& conformal_system() const { return *conformal_; }
  std::string norm_name() const { return dim_ == 1 ? "absolute value" : "euclidean"; }

  double a_min() const {
    return mode_ == IfsMode::similarity ? to_double(a_min_) : conformal_->a_min;
  }
  double a_max() const {
    return mode_ == IfsMode::similarity ? to_double(a_max_) : conformal_->a_max;
  }
  const Rational& a_min_exact() const { return a_min_; }
  const Rational& a_max_exact() const { return a_max_; }

  double log_ratio(int branch) const {
    require_branch(branch);
    return log_ratios_[static_cast<std::size_t>(branch)];
  }

  // Exact product of contraction ratios along a word (similarity mode).
  Rational ratio_product(const Word& w) const {
    require_similarity();
    Rational p = 1;
    for (int s : w.sym) {
      require_branch(s);
      p *= maps_[s].ratio;
    }
    return p;
  }

  // diam(X_w): exact in similarity mode, enclosure otherwise. The empty word
  // gives diam(X) (identity-map convention).
  Rational cylinder_diameter(const Word& w) const {
    require_similarity();
    return diam_ * ratio_product(w);
  }

  Interval cylinder_diameter_enclosure(const Word& w) const {
    if (mode_ == IfsMode::similarity) return Interval::from_rational(cylinder_diameter(w));
    Interval d = word_derivative_enclosure(w);
    double c = distortion_c_;
    return Interval(1.0 / c, c) * d * Interval::from_rational(diam_);
  }

  // Enclosure of ||f_w'|| over the attractor.
  Interval word_derivative_enclosure(const Word& w) const {
    if (mode_ == IfsMode::similarity) return Interval::from_rational(ratio_product(w));
    if (conformal_->word_derivative) return conformal_->word_derivative(w);
    Interval acc(1.0);
    for (std::size_t j = 0; j < w.size(); ++j) {
      Word suffix = w.slice1(j + 2, w.size());
      acc = acc * conformal_->branch_derivative(w.sym[j], suffix);
    }
    return acc;
  }

  // Convex hull [L, R] of the attractor, per coordinate (similarity mode).
  const std::vector<std::pair<Rational, Rational>>& hull() const {
    require_similarity();
    return hull_;
  }

  // Image of the hull box under f_w, exact per coordinate.
  std::vector<std::pair<Rational, Rational>> cylinder_box(const Word& w) const {
    require_similarity();
    auto box = hull_;
    for (auto it = w.sym.rbegin(); it != w.sym.rend(); ++it) {
      require_branch(*it);
      const auto& m = maps_[*it];
      for (int c = 0; c < dim_; ++c) {
        Rational lo, hi;
        if (m.orientation > 0) {
          lo = m.ratio * box[c].first;
          hi = m.ratio * box[c].second;
        } else {
          lo = -m.ratio * box[c].second;
          hi = -m.ratio * box[c].first;
        }
        box[c] = {lo + m.translation[c], hi + m.translation[c]};
      }
    }
    return box;
  }

  SeparationReport check_separation() const {
    SeparationReport rep;
    if (mode_ != IfsMode::similarity || dim_ != 1) return rep;  // unknown
    std::vector<std::pair<Rational, Rational>> images;
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      Word w({static_cast<int>(i)});
      images.push_back(cylinder_box(w)[0]);
    }
    std::sort(images.begin(), images.end());
    bool touching = false;
    Rational min_gap;
    bool have_gap = false;
    for (std::size_t i = 0; i + 1 < images.size(); ++i) {
      Rational gap = images[i + 1].first - images[i].second;
      if (gap < 0) {
        rep.kind = Separation::overlapping;
        return rep;
      }
      if (gap == 0) {
        touching = true;
      } else if (!have_gap || gap < min_gap) {
        min_gap = gap;
        have_gap = true;
      }
    }
    if (touching) {
      rep.kind = Separation::osc_only;
    } else {
      rep.kind = Separation::ssc;
      rep.gap = min_gap;
    }
    return rep;
  }

  // Enclosure of the natural projection pi(coding) with width <= tol,
  // taken at symbolic depth n with a_max^n * diam <= tol. One interval per
  // coordinate; similarity mode is exact rational, conformal mode requires
  // the 'apply' hook.
  std::vector<std::pair<Rational, Rational>> project(const SymbolStream& coding,
                                                     const Rational& tol) const {
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
    std::size_t depth = depth_for_tolerance(tol);
    Word w = coding.prefix_word(depth);
    if (mode_ == IfsMode::similarity) return cylinder_box(w);
    if (!conformal_->apply)
      throw std::logic_error("conformal system lacks a point-transport hook");
    Interval img = conformal_->apply(w, Interval(0.0, Interval::step_up(to_double(diam_))));
    return {{rational_from_double(img.lo), rational_from_double(img.hi)}};
  }

  std::size_t depth_for_tolerance(const Rational& tol) const {
    Rational width = diam_;
    Rational amax = mode_ == IfsMode::similarity ? a_max_
                                                 : rational_from_double(conformal_->a_max);
    std::size_t n = 0;
    while (width > tol) {
      width *= amax;
      if (++n > 1u << 22) throw std::runtime_error("projection depth overflow");
    }
    return n;
  }

 private:
  void require_similarity() const {
    if (mode_ != IfsMode::similarity)
      throw std::logic_error("operation requires similarity mode");
  }
  void require_branch(int s) const {
    if (s < 0 || s >= alphabet_size())
      throw std::out_of_range("symbol out of alphabet range");
  }

  // Exact hull per coordinate: solve L = min_i f_i(endpoint), R = max_i
  // f_i(endpoint) by trying every assignment of attaining map and endpoint,
  // then keeping the consistent solution.
  std::vector<std::pair<Rational, Rational>> compute_hull() const {
    std::vector<std::pair<Rational, Rational>> box(dim_);
    for (int c = 0; c < dim_; ++c) box[c] = hull_1d(c);
    return box;
  }

  std::pair<Rational, Rational> hull_1d(int coord) const {
    auto image_lo = [&](const SimilarityMap& m, const Rational& L, const Rational& R) {
      return m.orientation > 0 ? Rational(m.ratio * L + m.translation[coord])
                               : Rational(-m.ratio * R + m.translation[coord]);
    };
    auto image_hi = [&](const SimilarityMap& m, const Rational& L, const Rational& R) {
      return m.orientation > 0 ? Rational(m.ratio * R + m.translation[coord])
                               : Rational(-m.ratio * L + m.translation[coord]);
    };
    for (const auto& mi : maps_) {
      for (const auto& mj : maps_) {
        // Solve L = image_lo(mi; L,R), R = image_hi(mj; L,R): a 2x2 rational
        // linear system (diagonal unless a reflection couples the endpoints).
        // L = pL*L + qL*R + rL ; R = pR*L + qR*R + rR
        Rational pL = mi.orientation > 0 ? mi.ratio : 0;
        Rational qL = mi.orientation > 0 ? Rational(0) : -mi.ratio;
        Rational rL = mi.translation[coord];
        Rational pR = mj.orientation > 0 ? Rational(0) : -mj.ratio;
        Rational qR = mj.orientation > 0 ? mj.ratio : 0;
        Rational rR = mj.translation[coord];
        Rational det = (1 - pL) * (1 - qR) - qL * pR;
        if (det == 0) continue;
        Rational L = (rL * (1 - qR) + qL * rR) / det;
        Rational R = (rR * (1 - pL) + pR * rL) / det;
        if (L > R) continue;
        bool consistent = true;
        for (const auto& m : maps_) {
          if (image_lo(m, L, R) < L || image_hi(m, L, R) > R) consistent = false;
        }
        if (consistent && image_lo(mi, L, R) == L && image_hi(mj, L, R) == R)
          return {L, R};
      }
    }
    throw std::logic_error("hull fixed point not found");
  }

  IfsMode mode_ = IfsMode::similarity;
  int dim_ = 1;
  int alphabet_override_ = 0;
  std::vector<SimilarityMap> maps_;
  std::vector<double> log_ratios_;
  std::optional<ConformalSystem> conformal_;
  Rational diam_;
  Rational a_min_, a_max_;
  double distortion_c_ = 1.0;
  std::vector<std::pair<Rational, Rational>> hull_;
};

// Convenience: 1-D similarity system from (ratio, translation) pairs.
inline IfsSpec make_line_ifs(const std::vector<std::pair<Rational, Rational>>& rt) {
  std::vector<SimilarityMap> maps;
  for (const auto& [a, b] : rt) maps.push_back({a, {b}, +1});
  return IfsSpec::similarity(std::move(maps), 1);
}

// Middle-third-Cantor-style system: m maps of equal ratio spread so that the
// attractor is [0,1] scaled; digits d over base b give {x/b + d(b-1)^{-1}...}
inline IfsSpec make_missing_digit_ifs(int base, const std::vector<int>& digits) {
  if (base < 3) throw std::invalid_argument("base must be >= 3");
  if (digits.size() < 2 || digits.size() >= static_cast<std::size_t>(base))
    throw std::invalid_argument("digit set must be proper with at least 2 digits");
  std::vector<SimilarityMap> maps;
  for (int d : digits) {
    if (d < 0 || d >= base) throw std::invalid_argument("digit out of range");
    maps.push_back({Rational(1, base), {Rational(d, base)}, +1});
  }
  return IfsSpec::similarity(std::move(maps), 1);
}

inline IfsSpec make_cantor_ifs() { return make_missing_digit_ifs(3, {0, 2}); }

}  // namespace stt
