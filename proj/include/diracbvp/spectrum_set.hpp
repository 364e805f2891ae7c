#pragma once

// Closed subsets of the real line: finite unions of closed intervals with
// extended-real endpoints, plus a list of isolated eigenvalues.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace diracbvp {


struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool contains(double x) const { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Open interval (lo, hi); used for spectral gaps.
struct OpenInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return lo < x && x < hi; }
  friend bool operator==(const OpenInterval&, const OpenInterval&) = default;
};

class SpectrumSet {
 public:
  SpectrumSet() = default;
  SpectrumSet(std::vector<Interval> intervals, std::vector<double> eigenvalues = {})
      : intervals_(std::move(intervals)), eigenvalues_(std::move(eigenvalues)) {
    normalize();
  }

  static SpectrumSet full_line() { return SpectrumSet({{-kInf, kInf}}); }

  /// (-inf, left] u [right, +inf), merged when left >= right.
  static SpectrumSet two_half_lines(double left, double right) {
    return SpectrumSet({{-kInf, left}, {right, kInf}});
  }

  const std::vector<Interval>& intervals() const { return intervals_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }

  bool is_full_line() const {
    return intervals_.size() == 1 && intervals_[0].lo == -kInf && intervals_[0].hi == kInf;
  }

  bool contains(double x) const {
    for (const auto& iv : intervals_)
      if (iv.contains(x)) return true;
    return std::binary_search(eigenvalues_.begin(), eigenvalues_.end(), x);
  }

  /// True when every interval of `other` lies inside an interval of this set
  /// and every eigenvalue of `other` is contained in this set.
  bool includes(const SpectrumSet& other) const {
    for (const auto& o : other.intervals_) {
      bool inside = false;
      for (const auto& iv : intervals_)
        if (iv.lo <= o.lo && o.hi <= iv.hi) inside = true;
      if (!inside) return false;
    }
    for (double e : other.eigenvalues_)
      if (!contains(e)) return false;
    return true;
  }

  /// Sort and merge overlapping or touching intervals; drop eigenvalues that
  /// fall inside an interval. Idempotent.
  void normalize() {
    std::vector<Interval> iv;
    for (const auto& x : intervals_)
      if (x.lo <= x.hi) iv.push_back(x);
    std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) {
      return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    std::vector<Interval> merged;
    for (const auto& x : iv) {
      if (!merged.empty() && x.lo <= merged.back().hi)
        merged.back().hi = std::max(merged.back().hi, x.hi);
      else
        merged.push_back(x);
    }
    intervals_ = std::move(merged);

    std::vector<double> ev;
    for (double e : eigenvalues_) {
      bool swallowed = false;
      for (const auto& x : intervals_)
        if (x.contains(e)) swallowed = true;
      if (!swallowed) ev.push_back(e);
    }
    std::sort(ev.begin(), ev.end());
    ev.erase(std::unique(ev.begin(), ev.end()), ev.end());
    eigenvalues_ = std::move(ev);
  }

  friend bool operator==(const SpectrumSet&, const SpectrumSet&) = default;

 private:
  std::vector<Interval> intervals_;
  std::vector<double> eigenvalues_;
};

/// Normalized union of a list of sets.
inline SpectrumSet union_of(const std::vector<SpectrumSet>& sets) {
  std::vector<Interval> iv;
  std::vector<double> ev;
  for (const auto& s : sets) {
    iv.insert(iv.end(), s.intervals().begin(), s.intervals().end());
    ev.insert(ev.end(), s.eigenvalues().begin(), s.eigenvalues().end());
  }
  return SpectrumSet(std::move(iv), std::move(ev));
}

inline std::string format_endpoint(double x) {
  if (x == kInf) return "+inf";
  if (x == -kInf) return "-inf";
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const SpectrumSet& s) {
  if (s.intervals().empty() && s.eigenvalues().empty()) return os << "{}";
  bool first = true;
  for (const auto& iv : s.intervals()) {
    os << (first ? "" : " u ") << (iv.lo == -kInf ? "(" : "[") << format_endpoint(iv.lo) << ", "
       << format_endpoint(iv.hi) << (iv.hi == kInf ? ")" : "]");
    first = false;
  }
  if (!s.eigenvalues().empty()) {
    os << (first ? "" : " u ") << '{';
    for (std::size_t k = 0; k < s.eigenvalues().size(); ++k) os << (k ? ", " : "") << s.eigenvalues()[k];
    os << '}';
  }
  return os;
}

}  // namespace diracbvp
