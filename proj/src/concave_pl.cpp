#include "kdiv/concave_pl.hpp"

#include <algorithm>
#include <numeric>

namespace kdiv {

namespace {

bool slopes_equal(double s1, double s2, double tol) {
  return std::abs(s1 - s2) <= tol * (1.0 + std::max(std::abs(s1), std::abs(s2)));
}

ConcavePL from_points(const std::vector<Point>& pts, double terminal_slope) {
  VecXd t(static_cast<Eigen::Index>(pts.size()));
  VecXd y(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    t(static_cast<Eigen::Index>(i)) = pts[i].t;
    y(static_cast<Eigen::Index>(i)) = pts[i].y;
  }
  return {t, y, terminal_slope};
}

}  // namespace

ConcavePL::ConcavePL(VecXd t, VecXd y, double terminal_slope)
    : t_(std::move(t)), y_(std::move(y)), terminal_slope_(terminal_slope) {
  if (t_.size() == 0 || t_.size() != y_.size()) {
    throw ValidationError("concave curve: knot arrays must be nonempty and equal length");
  }
  if (t_(0) != 0.0) throw ValidationError("concave curve: first knot must be t = 0");
  for (Eigen::Index i = 0; i + 1 < t_.size(); ++i) {
    if (!(t_(i + 1) > t_(i))) {
      throw ValidationError("concave curve: knots must be strictly increasing");
    }
  }
  if (!y_.allFinite() || !t_.allFinite() || !std::isfinite(terminal_slope_)) {
    throw ValidationError("concave curve: knots must be finite");
  }
}

ConcavePL ConcavePL::affine(double alpha, double beta) {
  return {VecXd::Zero(1), VecXd::Constant(1, alpha), beta};
}

ConcavePL ConcavePL::upper_hull(std::vector<Point> points, double terminal_slope,
                                double merge_tolerance) {
  double y0 = 0.0;
  std::vector<Point> pos;
  for (const Point& p : points) {
    if (!(p.t >= 0.0) || !std::isfinite(p.y) || !std::isfinite(p.t)) {
      throw ValidationError("upper hull: points must be finite with t >= 0");
    }
    if (p.t == 0.0) {
      y0 = std::max(y0, p.y);
    } else {
      pos.push_back(p);
    }
  }
  std::stable_sort(pos.begin(), pos.end(),
                   [](const Point& a, const Point& b) { return a.t < b.t; });

  std::vector<Point> hull{{0.0, y0}};
  for (const Point& p : pos) {
    if (hull.back().t == p.t) {
      if (p.y <= hull.back().y) continue;
      hull.pop_back();
    }
    while (hull.size() >= 2) {
      const Point& o = hull[hull.size() - 2];
      const Point& a = hull.back();
      const double cross = (a.t - o.t) * (p.y - o.y) - (a.y - o.y) * (p.t - o.t);
      if (cross < 0.0) break;
      hull.pop_back();
    }
    if (hull.size() == 1 && p.y <= hull[0].y) continue;
    hull.push_back(p);
  }
  // Points whose incoming slope is below the terminal slope lie under the
  // terminal ray of their predecessor.
  while (hull.size() >= 2) {
    const Point& o = hull[hull.size() - 2];
    const Point& a = hull.back();
    if ((a.y - o.y) / (a.t - o.t) >= terminal_slope) break;
    hull.pop_back();
  }
  return from_points(hull, terminal_slope).simplified(merge_tolerance);
}

ConcavePL ConcavePL::lower_envelope(std::span<const Line> lines) {
  if (lines.empty()) throw ValidationError("lower envelope: no lines");
  std::vector<Line> ls(lines.begin(), lines.end());
  for (const Line& l : ls) {
    if (!(l.value >= 0.0) || !(l.slope >= 0.0) || !std::isfinite(l.value) ||
        !std::isfinite(l.slope)) {
      throw ValidationError("lower envelope: lines need finite nonnegative value and slope");
    }
  }
  std::sort(ls.begin(), ls.end(), [](const Line& a, const Line& b) {
    return a.slope != b.slope ? a.slope > b.slope : a.value < b.value;
  });
  // Abscissa where b starts beating a (a.slope > b.slope).
  auto cross = [](const Line& a, const Line& b) {
    return (b.value - a.value) / (a.slope - b.slope);
  };
  std::vector<Line> env;
  for (const Line& l : ls) {
    if (!env.empty() && env.back().slope == l.slope) continue;  // larger value
    while (!env.empty()) {
      if (l.value <= env.back().value && env.size() == 1) {
        env.pop_back();  // l is below everywhere on t >= 0
        continue;
      }
      if (env.size() >= 2 &&
          cross(env[env.size() - 2], l) <= cross(env[env.size() - 2], env.back())) {
        env.pop_back();
        continue;
      }
      if (l.value <= env.back().value) {
        env.pop_back();
        continue;
      }
      break;
    }
    env.push_back(l);
  }
  std::vector<Point> pts{{0.0, env.front().value}};
  for (std::size_t i = 0; i + 1 < env.size(); ++i) {
    const double t = cross(env[i], env[i + 1]);
    // Crossings that coincide up to rounding would leave spurious slopes.
    if (t <= pts.back().t + 1e-12 * std::max(1.0, std::abs(t))) continue;
    pts.push_back({t, env[i](t)});
  }
  return from_points(pts, env.back().slope).simplified();
}

ConcavePL ConcavePL::sum_of_mins(const VecXd& a, const VecXd& b) {
  if (a.size() != b.size()) throw ValidationError("sum_of_mins: size mismatch");
  double constant = 0.0;
  double slope = 0.0;
  double terminal = 0.0;  // summed separately so cancellation cannot leave a residue
  std::vector<std::pair<double, double>> kinks;  // (position, slope drop)
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double ak = a(k);
    const double bk = b(k);
    if (!(ak >= 0.0) || !(bk >= 0.0)) throw ValidationError("sum_of_mins: negative term");
    if (std::isinf(ak) && std::isinf(bk)) {
      throw ValidationError("sum_of_mins: both terms infinite");
    }
    if (ak == 0.0 || bk == 0.0) continue;
    if (std::isinf(ak)) {
      slope += bk;
      terminal += bk;
    } else if (std::isinf(bk)) {
      constant += ak;
    } else {
      slope += bk;
      kinks.emplace_back(ak / bk, bk);
    }
  }
  std::sort(kinks.begin(), kinks.end());
  std::vector<Point> pts{{0.0, constant}};
  double s = slope;
  for (const auto& [pos, drop] : kinks) {
    if (pos > pts.back().t) {
      pts.push_back({pos, pts.back().y + s * (pos - pts.back().t)});
    }
    s -= drop;
  }
  return from_points(pts, terminal).simplified();
}

double ConcavePL::operator()(double t) const {
  const Eigen::Index n = t_.size();
  if (!(t > 0.0)) return y_(0);
  if (t >= t_(n - 1)) return y_(n - 1) + terminal_slope_ * (t - t_(n - 1));
  const auto* begin = t_.data();
  const auto i = static_cast<Eigen::Index>(std::upper_bound(begin, begin + n, t) - begin) - 1;
  const double w = (t - t_(i)) / (t_(i + 1) - t_(i));
  return y_(i) + w * (y_(i + 1) - y_(i));
}

VecXd ConcavePL::operator()(const VecXd& t) const {
  VecXd out(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) out(i) = (*this)(t(i));
  return out;
}

double ConcavePL::segment_slope(Eigen::Index i) const {
  if (i + 1 >= t_.size()) return terminal_slope_;
  return (y_(i + 1) - y_(i)) / (t_(i + 1) - t_(i));
}

double ConcavePL::initial_slope() const { return segment_slope(0); }

double ConcavePL::limit_at_infinity() const {
  return terminal_slope_ > 0.0 ? kInf : y_(y_.size() - 1);
}

double ConcavePL::validation_margin() const {
  double margin = std::min(y_(0), terminal_slope_);
  for (Eigen::Index i = 0; i + 1 < t_.size(); ++i) {
    const double s = segment_slope(i);
    const double next = segment_slope(i + 1);
    margin = std::min(margin, (s - next) / (1.0 + std::abs(s)));
  }
  return margin;
}

bool ConcavePL::is_conv(double slack) const { return validation_margin() >= -slack; }

bool ConcavePL::is_conv0() const {
  return is_conv() && y_(0) == 0.0 && terminal_slope_ == 0.0;
}

ConcavePL ConcavePL::scaled(double lambda) const {
  return {t_, lambda * y_, lambda * terminal_slope_};
}

ConcavePL ConcavePL::operator+(const ConcavePL& other) const {
  VecXd knots = merged_knots(*this, other);
  VecXd t(knots.size() + 1);
  t(0) = 0.0;
  t.tail(knots.size()) = knots;
  VecXd y(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) y(i) = (*this)(t(i)) + other(t(i));
  return ConcavePL(t, y, terminal_slope_ + other.terminal_slope_).simplified();
}

ConcavePL ConcavePL::simplified(double merge_tolerance) const {
  std::vector<Point> pts{{t_(0), y_(0)}};
  const Eigen::Index n = t_.size();
  for (Eigen::Index i = 1; i < n; ++i) {
    const double incoming = (y_(i) - pts.back().y) / (t_(i) - pts.back().t);
    const double outgoing = segment_slope(i);
    if (slopes_equal(incoming, outgoing, merge_tolerance)) continue;
    pts.push_back({t_(i), y_(i)});
  }
  return from_points(pts, terminal_slope_);
}

VecXd merged_knots(const ConcavePL& a, const ConcavePL& b) {
  std::vector<double> ts;
  ts.reserve(static_cast<std::size_t>(a.knots_t().size() + b.knots_t().size()));
  for (Eigen::Index i = 1; i < a.knots_t().size(); ++i) ts.push_back(a.knots_t()(i));
  for (Eigen::Index i = 1; i < b.knots_t().size(); ++i) ts.push_back(b.knots_t()(i));
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return Eigen::Map<VecXd>(ts.data(), static_cast<Eigen::Index>(ts.size()));
}

}  // namespace kdiv
