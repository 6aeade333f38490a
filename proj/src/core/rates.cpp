#include "core/rates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace skmac {

PentagonRates pentagon(const MacChannel& ch, const FiniteDist& p1, const FiniteDist& p2) {
  JointDist j = ch.pushforward(p1, p2, 1);
  PentagonRates r;
  r.i1 = j.mutual_information({0}, {2}, {1});
  r.i2 = j.mutual_information({1}, {2}, {0});
  r.isum = j.mutual_information({0, 1}, {2});
  return r;
}

namespace {

void append_pentagon_corners(const PentagonRates& p, std::vector<std::pair<double, double>>& pts) {
  double r2_at_full_r1 = std::min(p.i2, p.isum - p.i1);
  double r1_at_full_r2 = std::min(p.i1, p.isum - p.i2);
  if (r2_at_full_r1 < 0.0) r2_at_full_r1 = 0.0;
  if (r1_at_full_r2 < 0.0) r1_at_full_r2 = 0.0;
  pts.emplace_back(p.i1, 0.0);
  pts.emplace_back(0.0, p.i2);
  pts.emplace_back(p.i1, r2_at_full_r1);
  pts.emplace_back(r1_at_full_r2, p.i2);
}

double cross(const std::pair<double, double>& o, const std::pair<double, double>& a,
             const std::pair<double, double>& b) {
  return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
}

// All points on the simplex of dimension (size-1) with denominator steps-1.
void simplex_grid(int size, int steps, std::vector<FiniteDist>& out) {
  std::vector<int> comp(size, 0);
  int total = steps - 1;
  // enumerate compositions of total into `size` parts
  std::vector<double> p(size);
  std::function<void(int, int)> rec = [&](int idx, int left) {
    if (idx == size - 1) {
      comp[idx] = left;
      for (int i = 0; i < size; ++i) p[i] = static_cast<double>(comp[i]) / total;
      out.emplace_back(p);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      comp[idx] = c;
      rec(idx + 1, left - c);
    }
  };
  if (total <= 0) {
    out.push_back(FiniteDist::uniform(size));
    return;
  }
  rec(0, total);
}

FiniteDist perturb(const FiniteDist& d, int coord, double step) {
  std::vector<double> p = d.probs();
  p[coord] += step;
  if (p[coord] < 0.0) p[coord] = 0.0;
  double sum = 0.0;
  for (double v : p) sum += v;
  if (sum <= 0.0) return d;
  for (double& v : p) v /= sum;
  return FiniteDist(std::move(p));
}

}  // namespace

double hull_diagonal_value(const std::vector<std::pair<double, double>>& points) {
  std::vector<std::pair<double, double>> pts = points;
  pts.emplace_back(0.0, 0.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() == 1) return std::min(pts[0].first, pts[0].second);

  // Andrew monotone chain, counter-clockwise
  std::vector<std::pair<double, double>> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);

  if (hull.size() < 3) {
    // collinear cloud: best diagonal point on any segment through the origin
    double best = 0.0;
    for (const auto& p : pts) best = std::max(best, std::min(p.first, p.second));
    // points on a segment between two extremes can beat endpoints on the diagonal
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        double x1 = pts[i].first, y1 = pts[i].second, x2 = pts[j].first, y2 = pts[j].second;
        double denom = (x2 - x1) - (y2 - y1);
        if (std::fabs(denom) > 1e-15) {
          double t = (y1 - x1) / denom;
          if (t >= 0.0 && t <= 1.0) {
            double v = x1 + t * (x2 - x1);
            best = std::max(best, v);
          }
        }
      }
    return best;
  }

  // feasibility of (t,t): for every hull edge with outward normal n, n.(t,t) <= c
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    // outward normal of CCW edge a->b is (dy, -dx)
    double nx = b.second - a.second;
    double ny = -(b.first - a.first);
    double c = nx * a.first + ny * a.second;
    double coef = nx + ny;
    if (coef > 1e-15) best = std::min(best, c / coef);
  }
  if (!std::isfinite(best)) best = 0.0;
  return std::max(best, 0.0);
}

RstarResult compute_rstar(const MacChannel& ch, const RstarOptions& opts) {
  if (ch.in1_size() > opts.max_alphabet || ch.in2_size() > opts.max_alphabet)
    throw InvalidArgumentError("compute_rstar: input alphabet exceeds configured limit");
  if (opts.grid < 2) throw InvalidArgumentError("compute_rstar: grid must be >= 2");

  std::vector<FiniteDist> g1, g2;
  simplex_grid(ch.in1_size(), opts.grid, g1);
  simplex_grid(ch.in2_size(), opts.grid, g2);

  struct Entry {
    FiniteDist p1, p2;
    PentagonRates pr;
    double sym;
  };
  std::vector<Entry> entries;
  std::vector<std::pair<double, double>> cloud;

  double max_isum = 0.0;
  auto eval_pair = [&](const FiniteDist& p1, const FiniteDist& p2) {
    PentagonRates pr = pentagon(ch, p1, p2);
    append_pentagon_corners(pr, cloud);
    double sym = std::min({pr.i1, pr.i2, pr.isum / 2.0});
    max_isum = std::max(max_isum, pr.isum);
    entries.push_back({p1, p2, pr, sym});
  };

  std::size_t total_pairs = g1.size() * g2.size();
  if (total_pairs <= opts.max_pairs) {
    for (const auto& p1 : g1)
      for (const auto& p2 : g2) eval_pair(p1, p2);
  } else {
    // subsample deterministically, always including the uniform pair
    Rng rng(opts.seed, 5);
    eval_pair(FiniteDist::uniform(ch.in1_size()), FiniteDist::uniform(ch.in2_size()));
    for (std::size_t i = 1; i < opts.max_pairs; ++i)
      eval_pair(g1[rng.below(g1.size())], g2[rng.below(g2.size())]);
  }

  RstarResult res;
  res.pairs_evaluated = static_cast<int>(entries.size());
  res.grid_rate = hull_diagonal_value(cloud);
  for (const auto& e : entries) res.best_single_pentagon = std::max(res.best_single_pentagon, e.sym);

  // pattern-search refinement around the strongest contributors
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.sym > b.sym; });
  std::size_t n_refine = std::min<std::size_t>(entries.size(), 4);
  double step = 1.0 / (opts.grid - 1);
  double current = res.grid_rate;
  for (int iter = 0; iter < opts.refine_iters; ++iter) {
    bool improved = false;
    for (std::size_t e = 0; e < n_refine; ++e) {
      Entry& ent = entries[e];
      for (int who = 0; who < 2; ++who) {
        const FiniteDist& base = (who == 0) ? ent.p1 : ent.p2;
        for (int c = 0; c < base.alphabet_size(); ++c) {
          for (double sgn : {+1.0, -1.0}) {
            FiniteDist cand = perturb(base, c, sgn * step);
            const FiniteDist& q1 = (who == 0) ? cand : ent.p1;
            const FiniteDist& q2 = (who == 0) ? ent.p2 : cand;
            PentagonRates pr = pentagon(ch, q1, q2);
            std::size_t before = cloud.size();
            append_pentagon_corners(pr, cloud);
            max_isum = std::max(max_isum, pr.isum);
            double v = hull_diagonal_value(cloud);
            if (v > current + 1e-12) {
              current = v;
              improved = true;
              if (who == 0)
                ent.p1 = cand;
              else
                ent.p2 = cand;
              ent.pr = pr;
              ent.sym = std::min({pr.i1, pr.i2, pr.isum / 2.0});
              res.best_single_pentagon = std::max(res.best_single_pentagon, ent.sym);
            } else {
              cloud.resize(before);
            }
          }
        }
      }
    }
    if (!improved) {
      step *= 0.5;
      if (step < 1e-5) break;
    }
  }

  res.rate = current;
  res.uncertainty = std::max(step, 1e-6);
  res.max_isum_half = max_isum / 2.0;
  if (res.rate < 1e-12) res.rate = 0.0;
  if (res.grid_rate < 1e-12) res.grid_rate = 0.0;
  if (res.best_single_pentagon < 1e-12) res.best_single_pentagon = 0.0;
  return res;
}

double n_letter_rate_nic(const JointDist& trace_law, int n) {
  if (trace_law.num_vars() != 4)
    throw InvalidArgumentError("n_letter_rate_nic: law must have variables (U1,U2,U3,X3n)");
  if (n < 1) throw InvalidArgumentError("n_letter_rate_nic: n must be >= 1");
  double a = trace_law.mutual_information({0}, {3, 2}, {1});
  double b = trace_law.mutual_information({1}, {3, 2}, {0});
  double c = trace_law.mutual_information({0, 1}, {3, 2});
  return std::min({a / n, b / n, c / (2.0 * n)});
}

double n_letter_rate_se(const JointDist& trace_law, int n) {
  if (trace_law.num_vars() != 6)
    throw InvalidArgumentError("n_letter_rate_se: law must have variables (X1n,U1,X2n,U2,X3n,U3)");
  if (n < 1) throw InvalidArgumentError("n_letter_rate_se: n must be >= 1");
  double a = trace_law.mutual_information({0, 1}, {4, 5}, {2, 3});
  double b = trace_law.mutual_information({2, 3}, {4, 5}, {0, 1});
  double c = trace_law.mutual_information({0, 1, 2, 3}, {4, 5});
  return std::min({a / n, b / n, c / (2.0 * n)});
}

}  // namespace skmac
