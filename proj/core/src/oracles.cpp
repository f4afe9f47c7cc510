#include "dynkc/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace dynkc {

namespace {

constexpr std::size_t kMaxOracleN = 18;
constexpr int kMaxOracleK = 4;

void check_scale(std::size_t n, int k, const char* who) {
  if (n > kMaxOracleN)
    throw ValidationError(std::string(who) + " supports at most 18 points, got " + std::to_string(n));
  if (k > kMaxOracleK)
    throw ValidationError(std::string(who) + " supports k at most 4, got " + std::to_string(k));
  if (k < 1) throw ValidationError(std::string(who) + " needs k >= 1");
}

// Calls fn for each size-r index subset of [0,n) in lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t r, Fn&& fn) {
  if (r > n || r == 0) return;
  std::vector<std::size_t> idx(r);
  for (std::size_t i = 0; i < r; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    std::size_t i = r;
    while (i > 0) {
      --i;
      if (idx[i] != i + n - r) break;
      if (i == 0) return;
    }
    ++idx[i];
    for (std::size_t j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

OptResult opt_kcenter(const MetricSpace& m, const std::vector<PointId>& P, int k) {
  check_scale(P.size(), k, "opt_kcenter");
  if (P.empty()) return {0.0, {}};
  std::vector<PointId> pts = P;
  std::sort(pts.begin(), pts.end());
  std::size_t cap = std::min<std::size_t>(k, pts.size());
  OptResult best{std::numeric_limits<double>::infinity(), {}};
  std::vector<PointId> X;
  for (std::size_t size = 1; size <= cap; ++size) {
    for_each_subset(pts.size(), size, [&](const std::vector<std::size_t>& idx) {
      X.clear();
      for (std::size_t i : idx) X.push_back(pts[i]);
      double cost = 0.0;
      for (PointId p : pts) {
        cost = std::max(cost, dist_to_set(m, p, X).dist);
        if (cost >= best.cost) return;  // ties keep the earlier witness
      }
      best.cost = cost;
      best.witness = X;
    });
    if (best.cost == 0.0) break;
  }
  return best;
}

double mu_quantile(const MetricSpace& m, const std::vector<PointId>& U, double zeta,
                   const std::vector<PointId>& P, int k) {
  // k = 1 enumerates |P| singletons, no worse than the 18-point k<=4 budget,
  // and the radius-vs-quantile property tests need it at a few hundred points.
  if (k == 1) {
    if (P.size() > 4096)
      throw ValidationError("mu_quantile with k=1 supports at most 4096 points, got " +
                            std::to_string(P.size()));
  } else {
    check_scale(P.size(), k, "mu_quantile");
  }
  if (k < 1) throw ValidationError("mu_quantile needs k >= 1");
  if (!(zeta > 0.0 && zeta <= 1.0)) throw ValidationError("mu_quantile needs zeta in (0,1]");
  if (U.empty() || P.empty()) return 0.0;
  std::size_t rank = static_cast<std::size_t>(std::ceil(zeta * static_cast<double>(U.size())));
  DYNKC_CHECK(rank >= 1 && rank <= U.size(), "mu rank out of range");
  std::vector<PointId> pts = P;
  std::sort(pts.begin(), pts.end());
  std::size_t size = std::min<std::size_t>(k, pts.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<PointId> X;
  std::vector<double> d;
  for_each_subset(pts.size(), size, [&](const std::vector<std::size_t>& idx) {
    X.clear();
    for (std::size_t i : idx) X.push_back(pts[i]);
    d.clear();
    for (PointId u : U) d.push_back(dist_to_set(m, u, X).dist);
    std::nth_element(d.begin(), d.begin() + (rank - 1), d.end());
    best = std::min(best, d[rank - 1]);
  });
  return best;
}

GonzalezResult gonzalez(const MetricSpace& m, const std::vector<PointId>& P, int k) {
  if (k < 1) throw ValidationError("gonzalez needs k >= 1");
  GonzalezResult r{{}, 0.0};
  if (P.empty()) return r;
  std::vector<PointId> pts = P;
  std::sort(pts.begin(), pts.end());
  r.centers.push_back(pts.front());
  std::vector<double> d(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) d[i] = m.dist(pts[i], r.centers[0]);
  while (r.centers.size() < static_cast<std::size_t>(k) && r.centers.size() < pts.size()) {
    std::size_t far = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (d[i] > d[far]) far = i;  // ties keep the smaller id (earlier index)
    if (d[far] == 0.0) break;
    r.centers.push_back(pts[far]);
    for (std::size_t i = 0; i < pts.size(); ++i) d[i] = std::min(d[i], m.dist(pts[i], pts[far]));
  }
  r.cost = *std::max_element(d.begin(), d.end());
  std::sort(r.centers.begin(), r.centers.end());
  return r;
}

double select_radius_sorted(const MetricSpace& m, const std::vector<PointId>& U,
                            const std::vector<PointId>& S, double beta) {
  if (U.empty()) return 0.0;
  DYNKC_CHECK(!S.empty(), "select_radius_sorted needs a nonempty sample");
  std::vector<double> d;
  d.reserve(U.size());
  for (PointId u : U) d.push_back(dist_to_set(m, u, S).dist);
  std::sort(d.begin(), d.end());
  std::size_t rank = static_cast<std::size_t>(std::ceil(beta * static_cast<double>(U.size())));
  if (rank < 1) rank = 1;
  if (rank > d.size()) rank = d.size();
  return d[rank - 1];
}

namespace {

bool seq_explore(const SeqSearchState& st, std::size_t slot, std::vector<char>& visited,
                 SeqSearchResult& out, std::vector<PointId>& path) {
  visited[slot] = 1;
  out.visited_slots.push_back(slot);
  std::vector<PointId> members = st.clusters[slot];
  std::sort(members.begin(), members.end());
  for (PointId p : members) {
    if (st.metric->dist(p, st.center_points[slot]) <= st.r) continue;
    // nearest surviving center, ties to the smaller center id
    double best_d = std::numeric_limits<double>::infinity();
    std::size_t best_slot = 0;
    bool have = false;
    for (std::size_t s = 0; s < st.center_points.size(); ++s) {
      if (s == st.root_slot) continue;
      double d = st.metric->dist(p, st.center_points[s]);
      if (!have || d < best_d || (d == best_d && st.center_points[s] < st.center_points[best_slot])) {
        best_d = d;
        best_slot = s;
        have = true;
      }
    }
    if (!have || best_d > st.r) {
      path.push_back(p);
      out.sequence = path;
      out.found = true;
      return true;
    }
    if (!visited[best_slot]) {
      path.push_back(p);
      path.push_back(st.center_points[best_slot]);
      if (seq_explore(st, best_slot, visited, out, path)) return true;
      path.pop_back();
      path.pop_back();
    }
  }
  return false;
}

}  // namespace

SeqSearchResult exhaustive_seq_search(const SeqSearchState& st) {
  DYNKC_CHECK(st.metric != nullptr, "seq search needs a metric");
  DYNKC_CHECK(st.center_points.size() == st.clusters.size(), "seq state shape mismatch");
  DYNKC_CHECK(st.root_slot < st.center_points.size(), "seq root out of range");
  SeqSearchResult out;
  std::vector<char> visited(st.center_points.size(), 0);
  std::vector<PointId> path{st.center_points[st.root_slot]};
  seq_explore(st, st.root_slot, visited, out, path);
  return out;
}

}  // namespace dynkc
