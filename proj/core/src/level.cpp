#include "dynkc/level.hpp"

#include <algorithm>
#include <cmath>

namespace dynkc {

std::vector<PointId> sample_independent(const MetricSpace&, const std::vector<PointId>& U,
                                        const Params& prm, std::size_t n_global,
                                        std::mt19937_64& rng) {
  if (U.empty()) return {};
  double p = std::min(prm.alpha * prm.k * log2n(n_global) / static_cast<double>(U.size()), 1.0);
  std::vector<PointId> S;
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (PointId q : U)
      if (uniform_real(rng) < p) S.push_back(q);
    if (!S.empty()) return S;
  }
  S.push_back(U[uniform_index(rng, U.size())]);
  return S;
}

std::vector<PointId> sample_repeated_2k(const MetricSpace& m, const std::vector<PointId>& U,
                                        const Params& prm, std::size_t n_global,
                                        std::mt19937_64& rng) {
  if (U.empty()) return {};
  std::size_t want = 2 * static_cast<std::size_t>(prm.k);
  std::size_t rounds =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(prm.c_trials * log2n(n_global))));
  std::vector<PointId> best;
  double best_nu = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(U.size());
  for (std::size_t r = 0; r < rounds; ++r) {
    std::vector<PointId> cand;
    if (U.size() < want) {
      cand = U;
    } else {
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      for (std::size_t i = 0; i < want; ++i) {
        std::size_t j = i + uniform_index(rng, idx.size() - i);
        std::swap(idx[i], idx[j]);
      }
      for (std::size_t i = 0; i < want; ++i) cand.push_back(U[idx[i]]);
      std::sort(cand.begin(), cand.end());
    }
    double nu = select_radius(m, U, cand, prm.beta);
    if (nu < best_nu) {  // ties keep the earliest round
      best_nu = nu;
      best = std::move(cand);
    }
  }
  return best;
}

double select_radius(const MetricSpace& m, const std::vector<PointId>& U,
                     const std::vector<PointId>& S, double beta) {
  if (U.empty()) return 0.0;
  DYNKC_CHECK(!S.empty(), "select_radius needs a nonempty sample");
  std::vector<double> d;
  d.reserve(U.size());
  for (PointId u : U) d.push_back(dist_to_set(m, u, S).dist);
  std::size_t rank = static_cast<std::size_t>(std::ceil(beta * static_cast<double>(U.size())));
  if (rank < 1) rank = 1;
  if (rank > d.size()) rank = d.size();
  std::nth_element(d.begin(), d.begin() + (rank - 1), d.end());
  return d[rank - 1];
}

LevelBuild build_level(const MetricSpace& m, const std::vector<PointId>& U, const Params& prm,
                       std::size_t n_global, std::mt19937_64& rng) {
  LevelBuild out;
  if (U.empty()) return out;
  out.sample = prm.sampler == Sampler::kRepeated2k
                   ? sample_repeated_2k(m, U, prm, n_global, rng)
                   : sample_independent(m, U, prm, n_global, rng);
  std::sort(out.sample.begin(), out.sample.end());
  std::vector<double> d(U.size());
  std::vector<PointId> witness(U.size());
  for (std::size_t i = 0; i < U.size(); ++i) {
    NearestResult nr = dist_to_set(m, U[i], out.sample);
    d[i] = nr.dist;
    witness[i] = *nr.witness;
  }
  std::vector<double> sel = d;
  std::size_t rank = static_cast<std::size_t>(std::ceil(prm.beta * static_cast<double>(U.size())));
  if (rank < 1) rank = 1;
  if (rank > sel.size()) rank = sel.size();
  std::nth_element(sel.begin(), sel.begin() + (rank - 1), sel.end());
  out.nu = sel[rank - 1];
  for (std::size_t i = 0; i < U.size(); ++i)
    if (d[i] <= out.nu) out.ball_assign.emplace_back(U[i], witness[i]);
  return out;
}

}  // namespace dynkc
