#include "dynkc/combined.hpp"

#include <algorithm>
#include <iterator>

namespace dynkc {

CombinedClusterer::CombinedClusterer(MetricSpace& metric, const Params& prm)
    : metric_(metric), merged_(metric, prm), kcenter_(metric, prm) {}

void CombinedClusterer::preprocess(const std::vector<UpdateEvent>& initial) {
  std::vector<PointId> ids;
  ids.reserve(initial.size());
  for (const UpdateEvent& ev : initial) {
    DYNKC_CHECK(ev.kind == UpdateEvent::Kind::kInsert, "preprocess takes insertions only");
    ids.push_back(ev.id);
  }
  preprocess_ids(ids);
}

void CombinedClusterer::preprocess_ids(const std::vector<PointId>& ids) {
  merged_.preprocess_ids(ids);
  merged_.take_support_delta();  // the initial support is consumed wholesale
  kcenter_.preprocess_ids(merged_.solution());
}

UpdateOutcome CombinedClusterer::apply(const UpdateEvent& ev) {
  std::uint64_t evals0 = metric_.evals();
  std::vector<PointId> before = kcenter_.solution();

  UpdateOutcome outer = merged_.apply(ev);

  PointSet touched;
  for (const auto& [id, entered] : merged_.take_support_delta()) touched.insert(id);
  std::vector<PointId> dels;
  std::vector<PointId> ins;
  for (PointId id : touched) {
    bool now = merged_.hat().contains(id);
    bool tracked = kcenter_.live().count(id) != 0;
    if (tracked && !now) dels.push_back(id);
    if (!tracked && now) ins.push_back(id);
  }
  for (PointId id : dels) kcenter_.apply({UpdateEvent::Kind::kDelete, id, {}});
  for (PointId id : ins) kcenter_.apply({UpdateEvent::Kind::kInsert, id, {}});

  std::vector<PointId> after = kcenter_.solution();
  std::vector<PointId> sym;
  std::set_symmetric_difference(before.begin(), before.end(), after.begin(), after.end(),
                                std::back_inserter(sym));
  UpdateOutcome out;
  out.n = outer.n;
  out.solution_size = after.size();
  out.recourse = static_cast<double>(sym.size()) / 2.0;
  out.work_units = metric_.evals() - evals0;
  return out;
}

std::vector<PointId> CombinedClusterer::solution() const { return kcenter_.solution(); }

double CombinedClusterer::solution_cost() const {
  std::vector<PointId> centers = kcenter_.solution();
  double worst = 0.0;
  for (PointId p : merged_.inner().live()) worst = std::max(worst, dist_to_set(metric_, p, centers).dist);
  return worst;
}

}  // namespace dynkc
