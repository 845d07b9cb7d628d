#include "ridecomfort/compare.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ridecomfort/error.hpp"

namespace ridecomfort {

namespace {

const std::string& entity_of(const SituationKey& k, EntityKind kind) {
  switch (kind) {
    case EntityKind::driver: return k.driver_id;
    case EntityKind::car: return k.car_id;
    case EntityKind::section: return k.section_label;
  }
  return k.driver_id;
}

SituationKey with_entity(SituationKey k, EntityKind kind, const std::string& value) {
  switch (kind) {
    case EntityKind::driver: k.driver_id = value; break;
    case EntityKind::car: k.car_id = value; break;
    case EntityKind::section: k.section_label = value; break;
  }
  return k;
}

const PerKm& per_km_of(const ComfortReport& r) {
  if (!r.per_km) {
    throw Error(ErrorCode::zero_distance, "section comparison needs distance-normalised reports");
  }
  return *r.per_km;
}

}  // namespace

const char* to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::driver: return "driver";
    case EntityKind::car: return "car";
    case EntityKind::section: return "section";
  }
  return "?";
}

EntityKind entity_kind_from_string(const std::string& name) {
  if (name == "driver") return EntityKind::driver;
  if (name == "car") return EntityKind::car;
  if (name == "section") return EntityKind::section;
  throw Error(ErrorCode::invalid_argument, "unknown entity kind '" + name + "'");
}

const char* to_string(Metric m) {
  switch (m) {
    case Metric::a_v: return "A_v";
    case Metric::a_wx: return "a_wx";
    case Metric::a_wy: return "a_wy";
    case Metric::a_wz: return "a_wz";
    case Metric::msdv_x: return "msdv_x";
    case Metric::msdv_y: return "msdv_y";
    case Metric::msdv_z: return "msdv_z";
    case Metric::n_x: return "n_x";
    case Metric::n_y: return "n_y";
    case Metric::n_z: return "n_z";
  }
  return "?";
}

Metric metric_from_string(const std::string& name) {
  for (Metric m : kAllMetrics) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::invalid_argument, "unknown metric '" + name + "'");
}

bool scale_covariant(Metric m) { return m != Metric::n_x && m != Metric::n_y && m != Metric::n_z; }

double metric_value(const ComfortReport& r, Metric m, EntityKind kind) {
  const bool by_distance = kind == EntityKind::section;
  switch (m) {
    case Metric::a_v: return r.a_v;
    case Metric::a_wx: return r.a_w[0];
    case Metric::a_wy: return r.a_w[1];
    case Metric::a_wz: return r.a_w[2];
    case Metric::msdv_x:
    case Metric::msdv_y:
    case Metric::msdv_z: {
      const auto a = static_cast<std::size_t>(m) - static_cast<std::size_t>(Metric::msdv_x);
      return by_distance ? per_km_of(r).msdv[a] : r.msdv[a];
    }
    case Metric::n_x:
    case Metric::n_y:
    case Metric::n_z: {
      const auto a = static_cast<std::size_t>(m) - static_cast<std::size_t>(Metric::n_x);
      return by_distance ? per_km_of(r).n_events[a] : static_cast<double>(r.n_events[a]);
    }
  }
  return 0.0;
}

ReportSet situations_of(std::span<const TripReport> trips) {
  ReportSet out;
  for (const auto& trip : trips) {
    for (const auto& s : trip.sections) {
      SituationKey key{trip.driver_id, trip.car_id, s.section.label};
      if (!out.emplace(key, s.report).second) {
        throw Error(ErrorCode::invalid_argument, "duplicate situation " + key.driver_id + "/" +
                                                     key.car_id + "/" + key.section_label);
      }
    }
  }
  return out;
}

Outcome pairwise_compare(double v_i, double v_j, double epsilon) {
  if (v_i < 0.0 || v_j < 0.0) throw Error(ErrorCode::invalid_argument, "compared values must be >= 0");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "epsilon must lie in [0, 1)");
  }
  if (std::abs(v_i - v_j) <= epsilon * std::max(v_i, v_j)) return Outcome::nondeterminant;
  return v_i > v_j ? Outcome::i_dominates : Outcome::j_dominates;
}

const PairStats& ComparisonMatrix::find(const std::string& i, const std::string& j,
                                        Metric m) const {
  for (const auto& p : pairs) {
    if (p.i == i && p.j == j && p.metric == m) return p;
  }
  throw Error(ErrorCode::invalid_argument, "no comparison for " + i + " vs " + j);
}

ComparisonMatrix aggregate_matrix(const ReportSet& reports, EntityKind kind,
                                  std::span<const Metric> metrics, double epsilon) {
  std::set<std::string> entities;
  for (const auto& [key, report] : reports) entities.insert(entity_of(key, kind));
  if (entities.size() < 2) {
    throw Error(ErrorCode::no_matched_situations,
                std::string("need at least two ") + to_string(kind) + "s to compare, found " +
                    std::to_string(entities.size()));
  }

  ComparisonMatrix out;
  out.entity_kind = kind;
  out.epsilon = epsilon;
  out.entities.assign(entities.begin(), entities.end());
  for (const auto& i : out.entities) {
    for (const auto& j : out.entities) {
      if (i == j) continue;
      // Situations of i whose counterpart (same non-compared keys) exists for j.
      std::vector<std::pair<const ComfortReport*, const ComfortReport*>> matched;
      for (const auto& [key, report] : reports) {
        if (entity_of(key, kind) != i) continue;
        const auto other = reports.find(with_entity(key, kind, j));
        if (other != reports.end()) matched.emplace_back(&report, &other->second);
      }
      if (matched.empty()) {
        throw Error(ErrorCode::no_matched_situations,
                    std::string("no matched situations between ") + to_string(kind) + " '" + i +
                        "' and '" + j + "'");
      }
      for (Metric m : metrics) {
        std::size_t gt = 0;
        std::size_t lt = 0;
        std::size_t nd = 0;
        for (const auto& [ri, rj] : matched) {
          switch (pairwise_compare(metric_value(*ri, m, kind), metric_value(*rj, m, kind), epsilon)) {
            case Outcome::i_dominates: ++gt; break;
            case Outcome::j_dominates: ++lt; break;
            case Outcome::nondeterminant: ++nd; break;
          }
        }
        const double total = static_cast<double>(matched.size());
        out.pairs.push_back({i, j, m, 100.0 * static_cast<double>(gt) / total,
                             100.0 * static_cast<double>(lt) / total,
                             100.0 * static_cast<double>(nd) / total, matched.size()});
      }
    }
  }
  return out;
}

ComparisonMatrix aggregate_matrix(const ReportSet& reports, EntityKind kind, Metric metric,
                                  double epsilon) {
  const Metric one[] = {metric};
  return aggregate_matrix(reports, kind, one, epsilon);
}

SweepResult threshold_sweep(const ReportSet& reports, EntityKind kind,
                            std::span<const Metric> metrics, std::span<const double> epsilons) {
  if (!std::is_sorted(epsilons.begin(), epsilons.end())) {
    throw Error(ErrorCode::invalid_argument, "sweep epsilons must be sorted ascending");
  }
  SweepResult out;
  for (double eps : epsilons) {
    out.epsilons.push_back(eps);
    out.matrices.push_back(aggregate_matrix(reports, kind, metrics, eps));
  }
  return out;
}

}  // namespace ridecomfort
