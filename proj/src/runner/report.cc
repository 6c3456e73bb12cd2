#include "uqbench/runner/report.h"

#include <algorithm>
#include <map>

#include "uqbench/backend/backend.h"
#include "uqbench/core/errors.h"

namespace uqbench::runner {
namespace {

using metrics::MetricValue;

// Perturbed-side observations for one estimator and one kind.
struct KindSamples {
  std::vector<metrics::ScorePair> pairs;  // instance_id keyed by `key_prefix`
  std::vector<metrics::HallucinationLabel> labels;
  bool any_unavailable = false;
  std::string unavailable_reason;
};

struct Index {
  // variant_id -> (instance_id, kind or nullopt for identity)
  std::map<std::string, std::pair<std::string, std::optional<Kind>>> variant;
  // (estimator, variant_id) -> score record
  std::map<std::pair<Estimator, std::string>, const ScoreRecord*> score;
  // (instance_id, kind) -> variant_id
  std::map<std::pair<std::string, Kind>, std::string> pert_variant;
  std::map<std::string, std::string> clean_variant;
  std::map<std::pair<std::string, std::string>, const LabelRecord*> label;
};

Index build_index(const EvaluationInput& in) {
  Index ix;
  for (const auto& v : in.variants) {
    const auto kind = v.spec ? std::optional<Kind>(v.spec->kind) : std::nullopt;
    ix.variant[v.variant_id] = {v.instance_id, kind};
    if (kind) {
      ix.pert_variant[{v.instance_id, *kind}] = v.variant_id;
    } else {
      ix.clean_variant[v.instance_id] = v.variant_id;
    }
  }
  for (const auto& s : in.scores) ix.score[{s.estimator, s.variant_id}] = &s;
  for (const auto& l : in.labels) ix.label[{l.instance_id, l.kind}] = &l;
  return ix;
}

const ScoreRecord* find_score(const Index& ix, Estimator e, const std::string& vid) {
  auto it = ix.score.find({e, vid});
  return it == ix.score.end() ? nullptr : it->second;
}

KindSamples collect(const EvaluationInput& in, const Index& ix, Estimator e, Kind k,
                    const std::string& key_prefix) {
  KindSamples out;
  const std::string kname(kind_name(k));
  for (const auto& inst : in.instances) {
    if (in.failed.count(inst.id)) continue;
    const auto pv = ix.pert_variant.find({inst.id, k});
    const auto cv = ix.clean_variant.find(inst.id);
    if (pv == ix.pert_variant.end() || cv == ix.clean_variant.end()) continue;
    if (auto lit = ix.label.find({inst.id, kname}); lit != ix.label.end()) {
      out.labels.push_back({key_prefix + inst.id, lit->second->clean_correct,
                            lit->second->pert_correct, in.label_mode});
    }
    const auto* clean = find_score(ix, e, cv->second);
    const auto* pert = find_score(ix, e, pv->second);
    for (const auto* s : {clean, pert}) {
      if (s && s->status == ScoreStatus::kUnavailable && !out.any_unavailable) {
        out.any_unavailable = true;
        auto r = s->meta.find("reason");
        out.unavailable_reason = r == s->meta.end() ? "unavailable" : r->second;
      }
    }
    if (clean && pert && clean->score && pert->score) {
      out.pairs.push_back({key_prefix + inst.id, *clean->score, *pert->score});
    }
  }
  return out;
}

Json cell_json(const std::vector<metrics::ScorePair>& pairs,
               const std::vector<double>& clean_scores,
               const std::vector<metrics::HallucinationLabel>& labels) {
  std::vector<double> pos;
  for (const auto& p : pairs) pos.push_back(p.u_pert);
  return Json{{"status", "ok"},
              {"auroc", metrics::auroc(pos, clean_scores)},
              {"best_f1", metrics::best_f1(pos, clean_scores)},
              {"urr", metrics::urr(pairs)},
              {"hcc", metrics::hcc(pairs, labels)},
              {"hallucination_rate", metrics::hallucination_rate(labels)},
              {"n_pairs", pairs.size()},
              {"n_labels", labels.size()}};
}

std::vector<double> clean_side(const std::vector<metrics::ScorePair>& pairs) {
  std::vector<double> out;
  for (const auto& p : pairs) out.push_back(p.u_clean);
  return out;
}

Json unavailable(const std::string& reason) {
  return Json{{"status", "unavailable"}, {"reason", reason}};
}

Json mean_cell(const std::vector<Json>& cells) {
  Json out{{"status", "ok"}};
  for (auto metric : kReportMetrics) {
    const std::string m(metric);
    double sum = 0.0;
    int n = 0;
    for (const auto& c : cells) {
      if (c.value("status", "") != "ok" || !c.at(m).is_number()) continue;
      sum += c.at(m).get<double>();
      ++n;
    }
    out[m] = n > 0 ? MetricValue::of(sum / n)
                   : MetricValue::undefined("no defined per-kind value");
  }
  return out;
}

Json subsets_section(const EvaluationInput& in, const Index& ix) {
  const bool tagged = std::any_of(in.instances.begin(), in.instances.end(),
                                  [](const auto& i) { return i.subset_tag.has_value(); });
  if (!tagged) return nullptr;
  Json out = Json::object();
  for (auto e : in.estimators) {
    std::map<SubsetTag, std::vector<double>> by_tag;
    for (const auto& inst : in.instances) {
      if (!inst.subset_tag || in.failed.count(inst.id)) continue;
      const auto cv = ix.clean_variant.find(inst.id);
      if (cv == ix.clean_variant.end()) continue;
      const auto* s = find_score(ix, e, cv->second);
      if (s && s->score) by_tag[*inst.subset_tag].push_back(*s->score);
    }
    Json row = Json::object();
    const auto& neg = by_tag[SubsetTag::kClean];
    for (auto tag : {SubsetTag::kImage, SubsetTag::kText, SubsetTag::kCross}) {
      const auto& pos = by_tag[tag];
      if (pos.empty()) continue;
      row[std::string(subset_tag_name(tag))] =
          Json{{"auroc", metrics::auroc(pos, neg)},
               {"best_f1", metrics::best_f1(pos, neg)},
               {"n_pos", pos.size()},
               {"n_neg", neg.size()}};
    }
    out[std::string(estimator_name(e))] = row;
  }
  return out;
}

}  // namespace

Json build_report(const EvaluationInput& in) {
  const Index ix = build_index(in);
  Json results = Json::object();
  Json aggregates = Json::object();
  for (auto e : in.estimators) {
    const std::string ename(estimator_name(e));
    const bool capable = backend::estimator_available(e, in.capabilities);
    Json row = Json::object();
    std::map<Family, std::vector<Kind>> families;
    for (auto k : in.kinds) {
      families[family_of(k)].push_back(k);
      if (!capable) {
        row[std::string(kind_name(k))] = unavailable("backend capabilities");
        continue;
      }
      const auto s = collect(in, ix, e, k, "");
      if (s.pairs.empty() && s.any_unavailable) {
        row[std::string(kind_name(k))] = unavailable(s.unavailable_reason);
        continue;
      }
      row[std::string(kind_name(k))] = cell_json(s.pairs, clean_side(s.pairs), s.labels);
    }
    results[ename] = row;

    Json agg = Json::object();
    for (const auto& [family, kinds] : families) {
      const std::string fname(family_name(family));
      if (!capable) {
        agg[fname] = Json{{"pooled", unavailable("backend capabilities")},
                          {"mean", unavailable("backend capabilities")}};
        continue;
      }
      std::vector<metrics::ScorePair> pairs;
      std::vector<metrics::HallucinationLabel> labels;
      std::map<std::string, double> clean_once;
      std::vector<Json> cells;
      for (auto k : kinds) {
        const std::string prefix = std::string(kind_name(k)) + "|";
        auto s = collect(in, ix, e, k, prefix);
        for (const auto& p : s.pairs) {
          clean_once.emplace(p.instance_id.substr(prefix.size()), p.u_clean);
        }
        pairs.insert(pairs.end(), s.pairs.begin(), s.pairs.end());
        labels.insert(labels.end(), s.labels.begin(), s.labels.end());
        cells.push_back(row.at(std::string(kind_name(k))));
      }
      std::vector<double> clean;
      for (const auto& [id, u] : clean_once) clean.push_back(u);
      agg[fname] = Json{{"pooled", cell_json(pairs, clean, labels)},
                        {"mean", mean_cell(cells)}};
    }
    aggregates[ename] = agg;
  }

  int unavailable_cells = 0;
  for (const auto& [e, row] : results.items()) {
    for (const auto& [k, cell] : row.items()) {
      if (cell.at("status") != "ok") ++unavailable_cells;
    }
  }
  Json report{{"meta", in.meta},
              {"results", results},
              {"aggregates", aggregates},
              {"unavailable_cells", unavailable_cells}};
  report["meta"]["capabilities"] = in.capabilities;
  report["meta"]["failed_instances"] = in.failed.size();
  report["meta"]["instances"] = in.instances.size();
  if (auto subsets = subsets_section(in, ix); !subsets.is_null()) {
    report["subsets"] = subsets;
  }
  return report;
}

std::string emit_heatmap_data(const Json& report, std::string_view metric) {
  if (std::find(std::begin(kReportMetrics), std::end(kReportMetrics), metric) ==
      std::end(kReportMetrics)) {
    throw ParameterError("unknown metric '" + std::string(metric) +
                         "'; expected auroc, best_f1, urr, hcc or hallucination_rate");
  }
  const auto& results = report.at("results");
  // Column order is the kind order of the report's metadata when present.
  std::vector<std::string> kinds;
  if (report.contains("meta") && report.at("meta").contains("kinds")) {
    for (const auto& k : report.at("meta").at("kinds")) kinds.push_back(k.get<std::string>());
  } else if (!results.empty()) {
    for (const auto& [k, v] : results.begin()->items()) kinds.push_back(k);
  }
  std::vector<std::string> rows;
  if (report.contains("meta") && report.at("meta").contains("estimators")) {
    for (const auto& e : report.at("meta").at("estimators")) rows.push_back(e.get<std::string>());
  } else {
    for (const auto& [e, v] : results.items()) rows.push_back(e);
  }
  std::string csv = "estimator";
  for (const auto& k : kinds) csv += "," + k;
  csv += "\n";
  for (const auto& e : rows) {
    csv += e;
    for (const auto& k : kinds) {
      csv += ",";
      if (!results.contains(e) || !results.at(e).contains(k)) continue;
      const auto& cell = results.at(e).at(k);
      if (cell.value("status", "") != "ok") continue;
      const auto& v = cell.at(std::string(metric));
      if (v.is_number()) csv += v.dump();
    }
    csv += "\n";
  }
  return csv;
}

}  // namespace uqbench::runner
