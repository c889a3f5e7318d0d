#include "dseries/cli/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace dseries::cli {

using nlohmann::json;

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json to_json(const Convergent& c) {
  return json{{"n", c.index},
              {"cf_index", c.cf_index},
              {"a", c.a.get_str()},
              {"q", c.q.get_str()},
              {"dist_lo", c.dist.lower_string(17)},
              {"dist_hi", c.dist.upper_string(17)},
              {"pq", c.partial_quotient.get_str()},
              {"integer_part", c.integer_part}};
}

json to_json(const Expansion& e) {
  json convs = json::array();
  for (const auto& c : e.convergents) convs.push_back(to_json(c));
  json pqs = json::array();
  const std::size_t used = e.convergents.empty() ? 0 : e.convergents.back().cf_index + 1;
  for (std::size_t i = 0; i < used && i < e.partial_quotients.size(); ++i) {
    pqs.push_back(e.partial_quotients[i].get_str());
  }
  return json{{"status", to_string(e.status)},
              {"exact", e.exact},
              {"bits_used", e.bits_used},
              {"partial_quotients", pqs},
              {"convergents", convs}};
}

json to_json(const CriterionTerm& t) {
  return json{{"n", t.index},
              {"q", t.q.get_str()},
              {"q_next", t.q_next.get_str()},
              {"value", number_or_null(t.value)},
              {"log10_value", t.log10_value},
              {"rel_error", t.rel_error},
              {"running_sum", number_or_null(t.running_sum)},
              {"running_log10", t.running_log10}};
}

json to_json(const CriterionSum& s) {
  json terms = json::array();
  for (const auto& t : s.terms) terms.push_back(to_json(t));
  return json{{"terms", terms},
              {"sum", number_or_null(s.sum)},
              {"log10_sum", number_or_null(s.log10_sum)},
              {"overflow", s.overflow}};
}

json to_json(const Verdict& v) {
  json params = json::object();
  if (v.tail_source) params["tail_source"] = to_string(*v.tail_source);
  if (v.measure) {
    params["mu"] = v.measure->mu;
    params["C"] = v.measure->c;
  }
  if (v.tail_from_q) params["tail_from_q"] = v.tail_from_q->get_str();
  if (v.tail_bound) params["tail_bound"] = *v.tail_bound;
  if (v.reduced_q != 0) {
    params["reduced_a"] = v.reduced_a.get_str();
    params["reduced_q"] = v.reduced_q.get_str();
  }
  json evidence = to_json(v.evidence);
  evidence["convergents_examined"] = v.convergents_examined;
  evidence["expansion_status"] = to_string(v.expansion_status);
  return json{{"outcome", to_string(v.outcome)},
              {"certificate", to_string(v.certificate)},
              {"f", v.f_spec},
              {"alpha_description", v.alpha},
              {"parameters", params},
              {"evidence", evidence},
              {"notes", v.notes}};
}

json to_json(const PartialSumResult& r) {
  return json{{"mode", to_string(r.mode)},
              {"value", r.value},
              {"rounding_bound", r.rounding_bound},
              {"terms", r.terms}};
}

json to_json(const DriftPrediction& d) {
  return json{{"magnitude", d.magnitude},
              {"sign", d.sign},
              {"value", d.value()},
              {"error_allowance", d.error_allowance}};
}

}  // namespace dseries::cli
