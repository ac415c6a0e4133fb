#include "veritas/selector/selector.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "veritas/error.hpp"
#include "veritas/stats/descriptive.hpp"

namespace veritas::selector {

using stats::ExactMode;
using stats::PairedSamples;

std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::normal: return "normal";
    case Distribution::not_normal: return "not-normal";
    case Distribution::mixed: return "mixed";
  }
  return "unknown";
}

std::string_view to_string(Variances v) {
  switch (v) {
    case Variances::equal: return "equal";
    case Variances::unequal: return "unequal";
    case Variances::any: return "any";
  }
  return "unknown";
}

std::string_view to_string(Decision d) {
  return d == Decision::reject_h0 ? "reject-H0" : "fail-to-reject-H0";
}

namespace {

std::string num(double x) { return veritas::to_string(Value(x)); }

// Shapiro-Wilk p, or nullopt with a note when the statistic is undefined.
std::optional<double> normality_p(const Sample& s, const char* label, std::vector<std::string>& notes) {
  try {
    return stats::shapiro_wilk(s).p_value;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate_sample && e.kind() != ErrorKind::unsupported_size) throw;
    notes.push_back(std::string("Shapiro-Wilk undefined for group ") + label + " (" + e.what() +
                    "); treated as not normal");
    return std::nullopt;
  }
}

}  // namespace

Classification classify(const Sample& a, const Sample& b, double alpha_pre, SelectionTrace* trace) {
  if (a.size() < 3 || b.size() < 3) {
    throw Error(ErrorKind::insufficient_data, "normality pre-test needs at least 3 values per group (got " +
                                                  std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                                                  ")");
  }
  std::vector<std::string> notes;
  const auto pa = normality_p(a, "A", notes);
  const auto pb = normality_p(b, "B", notes);
  std::optional<double> pv;
  try {
    pv = stats::levene(a, b).p_value;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate_sample) throw;
    notes.push_back(std::string("Levene undefined (") + e.what() + ")");
  }

  const bool normal_a = pa && *pa > alpha_pre;
  const bool normal_b = pb && *pb > alpha_pre;
  Classification c;
  if (normal_a && normal_b) {
    c.distribution = Distribution::normal;
    c.variances = pv && *pv <= alpha_pre ? Variances::unequal : Variances::equal;
  } else if (!normal_a && !normal_b) {
    c.distribution = Distribution::not_normal;
  } else {
    c.distribution = Distribution::mixed;
  }

  if (trace != nullptr) {
    trace->alpha_pre = alpha_pre;
    trace->normality_p_a = pa;
    trace->normality_p_b = pb;
    trace->variance_p = pv;
    trace->classification = c;
    trace->rationale.insert(trace->rationale.end(), notes.begin(), notes.end());
    auto judge = [&](const char* label, const std::optional<double>& p, bool normal) {
      if (p) {
        trace->rationale.push_back(std::string("Shapiro-Wilk p(") + label + ") = " + num(*p) +
                                   (normal ? " > " : " <= ") + num(alpha_pre) +
                                   (normal ? ": normal" : ": not normal"));
      }
    };
    judge("A", pa, normal_a);
    judge("B", pb, normal_b);
    if (c.distribution == Distribution::normal) {
      if (pv) {
        trace->rationale.push_back("Levene p = " + num(*pv) +
                                   (c.variances == Variances::equal ? " > " : " <= ") + num(alpha_pre) + ": " +
                                   std::string(to_string(c.variances)) + " variances");
      }
    } else {
      trace->rationale.push_back("variance test not consulted outside the normal branch");
    }
  }
  return c;
}

std::vector<TestMethod> select_test(const Classification& c) {
  switch (c.distribution) {
    case Distribution::normal:
      return {c.variances == Variances::unequal ? TestMethod::welch_t : TestMethod::paired_t};
    case Distribution::not_normal:
      return {TestMethod::wilcoxon_signed_rank};
    case Distribution::mixed:
      return {TestMethod::mann_whitney_u, TestMethod::ks_two_sample};
  }
  return {};
}

namespace {

bool matches(const GroupSelector& sel, const Trial& t) {
  for (const auto& [name, value] : sel) {
    auto it = t.bindings_x.find(name);
    if (it == t.bindings_x.end()) {
      it = t.bindings_c.find(name);
      if (it == t.bindings_c.end()) return false;
    }
    if (it->second != value) return false;
  }
  return true;
}

struct Accumulator {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::pair<double, std::size_t>> sums;

  void add(const std::string& key, double v) {
    auto [it, inserted] = sums.try_emplace(key, 0.0, 0);
    if (inserted) order.push_back(key);
    it->second.first += v;
    ++it->second.second;
  }
  double mean(const std::string& key) const {
    const auto& [sum, n] = sums.at(key);
    return sum / static_cast<double>(n);
  }
};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

}  // namespace

std::string pair_key(const Hypothesis& h, const Trial& trial) {
  std::string key;
  for (const auto& [name, value] : trial.bindings_x) {
    if (h.group_a.contains(name) || h.group_b.contains(name)) continue;
    key += name + "=" + veritas::to_string(value) + ";";
  }
  key += "seed=" + std::to_string(trial.coords.seed) + ";fold=" + std::to_string(trial.coords.fold);
  return key;
}

HypothesisData extract_groups(const Hypothesis& h, const ExperimentDesign& design,
                              std::span<const RunRecord> records) {
  (void)design;
  std::vector<const RunRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const RunRecord* x, const RunRecord* y) { return x->trial.index < y->trial.index; });

  Accumulator acc_a, acc_b;
  for (const auto* rec : sorted) {
    if (rec->status != TrialStatus::ok) continue;
    const auto it = rec->outcomes.find(h.metric);
    if (it == rec->outcomes.end()) continue;
    const auto v = as_real(it->second);
    if (!v) continue;
    const bool in_a = matches(h.group_a, rec->trial);
    const bool in_b = matches(h.group_b, rec->trial);
    if (!in_a && !in_b) continue;
    const auto key = pair_key(h, rec->trial);
    if (in_a) acc_a.add(key, *v);
    if (in_b) acc_b.add(key, *v);
  }
  if (acc_a.order.empty() || acc_b.order.empty()) {
    throw Error(ErrorKind::insufficient_data, "hypothesis '" + h.id + "': group " +
                                                  (acc_a.order.empty() ? "A" : "B") + " has no ok records");
  }

  HypothesisData data;
  if (h.pairing == Pairing::paired) {
    std::vector<std::string> missing_b, missing_a;
    for (const auto& k : acc_a.order) {
      if (!acc_b.sums.contains(k)) missing_b.push_back(k);
    }
    for (const auto& k : acc_b.order) {
      if (!acc_a.sums.contains(k)) missing_a.push_back(k);
    }
    if (!missing_a.empty() || !missing_b.empty()) {
      std::string msg = "hypothesis '" + h.id + "': unmatched pair keys";
      if (!missing_b.empty()) msg += "; missing from group B: " + join(missing_b);
      if (!missing_a.empty()) msg += "; missing from group A: " + join(missing_a);
      throw Error(ErrorKind::alignment_error, msg);
    }
    for (const auto& k : acc_a.order) {
      data.a.keys.push_back(k);
      data.a.values.push_back(acc_a.mean(k));
      data.b.keys.push_back(k);
      data.b.values.push_back(acc_b.mean(k));
    }
  } else {
    for (const auto& k : acc_a.order) {
      data.a.keys.push_back(k);
      data.a.values.push_back(acc_a.mean(k));
    }
    for (const auto& k : acc_b.order) {
      data.b.keys.push_back(k);
      data.b.values.push_back(acc_b.mean(k));
    }
  }
  return data;
}

namespace {

GroupStats group_stats(const Sample& s, double level) {
  GroupStats g;
  const auto d = stats::describe(s);
  g.n = d.n;
  g.mean = d.mean;
  g.sd = d.sd;
  if (s.size() >= 2) g.ci = stats::confidence_interval(s, level);
  return g;
}

TestResult degenerate_result(TestMethod m, Direction dir, const std::vector<std::size_t>& n, const Error& e) {
  TestResult r;
  r.method = m;
  r.statistic = 0.0;
  r.p_value = 1.0;
  r.n = n;
  r.direction = dir;
  r.warnings.push_back(std::string("degenerate-sample: ") + e.message() + "; p set to 1");
  return r;
}

}  // namespace

Verdict evaluate_hypothesis(const Hypothesis& h, const ExperimentDesign& design, std::span<const RunRecord> records,
                            const AnalysisOptions& options) {
  const auto data = extract_groups(h, design, records);
  if (data.a.values.size() < 3 || data.b.values.size() < 3) {
    throw Error(ErrorKind::insufficient_data, "hypothesis '" + h.id + "': need at least 3 values per group, got " +
                                                  std::to_string(data.a.values.size()) + " and " +
                                                  std::to_string(data.b.values.size()));
  }
  const Sample a(data.a.values);
  const Sample b(data.b.values);
  const bool paired = h.pairing == Pairing::paired;

  Verdict v;
  v.hypothesis_id = h.id;
  v.metric = h.metric;
  v.pairing = h.pairing;
  v.direction = h.direction;
  v.alpha = options.alpha.value_or(h.alpha);
  v.group_a = group_stats(a, options.ci_level);
  v.group_b = group_stats(b, options.ci_level);

  auto& trace = v.trace;
  const auto c = classify(a, b, options.alpha_pre, &trace);
  trace.chosen = select_test(c);
  switch (c.distribution) {
    case Distribution::normal:
      trace.rationale.push_back(c.variances == Variances::equal
                                    ? "selection row 1: normal, equal variances -> paired-t"
                                    : "selection row 2: normal, unequal variances -> welch-t");
      break;
    case Distribution::not_normal:
      trace.rationale.push_back("selection row 3: not normal -> wilcoxon-signed-rank");
      break;
    case Distribution::mixed:
      trace.rationale.push_back(
          "selection row 4: mixed -> mann-whitney-u (decides) and ks-two-sample (advisory)");
      break;
  }

  std::vector<TestMethod> applied;
  for (const auto m : trace.chosen) {
    if (m == TestMethod::paired_t && !paired) {
      trace.rationale.push_back("unpaired hypothesis: welch-t replaces paired-t");
      applied.push_back(TestMethod::welch_t);
    } else if (m == TestMethod::wilcoxon_signed_rank && !paired) {
      trace.rationale.push_back(
          "unpaired hypothesis: mann-whitney-u replaces wilcoxon-signed-rank (the selection table has no unpaired not-normal cell)");
      applied.push_back(TestMethod::mann_whitney_u);
    } else {
      if (m == TestMethod::welch_t && paired) {
        trace.rationale.push_back(
            "selection row 2 names a paired t-test with Welch's correction; Welch's two-sample t is applied to the "
            "unpaired group values and the pairing is ignored");
      }
      applied.push_back(m);
    }
  }
  trace.applied = applied;

  auto run = [&](TestMethod m) -> TestResult {
    const std::vector<std::size_t> n = paired && (m == TestMethod::paired_t || m == TestMethod::wilcoxon_signed_rank)
                                           ? std::vector<std::size_t>{a.size()}
                                           : std::vector<std::size_t>{a.size(), b.size()};
    const Direction dir = m == TestMethod::ks_two_sample ? Direction::two_sided : h.direction;
    try {
      switch (m) {
        case TestMethod::paired_t: return stats::paired_t(PairedSamples(a, b, data.a.keys), dir);
        case TestMethod::welch_t: {
          auto r = stats::welch_t(a, b, dir);
          try {
            r.effect = stats::cohens_d(a, b);
          } catch (const Error&) {
          }
          return r;
        }
        case TestMethod::wilcoxon_signed_rank:
          return stats::wilcoxon_signed_rank(PairedSamples(a, b, data.a.keys), dir, options.mode, options.exec);
        case TestMethod::mann_whitney_u: return stats::mann_whitney_u(a, b, dir, options.mode, options.exec);
        case TestMethod::ks_two_sample: return stats::ks_two_sample(a, b, options.mode, options.exec);
        default: break;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::degenerate_sample) throw;
      return degenerate_result(m, dir, n, e);
    }
    throw Error(ErrorKind::internal_inconsistency, "selector chose a pre-test as a primary test");
  };

  v.primary = run(applied.front());
  if (applied.size() > 1) {
    v.secondary = run(applied[1]);
    if (h.direction != Direction::two_sided) {
      trace.rationale.push_back("ks-two-sample is always two-sided; hypothesis direction applies to the primary test");
    }
  }
  v.effect = v.primary.effect;
  v.decision = decide(v.primary.p_value, v.alpha);
  return v;
}

Analysis analyze(const ExperimentDesign& design, std::span<const RunRecord> records, const AnalysisOptions& options) {
  Analysis out;
  for (const auto& h : design.hypotheses) {
    try {
      out.verdicts.push_back(evaluate_hypothesis(h, design, records, options));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::insufficient_data && e.kind() != ErrorKind::alignment_error) throw;
      out.errors.push_back({h.id, e.kind(), e.message()});
    }
  }
  if (options.holm && !out.verdicts.empty()) {
    std::vector<double> p;
    for (const auto& v : out.verdicts) p.push_back(v.primary.p_value);
    const auto adjusted = stats::holm_adjust(p);
    for (std::size_t i = 0; i < out.verdicts.size(); ++i) {
      auto& v = out.verdicts[i];
      v.p_adjusted = adjusted[i];
      v.decision = decide(adjusted[i], v.alpha);
      v.trace.rationale.push_back("Holm adjustment over " + std::to_string(p.size()) + " hypotheses: p = " +
                                  num(adjusted[i]));
    }
  }
  return out;
}

}  // namespace veritas::selector
