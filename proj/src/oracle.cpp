#include "rstknn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rstknn/errors.hpp"

namespace rstknn {

double kth_nn_sim(std::size_t index, std::span<const STObject> dataset, int k,
                  const SimParams& params, const NormStats& stats) {
  std::vector<double> row;
  row.reserve(dataset.size());
  for (std::size_t j = 0; j < dataset.size(); ++j) {
    if (j != index) row.push_back(sim_st(dataset[index], dataset[j], params, stats));
  }
  if (k < 1 || row.size() < static_cast<std::size_t>(k))
    return -std::numeric_limits<double>::infinity();
  std::nth_element(row.begin(), row.begin() + (k - 1), row.end(), std::greater<>());
  return row[static_cast<std::size_t>(k - 1)];
}

std::vector<std::string> rknn_bruteforce(std::span<const STObject> dataset, const QueryObject& q,
                                         const SimParams& params, const NormStats& stats) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (sim_st(dataset[i], q, params, stats) > kth_nn_sim(i, dataset, params.k, params, stats))
      out.push_back(dataset[i].id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SandwichReport check_bound_sandwich(const IurTree& tree, const QueryObject& q,
                                    const SimParams& params, const NormStats& stats,
                                    const BoundFns& fns) {
  const auto& objs = tree.objects();
  const std::size_t n = objs.size();
  std::vector<double> sim(n * n), ej(n * n), qsim(n), qej(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      sim[a * n + b] = sim_st(objs[a], objs[b], params, stats);
      ej[a * n + b] = extended_jaccard(objs[a].vct, objs[b].vct);
    }
    qsim[a] = sim_st(objs[a], q, params, stats);
    qej[a] = extended_jaccard(objs[a].vct, q.vct);
  }

  std::vector<Entry> entries;
  std::vector<std::vector<std::uint32_t>> members;
  for (std::uint32_t i = 0; i < tree.nodes().size(); ++i) entries.push_back(Entry::node(i));
  for (std::uint32_t i = 0; i < n; ++i) entries.push_back(Entry::object(i));
  for (Entry e : entries) members.push_back(tree.subtree_objects(e));

  SandwichReport report;
  auto check = [&](const std::string& what, double lo_bound, double lo, double hi, double hi_bound) {
    ++report.pairs_checked;
    if (lo_bound <= lo && hi <= hi_bound) return;
    ++report.violations;
    if (report.details.size() < 20) {
      std::ostringstream s;
      s.precision(17);
      s << what << ": bounds [" << lo_bound << ", " << hi_bound << "] vs actual [" << lo << ", "
        << hi << "]";
      report.details.push_back(s.str());
    }
  };

  const GroupView qv = GroupView::of(q);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const GroupView ev = tree.view(entries[i]);
    for (std::size_t j = i; j < entries.size(); ++j) {
      const GroupView fv = tree.view(entries[j]);
      double smin = std::numeric_limits<double>::infinity(), smax = -smin;
      double tmin = smin, tmax = -smin;
      for (auto a : members[i]) {
        for (auto b : members[j]) {
          smin = std::min(smin, sim[a * n + b]);
          smax = std::max(smax, sim[a * n + b]);
          tmin = std::min(tmin, ej[a * n + b]);
          tmax = std::max(tmax, ej[a * n + b]);
        }
      }
      const std::string what = tree.label(entries[i]) + "/" + tree.label(entries[j]);
      check("st " + what, fns.min_st(ev, fv, params, stats), smin, smax,
            fns.max_st(ev, fv, params, stats));
      check("t " + what, fns.min_t(ev, fv), tmin, tmax, fns.max_t(ev, fv));
    }

    double smin = std::numeric_limits<double>::infinity(), smax = -smin;
    double tmin = smin, tmax = -smin;
    for (auto a : members[i]) {
      smin = std::min(smin, qsim[a]);
      smax = std::max(smax, qsim[a]);
      tmin = std::min(tmin, qej[a]);
      tmax = std::max(tmax, qej[a]);
    }
    const std::string what = tree.label(entries[i]) + "/Q";
    check("st " + what, fns.min_st(ev, qv, params, stats), smin, smax,
          fns.max_st(ev, qv, params, stats));
    check("t " + what, fns.min_t(ev, qv), tmin, tmax, fns.max_t(ev, qv));
  }
  return report;
}

TermVector dense_terms(std::span<const double> weights) {
  TermVector v;
  for (std::size_t i = 0; i < weights.size(); ++i) v.set("t" + std::to_string(i), weights[i]);
  return v;
}

bool fdim_ordering_refutation_check(std::span<const double> p, std::span<const double> p1,
                                    std::span<const double> p2) {
  if (p.size() != p1.size() || p.size() != p2.size())
    throw std::invalid_argument("vectors must have equal length");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (fdim_ratio(p[i], p1[i]) < fdim_ratio(p[i], p2[i])) return false;
  }
  const TermVector vp = dense_terms(p);
  return extended_jaccard(vp, dense_terms(p1)) < extended_jaccard(vp, dense_terms(p2));
}

bool fdim_ordering_refutation_check() {
  const double p[] = {100, 30}, p1[] = {1, 40}, p2[] = {1, 50};
  return fdim_ordering_refutation_check(p, p1, p2);
}

// ---------------------------------------------------------------------------
// Random instances

namespace {

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(items.size()) - 1))];
}

}  // namespace

TermVector random_terms(std::mt19937_64& rng, int vocab, int max_terms, int weight_max) {
  TermVector v;
  if (vocab <= 0) return v;
  std::vector<int> terms(static_cast<std::size_t>(vocab));
  for (int i = 0; i < vocab; ++i) terms[static_cast<std::size_t>(i)] = i;
  const int count = uniform_int(rng, 0, std::min(max_terms, vocab));
  for (int i = 0; i < count; ++i) {
    const int j = uniform_int(rng, i, vocab - 1);
    std::swap(terms[static_cast<std::size_t>(i)], terms[static_cast<std::size_t>(j)]);
    v.set("t" + std::to_string(terms[static_cast<std::size_t>(i)]), uniform_int(rng, 1, weight_max));
  }
  return v;
}

std::vector<STObject> random_dataset(std::mt19937_64& rng, std::size_t n, int vocab,
                                     const RandomConfig& cfg) {
  const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
  std::vector<STObject> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string num = std::to_string(i);
    STObject o;
    o.id = "o" + std::string(width - num.size(), '0') + num;
    o.loc = {static_cast<double>(uniform_int(rng, 0, cfg.coord_max)),
             static_cast<double>(uniform_int(rng, 0, cfg.coord_max))};
    o.vct = random_terms(rng, vocab, cfg.max_terms, cfg.weight_max);
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<STObject> generate_dataset(std::uint64_t seed, std::size_t n, int vocab) {
  if (n == 0) throw InvalidParams("n must be >= 1");
  std::mt19937_64 rng(seed);
  return random_dataset(rng, n, vocab);
}

Instance random_instance(std::uint64_t seed, std::uint64_t trial, const RandomConfig& cfg) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  std::mt19937_64 rng(seq);
  Instance inst;
  const auto n = static_cast<std::size_t>(
      uniform_int(rng, static_cast<int>(cfg.n_min), static_cast<int>(cfg.n_max)));
  inst.objects = random_dataset(rng, n, cfg.vocab, cfg);
  inst.query.loc = {static_cast<double>(uniform_int(rng, 0, cfg.coord_max)),
                    static_cast<double>(uniform_int(rng, 0, cfg.coord_max))};
  inst.query.vct = random_terms(rng, cfg.vocab, cfg.max_terms, cfg.weight_max);
  inst.params.k = pick(rng, cfg.ks);
  inst.params.alpha = pick(rng, cfg.alphas);
  inst.fanout = pick(rng, cfg.fanouts);
  return inst;
}

IurTree build_tree(const Instance& inst) {
  if (!inst.layout.empty()) return IurTree::from_layout(inst.objects, Layout::parse(inst.layout));
  return IurTree::build(inst.objects, inst.fanout);
}

NormStats instance_stats(const Instance& inst) { return norm_stats_or_degenerate(inst.objects); }

std::optional<Counterexample> counterexample_search(Mode mode, std::uint64_t seed,
                                                    std::size_t trials, const RandomConfig& cfg) {
  EngineOptions options;
  options.verify_invariants = false;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Instance inst = random_instance(seed, t, cfg);
    const IurTree tree = build_tree(inst);
    const NormStats stats = instance_stats(inst);
    auto oracle = rknn_bruteforce(inst.objects, inst.query, inst.params, stats);
    auto got = rstknn_query(tree, inst.query, inst.params, stats, mode, options).ids;
    if (got != oracle) return Counterexample{std::move(inst), t, std::move(got), std::move(oracle)};
  }
  return std::nullopt;
}

}  // namespace rstknn
