#include "cgi/testing.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cgi/errors.hpp"

namespace cgi {

TestParams TestParams::standard(NodeId n, double eps, double c_s, double c_t) {
  if (n < 2) throw InputError("tester needs n >= 2");
  TestParams p;
  p.eps = eps;
  p.c_s = c_s;
  p.c_t = c_t;
  const double ln_n = std::log(static_cast<double>(n));
  p.s = std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(c_s * ln_n / eps)));
  p.t = static_cast<std::size_t>(std::ceil(c_t * static_cast<double>(p.s) * ln_n / eps));
  return p;
}

TestParams TestParams::desk(NodeId n, double eps, std::size_t s,
                            std::optional<std::size_t> t, double c_t) {
  if (n < 2) throw InputError("tester needs n >= 2");
  TestParams p;
  p.eps = eps;
  p.s = s;
  p.c_t = c_t;
  p.desk_override = true;
  const double ln_n = std::log(static_cast<double>(n));
  p.t = t.value_or(static_cast<std::size_t>(std::ceil(c_t * static_cast<double>(s) * ln_n / eps)));
  return p;
}

void TestParams::validate(NodeId n) const {
  if (!(eps > 0.0 && eps < 1.0))
    throw InputError("eps must lie in (0,1), got " + std::to_string(eps));
  if (s < 1 || s > n)
    throw InputError("s must lie in [1, n], got " + std::to_string(s));
  if (t < 1) throw InputError("t must be at least 1");
  if (!desk_override) {
    const TestParams ref = standard(n, eps, c_s, c_t);
    if (ref.s != s || ref.t != t)
      throw InputError("s and t do not follow the parameter formulas; set desk_override");
  }
}

std::vector<NodeId> EdgeSample::nodes() const {
  std::vector<NodeId> out;
  std::set<NodeId> seen;
  for (const auto& [i, j] : pairs) {
    if (seen.insert(i).second) out.push_back(i);
    if (seen.insert(j).second) out.push_back(j);
  }
  return out;
}

namespace {

bool extend(NodeId n, std::size_t s, NodeSeq& prefix, std::vector<bool>& used,
            std::uint64_t& count, const std::function<bool(NodeId)>& fits,
            const std::function<bool(const NodeSeq&)>& visit) {
  if (prefix.size() == s) {
    ++count;
    return visit(prefix);
  }
  for (NodeId v = 0; v < n; ++v) {
    if (used[v] || !fits(v)) continue;
    used[v] = true;
    prefix.push_back(v);
    const bool stop = extend(n, s, prefix, used, count, fits, visit);
    prefix.pop_back();
    used[v] = false;
    if (stop) return true;
  }
  return false;
}

}  // namespace

std::uint64_t enumerate_sequences(NodeId n, std::size_t s,
                                  const std::function<bool(const NodeSeq&)>& visit) {
  if (s > n)
    throw InputError("sequence length " + std::to_string(s) + " exceeds n=" +
                     std::to_string(n));
  NodeSeq prefix;
  std::vector<bool> used(n, false);
  std::uint64_t count = 0;
  extend(n, s, prefix, used, count, [](NodeId) { return true; }, visit);
  return count;
}

std::uint64_t enumerate_consistent_sequences(
    const Graph& gk, const std::vector<Label>& c_labels,
    const std::function<bool(const NodeSeq&)>& visit) {
  const std::size_t s = c_labels.size();
  if (s > gk.n())
    throw InputError("sequence length " + std::to_string(s) + " exceeds n=" +
                     std::to_string(gk.n()));
  NodeSeq prefix;
  std::vector<bool> used(gk.n(), false);
  std::uint64_t count = 0;
  // p_i must agree with every earlier p_j on adjacency, as c_i does with c_j.
  auto fits = [&](NodeId v) {
    const std::size_t i = prefix.size();
    for (std::size_t j = 0; j < i; ++j)
      if (gk.adjacent(v, prefix[j]) != c_labels[i][j]) return false;
    return true;
  };
  extend(gk.n(), s, prefix, used, count, fits, visit);
  return count;
}

CheckOutcome sequence_check(const Graph& gk, const RootView& view, const NodeSeq& p,
                            Rng& rng) {
  if (p.size() != view.c.size()) throw InputError("|P| differs from |C|");
  validate_seq(gk, p);
  CheckOutcome out;
  const auto lk = c_labels(gk, p);
  for (std::size_t i = 0; i < p.size(); ++i)
    if (lk[p[i]] != view.c_labels[i]) return out;

  std::map<Label, std::uint64_t> known_sizes;
  for (const Label& l : lk) ++known_sizes[l];
  for (const auto& [label, size] : view.class_sizes) {
    auto it = known_sizes.find(label);
    if ((it == known_sizes.end() ? 0 : it->second) != size) {
      out.stage = CheckOutcome::Stage::kClassSizes;
      return out;
    }
  }

  // Lazy f: anchors are fixed, every other node of I takes a uniform unused
  // node of G_K with its label.
  std::vector<bool> in_p(gk.n(), false);
  for (NodeId v : p) in_p[v] = true;
  std::map<Label, std::vector<NodeId>> pool;
  for (NodeId u = 0; u < gk.n(); ++u)
    if (!in_p[u]) pool[lk[u]].push_back(u);
  std::map<NodeId, NodeId> f;
  for (std::size_t i = 0; i < view.c.size(); ++i) f[view.c[i]] = p[i];
  for (NodeId v : view.sample.nodes()) {
    if (f.count(v)) {
      out.f.emplace_back(v, f[v]);
      continue;
    }
    auto& cands = pool[view.sample.labels.at(v)];
    if (cands.empty())
      throw ProtocolAbort("no unmapped node left for label " +
                          view.sample.labels.at(v).to_string());
    const std::size_t k = static_cast<std::size_t>(uniform_below(rng, cands.size()));
    f[v] = cands[k];
    cands.erase(cands.begin() + static_cast<std::ptrdiff_t>(k));
    out.f.emplace_back(v, f[v]);
  }

  const auto& pairs = view.sample.pairs;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    const bool in_k = i != j && gk.adjacent(f[i], f[j]);
    if (in_k != view.sample.answers[k]) ++out.mismatches;
  }
  const double limit = 1.5 * view.eps * static_cast<double>(pairs.size());
  out.stage = static_cast<double>(out.mismatches) <= limit + 1e-9
                  ? CheckOutcome::Stage::kPassed
                  : CheckOutcome::Stage::kMismatches;
  return out;
}

Rng bijection_rng(std::uint64_t seed, const NodeSeq& p) {
  std::uint64_t h = derive_seed(seed, {stream::kBijection, p.size()});
  for (NodeId v : p) h = derive_seed(h, {v});
  return Rng(h);
}

nlohmann::json TestResult::to_json() const {
  return {{"verdict", accept ? "accept" : "reject"},
          {"rounds", rounds},
          {"bits", bits},
          {"s", s},
          {"t", t},
          {"sequences_tried", sequences_tried}};
}

namespace {

BitString label_bits(const Label& l) {
  BitString b;
  for (std::size_t i = 0; i < l.size(); ++i) b.push_bit(l[i]);
  return b;
}

Label label_from(const BitString& b, std::size_t pos, std::size_t s) {
  Label l(s);
  for (std::size_t i = 0; i < s; ++i) l.set(i, b.bit(pos + i));
  return l;
}

}  // namespace

TestResult run_tester_on(Network& net, const Graph& gk, const TestParams& params,
                         const TesterOptions& opts, TesterState* state) {
  const NodeId n = net.n();
  const Graph& topo = net.topology();
  if (gk.n() != n) throw InputError("known graph and topology differ in size");
  params.validate(n);
  const std::size_t s = params.s;
  const std::size_t t = params.t;

  TesterState local_state;
  TesterState& st = state ? *state : local_state;

  // BFS tree and the anchor sequence C.
  st.tree = build_bfs(net, opts.root);
  const BfsTree& tree = st.tree;
  const Election election = elect_random_nodes(net, tree, s);
  st.c = election.seq;

  // Every node derives its label from its neighbor ids, then tells
  // its neighbors.
  st.labels.assign(n, Label(s));
  st.coord_index.assign(n, std::nullopt);
  for (std::size_t i = 0; i < s; ++i) {
    st.coord_index[st.c[i]] = i + 1;
    for (NodeId w : topo.neighbors(st.c[i])) st.labels[w].set(i, true);
  }
  std::vector<BitString> payload(n);
  for (NodeId v = 0; v < n; ++v) payload[v] = label_bits(st.labels[v]);
  const auto heard = exchange_with_neighbors(net, payload, s, "labels");
  st.neighbor_labels.assign(n, {});
  for (NodeId v = 0; v < n; ++v)
    for (const auto& b : heard[v]) st.neighbor_labels[v].push_back(label_from(b, 0, s));

  // The root draws A and spreads it; answers and labels come back.
  Rng sample_rng(derive_seed(net.config().seed, {stream::kEdgeSample}));
  const unsigned id_bits = bits_for(n - 1);
  std::vector<std::pair<NodeId, NodeId>> pairs(t);
  std::vector<BitString> pair_items(t);
  for (std::size_t k = 0; k < t; ++k) {
    pairs[k].first = static_cast<NodeId>(uniform_below(sample_rng, n));
    pairs[k].second = static_cast<NodeId>(uniform_below(sample_rng, n));
    pair_items[k].append(pairs[k].first, id_bits);
    pair_items[k].append(pairs[k].second, id_bits);
  }
  const auto got_pairs = broadcast_items(net, tree, pair_items, 2 * id_bits, "sample");

  const unsigned k_bits = bits_for(t - 1);
  const unsigned width =
      1 + std::max<unsigned>(k_bits + 1, id_bits + static_cast<unsigned>(s));
  std::vector<std::vector<BitString>> reports(n);
  std::vector<bool> reported(n, false);
  for (NodeId v = 0; v < n; ++v) {
    const auto& a = got_pairs[v];
    bool in_sample = st.coord_index[v].has_value();
    for (std::size_t k = 0; k < a.size(); ++k) {
      const NodeId i = static_cast<NodeId>(a[k].read(0, id_bits));
      const NodeId j = static_cast<NodeId>(a[k].read(id_bits, id_bits));
      in_sample |= i == v || j == v;
      if (i != v) continue;
      BitString item;
      item.push_bit(false);
      item.append(k, k_bits);
      item.push_bit(i != j && topo.adjacent(v, j));
      item.append(0, width - static_cast<unsigned>(item.size()));
      reports[v].push_back(std::move(item));
    }
    if (in_sample) {
      BitString item;
      item.push_bit(true);
      item.append(v, id_bits);
      item.append(label_bits(st.labels[v]));
      item.append(0, width - static_cast<unsigned>(item.size()));
      reports[v].push_back(std::move(item));
    }
  }
  const auto gathered = pipelined_collect(net, tree, reports, width, "sample-answers");

  RootView& view = st.view;
  view = RootView{};
  view.eps = params.eps;
  view.c = st.c;
  view.sample.pairs = pairs;
  view.sample.answers.assign(t, false);
  std::vector<bool> answered(t, false);
  for (const auto& item : gathered) {
    if (!item.bit(0)) {
      const std::size_t k = item.read(1, k_bits);
      view.sample.answers.at(k) = item.bit(1 + k_bits);
      answered.at(k) = true;
    } else {
      const NodeId v = static_cast<NodeId>(item.read(1, id_bits));
      view.sample.labels[v] = label_from(item, 1 + id_bits, s);
    }
  }
  if (!std::all_of(answered.begin(), answered.end(), [](bool b) { return b; }))
    throw ProtocolAbort("edge sample answer missing at the root");
  for (NodeId c : view.c) view.c_labels.push_back(view.sample.labels.at(c));

  // Class sizes of the labels of I, for the size check.
  std::set<Label> i_labels;
  for (NodeId v : view.sample.nodes()) i_labels.insert(view.sample.labels.at(v));
  std::vector<Label> queries;
  bool need_zero = opts.zero_label_check;
  for (const Label& l : i_labels) {
    if (l.is_zero()) need_zero = true;
    else queries.push_back(l);
  }
  const auto counts = label_class_size(net, tree, st.coord_index, st.neighbor_labels, queries);
  for (std::size_t q = 0; q < queries.size(); ++q) view.class_sizes[queries[q]] = counts[q];
  if (need_zero) view.class_sizes[Label(s)] = count_zero_label(net, tree, st.labels);

  // Root-side decision.
  TestResult result;
  result.s = s;
  result.t = t;
  result.distinct_labels = i_labels.size();
  result.election_restarts = election.restarts;
  const std::uint64_t f_seed = derive_seed(net.config().seed, {stream::kBijection});
  auto visit = [&](const NodeSeq& p) {
    Rng rng = bijection_rng(f_seed, p);
    const CheckOutcome out = sequence_check(gk, view, p, rng);
    if (out.stage != CheckOutcome::Stage::kAnchors) ++result.sequences_tried;
    if (!out.passed()) return false;
    result.accepting_p = p;
    return true;
  };
  if (opts.full_enumeration)
    enumerate_sequences(n, s, visit);
  else
    enumerate_consistent_sequences(gk, view.c_labels, visit);
  result.accept = result.accepting_p.has_value();

  broadcast_verdict(net, tree, result.accept);
  result.rounds = net.transcript().rounds;
  result.bits = net.transcript().total_bits;
  return result;
}

TestResult run_tester(const Graph& topology, const Graph& gk, const TestParams& params,
                      const NetworkConfig& cfg, const TesterOptions& opts) {
  Network net(topology, cfg);
  TestResult result = run_tester_on(net, gk, params, opts);
  result.transcript = net.take_transcript();
  return result;
}

}  // namespace cgi
