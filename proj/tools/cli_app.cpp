#include "cli_app.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cgi/approx.hpp"
#include "cgi/central.hpp"
#include "cgi/decision.hpp"
#include "cgi/errors.hpp"
#include "cgi/graph.hpp"
#include "cgi/instances.hpp"
#include "cgi/sim.hpp"
#include "cgi/streaming.hpp"
#include "cgi/testing.hpp"

namespace cgi::cli {

namespace {

using nlohmann::json;

struct Common {
  std::string topology;
  std::string known;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> bandwidth;
  std::string out;
  std::string events;
};

NetworkConfig network_config(const Common& c, NodeId n) {
  NetworkConfig cfg = NetworkConfig::congest(n, c.seed);
  if (c.bandwidth) cfg.bandwidth_bits = *c.bandwidth;
  return cfg;
}

// Writes to the --out file when given, otherwise to `out`.
void emit(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

void write_events(const std::string& path, const Transcript& t) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  t.write_events_csv(f);
}

std::pair<Graph, Graph> load_pair(const Common& c) {
  Graph gu = load_graph(c.topology);
  Graph gk = load_graph(c.known);
  if (gu.n() != gk.n())
    throw InputError("topology has " + std::to_string(gu.n()) + " nodes, known graph " +
                     std::to_string(gk.n()));
  if (!is_connected(gu)) throw InputError("topology must be connected");
  return {std::move(gu), std::move(gk)};
}

TestParams tester_params(NodeId n, double eps, std::optional<std::size_t> s,
                         std::optional<std::size_t> t) {
  if (!(eps > 0.0 && eps < 1.0))
    throw InputError("--eps must lie in (0,1), got " + std::to_string(eps));
  if (s) return TestParams::desk(n, eps, *s, t);
  TestParams p = TestParams::standard(n, eps);
  if (t) {
    p.t = *t;
    p.desk_override = true;
  }
  return p;
}

void add_common(CLI::App* sub, Common& c, bool pair) {
  if (pair) {
    sub->add_option("--topology", c.topology, "Graph file of the network (G_U)")->required();
    sub->add_option("--known", c.known, "Graph file of G_K")->required();
  }
  sub->add_option("--seed", c.seed, "Seed for all randomness")->required();
  sub->add_option("--bandwidth", c.bandwidth, "Bits per edge per round");
  sub->add_option("--out", c.out, "Write the result here instead of stdout");
  sub->add_option("--events", c.events, "Write the message log as CSV");
}

BitMatrix parse_matrix(const std::string& s, std::size_t k) {
  if (s.size() != k * k) throw InputError("matrix needs k*k = " + std::to_string(k * k) + " bits");
  BitMatrix m(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw InputError("matrix bits must be 0 or 1");
    m[i / k][i % k] = s[i] == '1';
  }
  return m;
}

BitMatrix random_matrix(std::size_t k, Rng& rng) {
  BitMatrix m(k, std::vector<bool>(k, false));
  for (auto& row : m)
    for (std::size_t j = 0; j < k; ++j) row[j] = uniform_below(rng, 2) == 1;
  return m;
}

std::vector<NodeId> parse_sweep(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || spec.substr(0, eq) != "n")
    throw InputError("--sweep expects n=A..B[:STEP] or n=A,B,...");
  const std::string body = spec.substr(eq + 1);
  std::vector<NodeId> out;
  auto num = [](const std::string& x) {
    if (x.empty() || x.find_first_not_of("0123456789") != std::string::npos)
      throw InputError("bad number in --sweep: '" + x + "'");
    return static_cast<NodeId>(std::stoul(x));
  };
  if (const auto dots = body.find(".."); dots != std::string::npos) {
    const NodeId lo = num(body.substr(0, dots));
    std::string rest = body.substr(dots + 2);
    std::optional<NodeId> step;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      step = num(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    const NodeId hi = num(rest);
    if (lo < 2 || hi < lo) throw InputError("--sweep range must satisfy 2 <= A <= B");
    if (step && *step == 0) throw InputError("--sweep step must be positive");
    // Without a step the range doubles: 8..64 is 8, 16, 32, 64.
    for (NodeId n = lo; n <= hi; n = step ? n + *step : n * 2) out.push_back(n);
  } else {
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(num(item));
  }
  if (out.empty()) throw InputError("--sweep selects no sizes");
  return out;
}

int cmd_gen(const Common& c, const std::string& kind, NodeId n, double eps, double p,
            std::size_t k, const std::string& x_bits, const std::string& y_bits,
            std::uint32_t d, int i, int j, std::ostream& out) {
  if (c.out.empty()) throw InputError("gen needs --out PREFIX");
  Graph gu, gk;
  json cert;
  if (kind == "iso") {
    const auto pair = gen_isomorphic_pair(n, p, c.seed);
    gu = pair.gu;
    gk = pair.gk;
    cert = pair.to_json();
  } else if (kind == "far") {
    const auto pair = gen_far_pair(n, eps, c.seed);
    gu = pair.gu;
    gk = pair.gk;
    cert = pair.to_json();
  } else if (kind == "decision-lb") {
    Rng rng(derive_seed(c.seed, {stream::kInstance, 4}));
    const BitMatrix x = x_bits.empty() ? random_matrix(k, rng) : parse_matrix(x_bits, k);
    const BitMatrix y = y_bits.empty() ? random_matrix(k, rng) : parse_matrix(y_bits, k);
    const auto pair = gen_decision_lb(x, y);
    gu = pair.gu;
    gk = pair.gk;
    cert = {{"kind", x == y ? "isomorphic" : "non_isomorphic"}, {"k", k}, {"x", x}, {"y", y}};
  } else if (kind == "testing-lb") {
    const auto base = gen_lb_base_pair(n, eps, c.seed);
    gu = gen_testing_lb(i, j, d, base.g1, base.g2);
    gk = gen_testing_lb(1, 2, d, base.g1, base.g2);
    cert = {{"kind", "testing_lb"}, {"i", i}, {"j", j}, {"D", d}, {"n", n},
            {"edges_g1", base.g1.num_edges()}, {"edges_g2", base.g2.num_edges()}};
  } else {
    throw InputError("unknown --kind '" + kind + "' (iso, far, decision-lb, testing-lb)");
  }
  save_graph(c.out + ".gu.txt", gu);
  save_graph(c.out + ".gk.txt", gk);
  {
    std::ofstream f(c.out + ".json");
    if (!f) throw InputError("cannot write " + c.out + ".json");
    f << cert.dump(2) << '\n';
  }
  out << json{{"gu", c.out + ".gu.txt"}, {"gk", c.out + ".gk.txt"}, {"certificate", cert}}.dump()
      << '\n';
  return kExitOk;
}

json decision_json(const DecisionResult& r) {
  json j = {{"method", r.method},
            {"rounds", r.transcript.rounds},
            {"bits", r.transcript.total_bits},
            {"fingerprint", r.fp.to_json()}};
  j["verdict"] = r.accept ? json(*r.accept ? "accept" : "reject") : json(nullptr);
  return j;
}

int cmd_decide(const Common& c, std::optional<std::size_t> k, bool rounds_only,
               std::ostream& out) {
  const auto [gu, gk] = load_pair(c);
  DecisionOptions opts;
  opts.k = k;
  opts.rounds_only = rounds_only;
  const auto r = run_decision_protocol(gu, gk, opts, network_config(c, gu.n()));
  emit(c.out, out, decision_json(r).dump() + "\n");
  write_events(c.events, r.transcript);
  return kExitOk;
}

int cmd_test(const Common& c, double eps, std::optional<std::size_t> s,
             std::optional<std::size_t> t, std::ostream& out) {
  const auto [gu, gk] = load_pair(c);
  const auto params = tester_params(gu.n(), eps, s, t);
  const auto r = run_tester(gu, gk, params, network_config(c, gu.n()));
  emit(c.out, out, r.to_json().dump() + "\n");
  write_events(c.events, r.transcript);
  return kExitOk;
}

int cmd_approx(const Common& c, double eps, std::optional<std::size_t> s,
               std::optional<std::size_t> t, std::ostream& out, std::ostream& err) {
  const auto [gu, gk] = load_pair(c);
  const auto params = tester_params(gu.n(), eps, s, t);
  const auto r = run_approx_iso(gu, gk, params, network_config(c, gu.n()));
  write_events(c.events, r.transcript);
  if (!r.success) {
    err << "approx-iso: tester rejected, no mapping emitted\n";
    return kExitProtocol;
  }
  std::ostringstream csv;
  csv << "v,g\n";
  for (NodeId v = 0; v < r.g.size(); ++v) csv << v << ',' << r.g[v] << '\n';
  csv << "# delta " << r.delta << '\n';
  emit(c.out, out, csv.str());
  return kExitOk;
}

int cmd_stream(const Common& c, const std::string& stream_path, NodeId n,
               std::optional<std::size_t> k, bool external, bool fingerprint_only,
               std::ostream& out) {
  if (n < 2) throw InputError("--n must be at least 2");
  Rng rng(derive_seed(c.seed, {stream::kPrimes}));
  StreamState st(n, sample_primes(n, k.value_or(2 * static_cast<std::size_t>(n)), rng),
                 external ? IdMode::kExternal : IdMode::kDense);
  std::ifstream in(stream_path);
  if (!in) throw InputError("cannot read " + stream_path);
  scan_edge_stream(in, [&](std::uint64_t u, std::uint64_t v) { stream_update(st, u, v); });
  json j = {{"edges", st.edges_seen()},
            {"fingerprint", Fingerprint{st.primes(), st.residues()}.to_json()},
            {"budget_bits", stream_space_budget(n)}};
  if (fingerprint_only) {
    j["verdict"] = nullptr;
  } else {
    if (c.known.empty()) throw InputError("stream-decide needs --known unless --fingerprint-only");
    j["verdict"] = stream_decide(st, load_graph(c.known)) ? "accept" : "reject";
  }
  j["space_peak_bits"] = st.meter().peak();
  emit(c.out, out, j.dump() + "\n");
  return kExitOk;
}

std::unique_ptr<QueryTester> make_tester(const std::string& name, std::size_t q, double param) {
  if (name == "density") return std::make_unique<DensityTester>(q, param);
  if (name == "degree") return std::make_unique<DegreeTester>(q, param);
  if (name == "walk") return std::make_unique<RandomWalkTester>(q, static_cast<std::uint64_t>(param));
  throw InputError("unknown --tester '" + name + "' (density, degree, walk)");
}

int cmd_central(const Common& c, const std::string& name, const std::string& mode,
                std::size_t q, double param, std::ostream& out) {
  const Graph g = load_graph(c.topology);
  if (!is_connected(g)) throw InputError("topology must be connected");
  auto tester = make_tester(name, q, param);
  const auto central = run_centralized(*tester, g, c.seed);
  CentralRun run;
  if (mode == "adaptive") run = run_adaptive(*tester, g, network_config(c, g.n()));
  else if (mode == "nonadaptive") run = run_nonadaptive(*tester, g, network_config(c, g.n()));
  else throw InputError("--mode must be adaptive or nonadaptive");
  const json j = {{"verdict", run.verdict ? "accept" : "reject"},
                  {"central_verdict", central.verdict ? "accept" : "reject"},
                  {"queries", run.queries},
                  {"rounds", run.rounds},
                  {"depth", run.depth}};
  emit(c.out, out, j.dump() + "\n");
  write_events(c.events, run.transcript);
  return kExitOk;
}

struct BenchRow {
  NodeId n;
  std::uint64_t seed;
  std::uint32_t d;
  std::string s, t;
  std::uint64_t rounds, bits;
  std::string verdict;
};

BenchRow bench_one(const std::string& algo, NodeId n, std::uint64_t seed, double eps,
                   std::size_t s, std::optional<std::size_t> t, std::optional<std::uint64_t> b) {
  const auto pair = gen_isomorphic_pair(n, 0.5, seed);
  NetworkConfig cfg = NetworkConfig::congest(n, seed);
  if (b) cfg.bandwidth_bits = *b;
  BenchRow row{n, seed, diameter(pair.gu), "", "", 0, 0, ""};
  if (algo == "test-iso") {
    const auto r = run_tester(pair.gu, pair.gk, TestParams::desk(n, eps, std::min<std::size_t>(s, n), t), cfg);
    row.s = std::to_string(r.s);
    row.t = std::to_string(r.t);
    row.rounds = r.rounds;
    row.bits = r.bits;
    row.verdict = r.accept ? "accept" : "reject";
  } else if (algo == "approx-iso") {
    const auto r = run_approx_iso(pair.gu, pair.gk, TestParams::desk(n, eps, std::min<std::size_t>(s, n), t), cfg);
    row.s = std::to_string(r.tester.s);
    row.t = std::to_string(r.tester.t);
    row.rounds = r.transcript.rounds;
    row.bits = r.transcript.total_bits;
    row.verdict = r.success ? "accept" : "reject";
  } else if (algo == "decide") {
    DecisionOptions opts;
    opts.rounds_only = true;
    const auto r = run_decision_protocol(pair.gu, pair.gk, opts, cfg);
    row.rounds = r.transcript.rounds;
    row.bits = r.transcript.total_bits;
    row.verdict = "skipped";
  } else {
    throw InputError("unknown --algo '" + algo + "' (test-iso, approx-iso, decide)");
  }
  return row;
}

int cmd_bench(const Common& c, const std::string& sweep, const std::string& algo, double eps,
              std::size_t s, std::optional<std::size_t> t, std::size_t trials, std::ostream& out) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("--eps must lie in (0,1)");
  if (trials == 0) throw InputError("--trials must be positive");
  const auto sizes = parse_sweep(sweep);
  std::vector<std::future<BenchRow>> jobs;
  for (NodeId n : sizes)
    for (std::size_t trial = 0; trial < trials; ++trial) {
      const std::uint64_t seed = derive_seed(c.seed, {n, trial});
      jobs.push_back(std::async(std::launch::async, bench_one, algo, n, seed, eps, s, t, c.bandwidth));
    }
  std::vector<BenchRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return a.n != b.n ? a.n < b.n : a.seed < b.seed;
  });
  std::ostringstream csv;
  csv << "n,D,s,t,rounds,bits,verdict\n";
  for (const auto& r : rows)
    csv << r.n << ',' << r.d << ',' << r.s << ',' << r.t << ',' << r.rounds << ',' << r.bits
        << ',' << r.verdict << '\n';
  emit(c.out, out, csv.str());
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed graph isomorphism protocols on a simulated CONGEST network"};
  app.require_subcommand(1);

  Common c;
  std::string kind = "iso", x_bits, y_bits, stream_path, tester_name = "density",
              mode = "nonadaptive", sweep = "n=8..64", algo = "test-iso";
  NodeId n = 0;
  double eps = 0.3, p = 0.5, param = 0.5;
  std::size_t k_bits = 2, q = 20, s_bench = 3, trials = 1;
  std::uint32_t d = 6;
  int i = 1, j = 2;
  std::optional<std::size_t> k, s, t;
  bool rounds_only = false, external = false, fingerprint_only = false;

  auto* gen = app.add_subcommand("gen", "Generate an instance pair");
  add_common(gen, c, false);
  gen->add_option("--kind", kind, "iso, far, decision-lb or testing-lb");
  gen->add_option("--n", n, "Number of nodes");
  gen->add_option("--eps", eps, "Distance parameter for far and testing-lb pairs");
  gen->add_option("--p", p, "Edge probability for iso pairs");
  gen->add_option("--k", k_bits, "Matrix side for decision-lb");
  gen->add_option("--x", x_bits, "Row-major bits of x (decision-lb)");
  gen->add_option("--y", y_bits, "Row-major bits of y (decision-lb)");
  gen->add_option("--d", d, "Path length D (testing-lb)");
  gen->add_option("--i", i, "Left graph index (testing-lb)");
  gen->add_option("--j", j, "Right graph index (testing-lb)");

  auto* decide = app.add_subcommand("decide", "Exact fingerprint decision protocol");
  add_common(decide, c, true);
  decide->add_option("--k", k, "Number of primes (default 2n)");
  decide->add_flag("--rounds-only", rounds_only, "Run every phase but skip the decide step");

  auto* test = app.add_subcommand("test-iso", "Distributed isomorphism tester");
  add_common(test, c, true);
  test->add_option("--eps", eps, "Distance parameter in (0,1)");
  test->add_option("--s", s, "Anchor count (desk parameters)");
  test->add_option("--t", t, "Edge sample size");

  auto* approx = app.add_subcommand("approx-iso", "Emit an approximate isomorphism g");
  add_common(approx, c, true);
  approx->add_option("--eps", eps, "Distance parameter in (0,1)");
  approx->add_option("--s", s, "Anchor count (desk parameters)");
  approx->add_option("--t", t, "Edge sample size");

  auto* sd = app.add_subcommand("stream-decide", "One-pass fingerprint over an edge stream");
  sd->add_option("--stream", stream_path, "Edge stream file")->required();
  sd->add_option("--n", n, "Number of nodes")->required();
  sd->add_option("--known", c.known, "Graph file of G_K");
  sd->add_option("--seed", c.seed, "Seed for all randomness")->required();
  sd->add_option("--k", k, "Number of primes (default 2n)");
  sd->add_option("--out", c.out, "Write the result here instead of stdout");
  sd->add_flag("--external-ids", external, "Stream ids are arbitrary 64-bit values");
  sd->add_flag("--fingerprint-only", fingerprint_only, "Stop after the pass");

  auto* cs = app.add_subcommand("central-sim", "Run a query tester over the network");
  cs->add_option("--topology", c.topology, "Graph file of the network")->required();
  cs->add_option("--seed", c.seed, "Seed for all randomness")->required();
  cs->add_option("--bandwidth", c.bandwidth, "Bits per edge per round");
  cs->add_option("--out", c.out, "Write the result here instead of stdout");
  cs->add_option("--events", c.events, "Write the message log as CSV");
  cs->add_option("--tester", tester_name, "density, degree or walk");
  cs->add_option("--mode", mode, "adaptive or nonadaptive");
  cs->add_option("--q", q, "Queries (density, degree) or walk steps");
  cs->add_option("--param", param, "Density threshold, mean degree bound or min degree");

  auto* bench = app.add_subcommand("bench", "Parameter sweep to CSV");
  bench->add_option("--sweep", sweep, "n=A..B (doubling), n=A..B:STEP or n=A,B,...");
  bench->add_option("--algo", algo, "test-iso, approx-iso or decide");
  bench->add_option("--seed", c.seed, "Base seed")->required();
  bench->add_option("--trials", trials, "Seeds per size");
  bench->add_option("--eps", eps, "Distance parameter in (0,1)");
  bench->add_option("--s", s_bench, "Anchor count");
  bench->add_option("--t", t, "Edge sample size");
  bench->add_option("--bandwidth", c.bandwidth, "Bits per edge per round");
  bench->add_option("--out", c.out, "Write the CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(c, kind, n, eps, p, k_bits, x_bits, y_bits, d, i, j, out);
    if (decide->parsed()) return cmd_decide(c, k, rounds_only, out);
    if (test->parsed()) return cmd_test(c, eps, s, t, out);
    if (approx->parsed()) return cmd_approx(c, eps, s, t, out, err);
    if (sd->parsed()) return cmd_stream(c, stream_path, n, k, external, fingerprint_only, out);
    if (cs->parsed()) return cmd_central(c, tester_name, mode, q, param, out);
    if (bench->parsed()) return cmd_bench(c, sweep, algo, eps, s_bench, t, trials, out);
  } catch (const InputError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitProtocol;
  }
  return kExitUsage;
}

}  // namespace cgi::cli
