#include "cgi/labels.hpp"

#include <algorithm>

#include "cgi/errors.hpp"

namespace cgi {

Label Label::from_string(std::string_view s) {
  Label l(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1')
      throw InputError("label string must be 0/1: " + std::string(s));
    l.bits_[i] = s[i] == '1';
  }
  return l;
}

std::optional<std::size_t> Label::msb() const {
  for (std::size_t i = bits_.size(); i > 0; --i)
    if (bits_[i - 1]) return i;
  return std::nullopt;
}

std::string Label::to_string() const {
  std::string s;
  for (bool b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

Label c_label(const Graph& g, const NodeSeq& c, NodeId v) {
  g.check_node(v);
  validate_seq(g, c);
  Label l(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) l.set(i, g.adjacent(v, c[i]));
  return l;
}

std::vector<Label> c_labels(const Graph& g, const NodeSeq& c) {
  validate_seq(g, c);
  std::vector<Label> out(g.n(), Label(c.size()));
  for (NodeId v = 0; v < g.n(); ++v)
    for (std::size_t i = 0; i < c.size(); ++i) out[v].set(i, g.adjacent(v, c[i]));
  return out;
}

std::vector<NodeId> label_class(const Graph& g, const NodeSeq& c,
                                const Label& x) {
  if (x.size() != c.size())
    throw InputError("label length " + std::to_string(x.size()) +
                     " != |C| = " + std::to_string(c.size()));
  const auto labels = c_labels(g, c);
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.n(); ++v)
    if (labels[v] == x) out.push_back(v);
  return out;
}

std::map<Label, std::size_t> class_sizes(const Graph& g, const NodeSeq& c) {
  std::map<Label, std::size_t> sizes;
  for (const Label& l : c_labels(g, c)) ++sizes[l];
  return sizes;
}

bool is_beta_separating(const Graph& g, const NodeSeq& c, double beta) {
  const auto labels = c_labels(g, c);
  const double threshold = beta * g.n();
  for (NodeId u = 0; u < g.n(); ++u) {
    for (NodeId v = u + 1; v < g.n(); ++v) {
      if (labels[u] != labels[v]) continue;
      std::size_t diff = 0;
      for (NodeId w = 0; w < g.n(); ++w)
        if (g.adjacent(u, w) != g.adjacent(v, w)) ++diff;
      if (static_cast<double>(diff) >= threshold) return false;
    }
  }
  return true;
}

namespace {

void check_shapes(const Bijection& f, const Graph& g, const Graph& h,
                  const NodeSeq& cg, const NodeSeq& ch) {
  if (g.n() != h.n() || f.size() != g.n())
    throw InputError("bijection and graphs must share n");
  if (cg.size() != ch.size()) throw InputError("anchor sequences differ in length");
  validate_seq(g, cg);
  validate_seq(h, ch);
}

bool maps_anchors(const Bijection& f, const NodeSeq& cg, const NodeSeq& ch) {
  for (std::size_t i = 0; i < cg.size(); ++i)
    if (f(cg[i]) != ch[i]) return false;
  return true;
}

}  // namespace

bool is_label_consistent(const Bijection& f, const Graph& g, const Graph& h,
                         const NodeSeq& cg, const NodeSeq& ch) {
  check_shapes(f, g, h, cg, ch);
  if (!maps_anchors(f, cg, ch)) return false;
  const auto lg = c_labels(g, cg);
  const auto lh = c_labels(h, ch);
  for (NodeId v = 0; v < g.n(); ++v)
    if (lg[v] != lh[f(v)]) return false;
  return true;
}

bool is_max_consistent(const Bijection& f, const Graph& g, const Graph& h,
                       const NodeSeq& cg, const NodeSeq& ch) {
  check_shapes(f, g, h, cg, ch);
  if (!maps_anchors(f, cg, ch)) return false;
  const auto lg = c_labels(g, cg);
  const auto lh = c_labels(h, ch);
  const auto sg = class_sizes(g, cg);
  const auto sh = class_sizes(h, ch);
  for (NodeId v = 0; v < g.n(); ++v) {
    auto it = sh.find(lg[v]);
    const bool equal = it != sh.end() && it->second == sg.at(lg[v]);
    if (equal && lh[f(v)] != lg[v]) return false;
  }
  return true;
}

Bijection sample_max_consistent(const Graph& g, const Graph& h,
                                const NodeSeq& c, const NodeSeq& p, Rng& rng) {
  if (g.n() != h.n()) throw InputError("graphs must share n");
  if (c.size() != p.size()) throw InputError("anchor sequences differ in length");
  validate_seq(g, c);
  validate_seq(h, p);
  const auto lg = c_labels(g, c);
  const auto lh = c_labels(h, p);
  for (std::size_t i = 0; i < c.size(); ++i)
    if (lg[c[i]] != lh[p[i]])
      throw InputError("anchor labels differ at position " + std::to_string(i + 1));

  const NodeId n = g.n();
  std::vector<NodeId> image(n, n);
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < c.size(); ++i) {
    image[c[i]] = p[i];
    used[p[i]] = true;
  }

  std::map<Label, std::vector<NodeId>> dom, cod;
  for (NodeId v = 0; v < n; ++v) {
    if (image[v] == n) dom[lg[v]].push_back(v);
    if (!used[v]) cod[lh[v]].push_back(v);
  }
  const auto sg = class_sizes(g, c);
  const auto sh = class_sizes(h, p);
  auto equal_sizes = [&](const Label& x) {
    auto a = sg.find(x);
    auto b = sh.find(x);
    return a != sg.end() && b != sh.end() && a->second == b->second;
  };

  std::vector<NodeId> rest_dom, rest_cod;
  for (auto& [x, members] : dom) {
    if (!equal_sizes(x)) {
      rest_dom.insert(rest_dom.end(), members.begin(), members.end());
      continue;
    }
    auto& targets = cod.at(x);
    std::shuffle(targets.begin(), targets.end(), rng);
    for (std::size_t i = 0; i < members.size(); ++i) image[members[i]] = targets[i];
  }
  for (auto& [x, targets] : cod)
    if (!equal_sizes(x)) rest_cod.insert(rest_cod.end(), targets.begin(), targets.end());
  std::sort(rest_dom.begin(), rest_dom.end());
  std::sort(rest_cod.begin(), rest_cod.end());
  std::shuffle(rest_cod.begin(), rest_cod.end(), rng);
  for (std::size_t i = 0; i < rest_dom.size(); ++i) image[rest_dom[i]] = rest_cod[i];
  return Bijection(std::move(image));
}

}  // namespace cgi
