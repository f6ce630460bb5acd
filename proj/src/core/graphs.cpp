#include "dca/graphs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dca/errors.hpp"
#include "dca/rng.hpp"

namespace dca {

Graph::Graph(int p) : p_(p) { require(p >= 1, "graph needs at least one node"); }

Graph::Graph(int p, const std::vector<Edge>& edges) : Graph(p) {
  for (const auto& e : edges)
    if (!add_edge(e.a, e.b)) fail(ErrorCode::InvalidArgument, "duplicate edge in edge list");
}

void Graph::check_node(int j) const { require(j >= 0 && j < p_, "node index out of range"); }

bool Graph::has_edge(int j, int k) const { return j != k && edges_.count(Edge::of(j, k)) > 0; }

bool Graph::add_edge(int j, int k) {
  check_node(j);
  check_node(k);
  require(j != k, "self-loops are not allowed");
  return edges_.insert(Edge::of(j, k)).second;
}

bool Graph::remove_edge(int j, int k) { return edges_.erase(Edge::of(j, k)) > 0; }

int Graph::degree(int j) const {
  check_node(j);
  int d = 0;
  for (const auto& e : edges_) d += (e.a == j || e.b == j) ? 1 : 0;
  return d;
}

NodeSet Graph::neighborhood(int j) const {
  check_node(j);
  NodeSet out;
  for (const auto& e : edges_) {
    if (e.a == j) out.push_back(e.b);
    else if (e.b == j) out.push_back(e.a);
  }
  return make_node_set(std::move(out));
}

std::vector<NodeSet> Graph::neighborhoods() const {
  std::vector<NodeSet> out(static_cast<std::size_t>(p_));
  for (const auto& e : edges_) {
    out[e.a].push_back(e.b);
    out[e.b].push_back(e.a);
  }
  for (auto& ne : out) ne = make_node_set(std::move(ne));
  return out;
}

NodeSet neighborhood(const Graph& g, int j) { return g.neighborhood(j); }

namespace {

std::vector<int> sample_degrees(int p, int edge_count, double power, Rng& rng) {
  const int dmax = p - 1;
  std::vector<double> cdf(static_cast<std::size_t>(dmax));
  double total = 0.0;
  for (int d = 1; d <= dmax; ++d) {
    total += std::pow(static_cast<double>(d), -power);
    cdf[d - 1] = total;
  }
  std::vector<double> raw(static_cast<std::size_t>(p));
  for (auto& r : raw) {
    const double u = rng.uniform() * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    r = static_cast<double>(std::min<std::ptrdiff_t>(it - cdf.begin(), dmax - 1) + 1);
  }
  const double raw_sum = std::accumulate(raw.begin(), raw.end(), 0.0);
  const double target = 2.0 * edge_count;

  // Largest-remainder rounding keeps the total at exactly 2 * edge_count.
  std::vector<int> deg(static_cast<std::size_t>(p));
  std::vector<std::pair<double, int>> frac;
  long assigned = 0;
  for (int i = 0; i < p; ++i) {
    const double scaled = raw[i] * target / raw_sum;
    deg[i] = static_cast<int>(std::floor(scaled));
    assigned += deg[i];
    frac.emplace_back(scaled - deg[i], i);
  }
  std::stable_sort(frac.begin(), frac.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
  for (long r = 0; r < static_cast<long>(target) - assigned; ++r) ++deg[frac[static_cast<std::size_t>(r)].second];
  return deg;
}

bool match_stubs(const std::vector<int>& degrees, Graph& g, Rng& rng) {
  std::vector<int> stubs;
  for (std::size_t i = 0; i < degrees.size(); ++i)
    for (int s = 0; s < degrees[i]; ++s) stubs.push_back(static_cast<int>(i));
  int stalled = 0;
  while (!stubs.empty()) {
    shuffle(std::span<int>(stubs), rng);
    std::vector<int> rest;
    bool progress = false;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      const int a = stubs[i];
      const int b = stubs[i + 1];
      if (a != b && !g.has_edge(a, b)) {
        g.add_edge(a, b);
        progress = true;
      } else {
        rest.push_back(a);
        rest.push_back(b);
      }
    }
    stubs.swap(rest);
    stalled = progress ? 0 : stalled + 1;
    if (stalled > 20) return false;
  }
  return true;
}

}  // namespace

Graph gen_power_law_graph(int p, int edge_count, double power, std::uint64_t seed) {
  require(p >= 2, "power-law graph needs p >= 2");
  require(edge_count >= 0 && static_cast<long>(edge_count) <= static_cast<long>(p) * (p - 1) / 2,
          "edge_count must lie in [0, p(p-1)/2]");
  require(power > 1.0, "power must exceed 1");
  if (edge_count == 0) return Graph(p);
  Rng rng(seed);
  constexpr int kMaxRestarts = 100;
  for (int attempt = 0; attempt < kMaxRestarts; ++attempt) {
    const std::vector<int> degrees = sample_degrees(p, edge_count, power, rng);
    if (*std::max_element(degrees.begin(), degrees.end()) > p - 1) continue;
    Graph g(p);
    if (match_stubs(degrees, g, rng) && static_cast<int>(g.edge_count()) == edge_count) return g;
  }
  fail(ErrorCode::InfeasibleDegreeSequence,
       "no realizable degree sequence after " + std::to_string(kMaxRestarts) + " restarts");
}

KnockoutResult hub_knockout_detailed(const Graph& g, int hub_pool, int knockout, std::uint64_t seed) {
  const int p = g.p();
  require(knockout >= 0 && knockout <= hub_pool && hub_pool <= p, "need 0 <= knockout <= hub_pool <= p");
  if (knockout == 0) return {g, {}};

  std::vector<int> degree(static_cast<std::size_t>(p), 0);
  for (const auto& e : g.edges()) {
    ++degree[e.a];
    ++degree[e.b];
  }
  std::vector<int> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int l, int r) { return degree[l] > degree[r]; });
  std::vector<int> pool(order.begin(), order.begin() + hub_pool);

  Rng rng(seed);
  shuffle(std::span<int>(pool), rng);
  NodeSet knocked = make_node_set(std::vector<int>(pool.begin(), pool.begin() + knockout));

  Graph out(p);
  for (const auto& e : g.edges())
    if (!contains(knocked, e.a) && !contains(knocked, e.b)) out.add_edge(e.a, e.b);

  const std::size_t needed = g.edge_count() - out.edge_count();
  std::vector<Edge> free_pairs;
  for (int a = 0; a < p; ++a)
    for (int b = a + 1; b < p; ++b)
      if (!g.has_edge(a, b)) free_pairs.push_back({a, b});
  if (free_pairs.size() < needed)
    fail(ErrorCode::InfeasibleDegreeSequence, "graph too dense to replenish removed edges");
  for (std::size_t i = 0; i < needed; ++i) {
    const auto pick = i + static_cast<std::size_t>(rng.below(free_pairs.size() - i));
    std::swap(free_pairs[i], free_pairs[pick]);
    out.add_edge(free_pairs[i].a, free_pairs[i].b);
  }
  return {std::move(out), std::move(knocked)};
}

Graph hub_knockout(const Graph& g, int hub_pool, int knockout, std::uint64_t seed) {
  return hub_knockout_detailed(g, hub_pool, knockout, seed).graph;
}

namespace {

SymMatrix with_shifted_diagonal(Matrix m, double min_eig) {
  const int p = static_cast<int>(m.rows());
  for (int j = 0; j < p; ++j) {
    double row = 0.0;
    for (int k = 0; k < p; ++k)
      if (k != j) row += std::abs(m(j, k));
    m(j, j) = row;
  }
  // lambda_min(A + uI) = lambda_min(A) + u, so the shift is exact.
  const double base = extreme_eigenvalues(SymMatrix(m)).min;
  const double u = min_eig - base;
  m.diagonal().array() += u;
  return SymMatrix(std::move(m));
}

}  // namespace

std::pair<PrecisionModel, PrecisionModel> build_pair(const Graph& g1, const Graph& g2, double magnitude,
                                                     double min_eig, std::uint64_t seed) {
  require(g1.p() == g2.p(), "graphs must have the same node count");
  require(magnitude > 0.0, "magnitude must be positive");
  require(min_eig > 0.0, "min_eig must be positive");
  const int p = g1.p();
  Rng rng(seed);
  Matrix o1 = Matrix::Zero(p, p);
  Matrix o2 = Matrix::Zero(p, p);
  for (const auto& e : g1.edges()) {
    const double v = rng.coin() ? magnitude : -magnitude;
    o1(e.a, e.b) = o1(e.b, e.a) = v;
  }
  for (const auto& e : g2.edges()) {
    const double v = g1.has_edge(e.a, e.b) ? o1(e.a, e.b) : (rng.coin() ? magnitude : -magnitude);
    o2(e.a, e.b) = o2(e.b, e.a) = v;
  }
  return {PrecisionModel{g1, with_shifted_diagonal(std::move(o1), min_eig)},
          PrecisionModel{g2, with_shifted_diagonal(std::move(o2), min_eig)}};
}

Graph support_graph(const SymMatrix& omega, double zero_tol) {
  Graph g(omega.dim());
  for (int a = 0; a < omega.dim(); ++a)
    for (int b = a + 1; b < omega.dim(); ++b)
      if (std::abs(omega(a, b)) > zero_tol) g.add_edge(a, b);
  return g;
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream out;
  out << "p=" << g.p() << '\n';
  for (const auto& e : g.edges()) out << e.a << ',' << e.b << '\n';
  return out.str();
}

namespace {

int parse_int(std::string_view s, int line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    fail(ErrorCode::ParseError, "edge list line " + std::to_string(line) + ": bad integer '" + std::string(s) + "'");
  return v;
}

}  // namespace

Graph parse_edge_list(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  std::size_t idx = 0;
  while (idx < lines.size() && (lines[idx].empty() || lines[idx] == "\r")) ++idx;
  if (idx == lines.size() || lines[idx].substr(0, 2) != "p=")
    fail(ErrorCode::ParseError, "edge list must start with a 'p=<count>' header");
  Graph g(parse_int(lines[idx].substr(2), static_cast<int>(idx) + 1));
  for (std::size_t i = idx + 1; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos)
      fail(ErrorCode::ParseError, "edge list line " + std::to_string(i + 1) + ": expected 'j,k'");
    const int line_no = static_cast<int>(i) + 1;
    const int a = parse_int(line.substr(0, comma), line_no);
    const int b = parse_int(line.substr(comma + 1), line_no);
    if (a < 0 || b < 0 || a >= g.p() || b >= g.p() || a == b)
      fail(ErrorCode::ParseError, "edge list line " + std::to_string(line_no) + ": invalid edge");
    if (!g.add_edge(a, b)) fail(ErrorCode::ParseError, "edge list line " + std::to_string(line_no) + ": duplicate edge");
  }
  return g;
}

}  // namespace dca
