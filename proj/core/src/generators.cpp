#include "wardrop/generators.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "wardrop/tntp.hpp"

namespace wardrop {

GeneratorSpec GeneratorSpec::parse(const std::string& text) {
  GeneratorSpec spec;
  auto colon = text.find(':');
  spec.family = text.substr(0, colon);
  if (colon == std::string::npos) return spec;
  std::istringstream in(text.substr(colon + 1));
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw BadParameter("generator parameter without '=': " + item);
    spec.params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return spec;
}

double GeneratorSpec::number(const std::string& key, double fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw BadParameter("generator parameter " + key + " is not a number: " + it->second);
  }
}

std::string GeneratorSpec::text(const std::string& key, const std::string& fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

namespace {

StateSpace two_states() { return {{"theta1", "theta2"}, {0.5, 0.5}}; }

Edge edge(std::string id, int tail, int head, std::vector<double> slope,
          std::vector<double> offset) {
  Edge e;
  e.id = std::move(id);
  e.tail = tail;
  e.head = head;
  e.slope = std::move(slope);
  e.offset = std::move(offset);
  return e;
}

void check_eps(double eps) {
  if (!(eps > 0.0) || eps > 1e-3)
    throw BadParameter("eps must lie in (0, 1e-3]");
}

}  // namespace

Instance make_example1() {
  std::vector<Edge> edges = {
      edge("e1", 0, 1, {2, 2}, {5, 0}),
      edge("e2", 0, 1, {2, 2}, {0, 4}),
      edge("e3", 0, 1, {0, 0}, {3, 3}),
  };
  return make_instance({"s", "t"}, std::move(edges), {Commodity{0, 1, 1.0, std::nullopt}},
                       two_states());
}

Instance make_example2() {
  std::vector<Edge> edges = {
      edge("e1", 0, 1, {1, 1}, {0, 1}),
      edge("e2", 0, 1, {0, 0}, {1, 0.5}),
  };
  Commodity pop1{0, 1, 0.5, std::vector<int>{0}};
  Commodity pop2{0, 1, 0.5, std::nullopt};
  return make_instance({"s", "t"}, std::move(edges), {pop1, pop2}, two_states());
}

Instance make_example3() {
  std::vector<Edge> edges = {
      edge("e1", 0, 1, {0, 1}, {1, 0}),
      edge("e2", 0, 1, {1, 0}, {0, 2}),
  };
  return make_instance({"s", "t"}, std::move(edges), {Commodity{0, 1, 1.0, std::nullopt}},
                       two_states());
}

Instance make_braess() {
  // s=0, v1=1, v2=2, t=3; only e5's offset depends on the state
  std::vector<Edge> edges = {
      edge("e1", 0, 1, {1, 1}, {0, 0}),
      edge("e2", 1, 3, {0, 0}, {1, 1}),
      edge("e3", 0, 2, {0, 0}, {1, 1}),
      edge("e4", 2, 3, {1, 1}, {0, 0}),
      edge("e5", 1, 2, {0, 0}, {0, 1}),
  };
  return make_instance({"s", "v1", "v2", "t"}, std::move(edges),
                       {Commodity{0, 3, 1.0, std::nullopt}}, two_states());
}

Instance make_nested_braess(int j, double eps, double demand) {
  if (j < 1) throw BadParameter("nested_braess needs j >= 1");
  check_eps(eps);
  if (!(demand >= 0.0)) throw BadParameter("demand must be non-negative");

  const int top = 2 * j + 1;  // t = v_{2j+1}
  std::vector<std::string> vertices(top + 1);
  for (int v = 0; v <= top; ++v) vertices[v] = "v" + std::to_string(v);

  std::vector<Edge> edges;
  int next_id = 1;
  auto id = [&next_id]() { return "e" + std::to_string(next_id++); };
  for (int i = 0; i <= 2 * j; ++i) {
    if (i == j)
      edges.push_back(edge(id(), i, i + 1, {eps, eps}, {0, 0}));  // center edge
    else
      edges.push_back(edge(id(), i, i + 1, {1, 1}, {0, 0}));
  }
  for (int i = 0; i <= j - 1; ++i) {
    double b = std::pow(10.0, j - 1 - i);
    edges.push_back(edge(id(), i, 2 * j - i, {0, 0}, {b, b}));
  }
  for (int i = 0; i <= j - 1; ++i) {
    double b = std::pow(10.0, j - 1 - i);
    edges.push_back(edge(id(), i + 1, 2 * j + 1 - i, {0, 0}, {b, b}));
  }
  return make_instance(std::move(vertices), std::move(edges),
                       {Commodity{0, top, demand, std::nullopt}}, two_states());
}

Instance make_exp_supports(int j, double eps) {
  if (j < 1) throw BadParameter("exp_supports needs j >= 1");
  check_eps(eps);
  const double scale = std::pow(10.0, 1 - j) / 3.0;
  // eps is the effective center slope of the rescaled graph; it has to stay
  // well below the smallest cross offset (scale * 1) yet large enough that
  // adjacent supports remain separable in double precision
  Instance base = make_nested_braess(j, eps, 1.0);
  std::vector<Edge> edges = base.edges;
  for (Edge& ed : edges)
    if (ed.offset[0] > 0.0) {  // exactly the cross edges carry offsets
      ed.offset[0] *= scale;
      ed.offset[1] *= scale;
    }
  edges.push_back(edge("estar", 0, 2 * j + 1, {0, 0}, {0, 1}));
  return make_instance(base.vertices, std::move(edges), base.commodities,
                       base.state_space);
}

double nested_braess_cost(int j, double demand, double eps) {
  if (j != 1) throw UnsupportedJ("closed forms are available for j = 1 only");
  check_eps(eps);
  if (demand < 0.0) throw BadParameter("demand must be non-negative");
  if (demand == 0.0) return 0.0;
  if (demand <= 1.0 / (1.0 + eps)) return demand * (2.0 + eps);
  if (demand < 2.0) return (2.0 + eps * (demand + 2.0)) / (1.0 + 2.0 * eps);
  return 1.0 + demand / 2.0;
}

Instance build(const GeneratorSpec& spec) {
  const std::string& f = spec.family;
  if (f == "example1") return make_example1();
  if (f == "example2") return make_example2();
  if (f == "example3") return make_example3();
  if (f == "braess") return make_braess();
  if (f == "nested_braess") {
    int j = static_cast<int>(spec.number("j", 1));
    return make_nested_braess(j, spec.number("eps", 1e-6), spec.number("d", 1.0));
  }
  if (f == "exp_supports") {
    int j = static_cast<int>(spec.number("j", 1));
    return make_exp_supports(j, spec.number("eps", 1e-6));
  }
  if (f == "sioux" || f == "sioux_mixed") {
    std::string path = spec.text("file", "");
    if (path.empty())
      throw BadParameter("sioux generator needs file=<path to TNTP net file>");
    std::ifstream in(path);
    if (!in) throw BadParameter("cannot open TNTP file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    TntpOptions opt;
    opt.tau = spec.number("tau", 0.0);
    opt.gamma = spec.number("gamma", 0.15);
    opt.seed = static_cast<std::uint64_t>(spec.number("seed", 42));
    opt.mixed = f == "sioux_mixed";
    if (opt.mixed) opt.offset_lo = 0.0;
    opt.offset_lo = spec.number("lo", opt.offset_lo);
    opt.offset_hi = spec.number("hi", opt.offset_hi);
    Instance inst = parse_tntp(buffer.str(), opt).instance;
    int source = inst.vertex_index(spec.text("source", "1"));
    int target = inst.vertex_index(spec.text("target", "19"));
    if (source < 0 || target < 0) throw BadParameter("unknown source or target vertex");
    inst.commodities.push_back(Commodity{source, target, spec.number("d", 1e5), std::nullopt});
    return inst;
  }
  throw BadParameter("unknown generator family: " + f);
}

}  // namespace wardrop
