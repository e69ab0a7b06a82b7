#include "wardrop/tntp.hpp"

#include <cmath>
#include <sstream>

#include "wardrop/rng.hpp"

namespace wardrop {

namespace {

struct Link {
  int init = 0, term = 0;
  double capacity = 0.0, fftime = 0.0;
};

}  // namespace

TntpResult parse_tntp(const std::string& text, const TntpOptions& opt) {
  if (opt.tau < 0.0 || opt.tau > 1.0) throw BadParameter("tau must lie in [0,1]");
  if (opt.gamma < 0.0) throw BadParameter("gamma must be non-negative");

  std::vector<Link> links;
  int max_node = 0;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto cut = line.find('~'); cut != std::string::npos) line = line.substr(0, cut);
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '<') continue;  // metadata
    std::string body = line;
    if (auto semi = body.find(';'); semi != std::string::npos) body = body.substr(0, semi);

    std::istringstream ls(body);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() < 5) {
      std::ostringstream os;
      os << "line " << line_no << ": missing capacity or free_flow_time column";
      throw MissingField(os.str());
    }
    Link link;
    try {
      link.init = std::stoi(tok[0]);
      link.term = std::stoi(tok[1]);
      link.capacity = std::stod(tok[2]);
      link.fftime = std::stod(tok[4]);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": non-numeric link field",
                       line_no);
    }
    if (link.init < 1 || link.term < 1)
      throw ParseError("line " + std::to_string(line_no) + ": node ids must be positive",
                       line_no);
    if (link.capacity <= 0.0)
      throw ParseError("line " + std::to_string(line_no) + ": non-positive capacity",
                       line_no);
    if (link.fftime < 0.0)
      throw ParseError("line " + std::to_string(line_no) + ": negative free-flow time",
                       line_no);
    max_node = std::max({max_node, link.init, link.term});
    links.push_back(link);
  }
  if (links.empty()) throw ParseError("no link records found", -1);

  const int m = static_cast<int>(links.size());
  const int k = static_cast<int>(std::lround(opt.tau * m));
  Rng rng(opt.seed);
  std::vector<int> perm(m);
  for (int e = 0; e < m; ++e) perm[e] = e;
  rng.shuffle(perm);
  std::vector<bool> randomized(m, false);
  for (int i = 0; i < k; ++i) randomized[perm[i]] = true;

  std::vector<std::string> vertices(max_node);
  for (int v = 0; v < max_node; ++v) vertices[v] = std::to_string(v + 1);

  std::vector<Edge> edges(m);
  for (int e = 0; e < m; ++e) {
    const Link& link = links[e];
    Edge& ed = edges[e];
    ed.id = "e" + std::to_string(e + 1);
    ed.tail = link.init - 1;
    ed.head = link.term - 1;
    double a = opt.gamma * link.fftime / link.capacity;
    ed.slope = {a, a};
    double b1 = link.fftime, b2 = link.fftime;
    if (randomized[e]) {
      double draw = rng.uniform(opt.offset_lo, opt.offset_hi);
      if (opt.mixed && rng.next_u64() % 2 == 1)
        b1 = draw;  // symmetric variant: t_e kept in state theta2 instead
      else
        b2 = draw;
    }
    ed.offset = {b1, b2};
  }

  TntpResult out;
  out.randomized_edges = k;
  out.instance = make_instance(std::move(vertices), std::move(edges), {},
                               StateSpace{{"theta1", "theta2"}, {0.5, 0.5}});
  return out;
}

}  // namespace wardrop
