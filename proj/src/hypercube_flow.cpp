#include "hypercube_flow.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace bf::flow {

namespace {

constexpr int kMaxN = 24;

void check_n(int n) {
  if (n < 1 || n > kMaxN)
    throw domain_error("predicate dimension must be in [1, " + std::to_string(kMaxN) +
                       "], got " + std::to_string(n));
}

double soften_sign(int sign, double eps) {
  // sign +1 -> P(F=-1) = eps, sign -1 -> 1 - eps.
  return sign > 0 ? eps : 1.0 - eps;
}

void check_eps(double eps) {
  if (!(eps >= 0.0) || eps > 0.5)
    throw domain_error("epsilon must lie in [0, 0.5], got " + std::to_string(eps));
}

} // namespace

void validate(const Predicate& p) {
  check_n(p.n);
  if (p.v.size() != (size_t{1} << p.n))
    throw domain_error("predicate table has " + std::to_string(p.v.size()) +
                       " entries, expected 2^" + std::to_string(p.n));
  for (double x : p.v)
    if (!(x >= 0.0 && x <= 1.0))
      throw domain_error("predicate probabilities must lie in [0, 1]");
}

Predicate from_mask(int n, uint64_t mask, double eps) {
  check_n(n);
  check_eps(eps);
  if (n > 6)
    throw domain_error("mask construction supports n <= 6");
  Predicate p;
  p.n = n;
  p.v.resize(size_t{1} << n);
  for (size_t y = 0; y < p.v.size(); ++y)
    p.v[y] = soften_sign((mask >> y) & 1 ? -1 : +1, eps);
  return p;
}

Predicate make_named(const std::string& name, int n, double eps) {
  check_n(n);
  check_eps(eps);
  Predicate p;
  p.n = n;
  p.v.resize(size_t{1} << n);
  if (name == "dictator") {
    // f(x) = x_1: vertex bit 0 set means x_1 = -1.
    for (size_t y = 0; y < p.v.size(); ++y)
      p.v[y] = soften_sign((y & 1) ? -1 : +1, eps);
  } else if (name == "majority") {
    if (n % 2 == 0)
      throw domain_error("majority requires odd n");
    for (size_t y = 0; y < p.v.size(); ++y) {
      int minus = std::popcount(y);
      p.v[y] = soften_sign(2 * minus > n ? -1 : +1, eps);
    }
  } else if (name == "parity") {
    for (size_t y = 0; y < p.v.size(); ++y)
      p.v[y] = soften_sign(std::popcount(y) % 2 ? -1 : +1, eps);
  } else if (name == "constant") {
    for (size_t y = 0; y < p.v.size(); ++y)
      p.v[y] = soften_sign(-1, eps);
  } else {
    throw domain_error("unknown predicate '" + name +
                       "' (built-ins: dictator, majority, parity, constant)");
  }
  return p;
}

Predicate soften(const Predicate& p, double eps) {
  check_eps(eps);
  Predicate out = p;
  for (double& x : out.v) x = kernels::binary_conv(x, eps);
  return out;
}

// Format: first non-comment line is n, then 2^n lines, vertex order.
// A line of "+1", "1" or "-1" is a hard sign (softened by eps); any other
// numeric token is taken verbatim as P(F=-1) in [0,1]. '#' starts a comment.
Predicate read_file(const std::string& path, double eps) {
  check_eps(eps);
  std::ifstream in(path);
  if (!in) throw io_error("cannot open predicate file: " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  if (tokens.empty()) throw io_error("empty predicate file: " + path);
  int n = 0;
  try {
    size_t used = 0;
    n = std::stoi(tokens[0], &used);
    if (used != tokens[0].size()) throw std::invalid_argument(tokens[0]);
  } catch (const std::exception&) {
    throw io_error("predicate file must start with the dimension n");
  }
  check_n(n);
  const size_t want = size_t{1} << n;
  if (tokens.size() != want + 1)
    throw io_error("predicate file has " + std::to_string(tokens.size() - 1) +
                   " values, expected " + std::to_string(want));
  Predicate p;
  p.n = n;
  p.v.resize(want);
  for (size_t i = 0; i < want; ++i) {
    const std::string& tok = tokens[i + 1];
    if (tok == "+1" || tok == "1") {
      p.v[i] = soften_sign(+1, eps);
      continue;
    }
    if (tok == "-1") {
      p.v[i] = soften_sign(-1, eps);
      continue;
    }
    double x = 0;
    try {
      size_t used = 0;
      x = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw io_error("bad predicate value '" + tok + "'");
    }
    if (!(x >= 0.0 && x <= 1.0))
      throw io_error("predicate probability out of [0,1]: " + tok);
    p.v[i] = x;
  }
  return p;
}

std::string to_file_text(const Predicate& p) {
  std::ostringstream out;
  out << p.n << "\n";
  char buf[40];
  for (double x : p.v) {
    if (x == 0.0) {
      out << "+1\n";
    } else if (x == 1.0) {
      out << "-1\n";
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out << buf << "\n";
    }
  }
  return out.str();
}

std::vector<double> log_t_grid(int points, double t_min, double t_max) {
  if (points < 1) throw domain_error("t grid needs at least one point");
  if (!(t_min > 0.0) || !(t_max >= t_min))
    throw domain_error("t grid requires 0 < t_min <= t_max");
  std::vector<double> ts(points);
  if (points == 1) {
    ts[0] = t_min;
    return ts;
  }
  double la = std::log(t_min), lb = std::log(t_max);
  for (int i = 0; i < points; ++i)
    ts[i] = std::exp(la + (lb - la) * i / (points - 1));
  ts.front() = t_min;
  ts.back() = t_max;
  return ts;
}

} // namespace bf::flow
