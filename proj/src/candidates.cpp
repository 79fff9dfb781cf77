#include "candidates.hpp"

#include <fstream>
#include <sstream>

namespace bf::psi {

namespace {

std::vector<std::string> read_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open candidate file: " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  return tokens;
}

double to_real(const std::string& tok, const char* what) {
  try {
    size_t used = 0;
    double x = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return x;
  } catch (const std::exception&) {
    throw io_error(std::string("bad ") + what + " in candidate file: '" + tok + "'");
  }
}

int to_count(const std::string& tok, const char* what) {
  double x = to_real(tok, what);
  int n = static_cast<int>(x);
  if (n != x || n < 2 || n > 100000)
    throw io_error(std::string("bad ") + what + " in candidate file: '" + tok + "'");
  return n;
}

} // namespace

/*
 * Grid candidate file, token-oriented with '#' comments:
 *   family entropy|hellinger
 *   a <lo> <hi> <count>
 *   b <lo> <hi> <count>
 *   <count_a * count_b values, row-major in a>
 */
Candidate load_grid(const std::string& path) {
  auto tokens = read_tokens(path);
  size_t i = 0;
  auto need = [&](const char* what) -> const std::string& {
    if (i >= tokens.size())
      throw io_error(std::string("candidate file ended while reading ") + what);
    return tokens[i++];
  };

  Candidate c;
  c.kind = Kind::grid;
  c.name = path;
  if (need("family keyword") != "family")
    throw io_error("candidate file must start with 'family'");
  const std::string fam = need("family name");
  if (fam == "entropy") {
    c.family = Family::entropy;
  } else if (fam == "hellinger") {
    c.family = Family::hellinger;
  } else {
    throw io_error("unknown candidate family '" + fam + "'");
  }

  if (need("a keyword") != "a") throw io_error("expected 'a <lo> <hi> <count>'");
  c.a_lo = to_real(need("a lo"), "a lo");
  c.a_hi = to_real(need("a hi"), "a hi");
  c.na = to_count(need("a count"), "a count");
  if (need("b keyword") != "b") throw io_error("expected 'b <lo> <hi> <count>'");
  c.b_lo = to_real(need("b lo"), "b lo");
  c.b_hi = to_real(need("b hi"), "b hi");
  c.nb = to_count(need("b count"), "b count");

  if (!(c.a_lo < c.a_hi) || !(c.b_lo < c.b_hi))
    throw io_error("candidate grid ranges must be increasing");
  const double a_min = c.family == Family::entropy ? 0.0 : -1.0;
  const double a_max = c.family == Family::entropy ? 1.0 : 1.0;
  if (c.a_lo < a_min || c.a_hi > a_max)
    throw io_error("candidate a-range exceeds the family domain");

  const size_t want = size_t(c.na) * size_t(c.nb);
  c.values.reserve(want);
  while (i < tokens.size()) c.values.push_back(to_real(tokens[i++], "grid value"));
  if (c.values.size() != want)
    throw io_error("candidate grid has " + std::to_string(c.values.size()) +
                   " values, expected " + std::to_string(want));
  for (double v : c.values)
    if (!(v >= 0.0))
      throw io_error("candidate grid values must be nonnegative and finite");
  return c;
}

Candidate open_candidate(const std::string& name) {
  Candidate c;
  c.name = name;
  if (name == "phi") {
    c.family = Family::entropy;
    c.kind = Kind::phi;
  } else if (name == "eta-guess") {
    c.family = Family::entropy;
    c.kind = Kind::eta_guess;
  } else if (name == "zero") {
    c.family = Family::entropy;
    c.kind = Kind::zero;
  } else if (name == "hellinger-natural") {
    c.family = Family::hellinger;
    c.kind = Kind::hell_natural;
  } else if (name == "hellinger-zero") {
    c.family = Family::hellinger;
    c.kind = Kind::hell_zero;
  } else {
    return load_grid(name);
  }
  return c;
}

} // namespace bf::psi
