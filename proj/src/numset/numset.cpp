#include "apx/numset.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

namespace apx {

NumSet::NumSet(std::vector<Rational> elements) : elems_(std::move(elements)) {
  std::sort(elems_.begin(), elems_.end());
  elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
}

NumSet NumSet::from_integers(std::span<const long> values) {
  std::vector<Rational> v;
  v.reserve(values.size());
  for (long x : values) v.emplace_back(x);
  return NumSet(std::move(v));
}

NumSet NumSet::from_integers(std::initializer_list<long> values) {
  return from_integers(std::span<const long>(values.begin(), values.size()));
}

const Rational& NumSet::min() const {
  if (elems_.empty()) throw DomainError("min of empty set");
  return elems_.front();
}

const Rational& NumSet::max() const {
  if (elems_.empty()) throw DomainError("max of empty set");
  return elems_.back();
}

bool NumSet::contains(const Rational& x) const {
  return std::binary_search(elems_.begin(), elems_.end(), x);
}

bool NumSet::all_integers() const {
  return std::all_of(elems_.begin(), elems_.end(), [](const Rational& r) { return r.is_integer(); });
}

NumSet set_union(const NumSet& a, const NumSet& b) {
  std::vector<Rational> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return NumSet(std::move(out));
}

NumSet set_intersection(const NumSet& a, const NumSet& b) {
  std::vector<Rational> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return NumSet(std::move(out));
}

AffineMap::AffineMap(Rational scale, Rational shift) : scale_(std::move(scale)), shift_(std::move(shift)) {
  if (scale_.is_zero()) throw DomainError("affine map with zero scale");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

Rational parse_token_at(std::string_view token, std::size_t line) {
  try {
    return Rational::parse(token);
  } catch (const ParseError& e) {
    throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
  }
}

}  // namespace

NumSet parse_set(std::string_view text) {
  std::vector<Rational> values;
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  for (;;) {
    ++line_no;
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) lines.emplace_back(line_no, line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }

  if (lines.size() == 1 && lines.front().second.front() == '[') {
    auto [ln, body] = lines.front();
    if (body.back() != ']') throw ParseError("line " + std::to_string(ln) + ": unterminated list", ln);
    body = trim(body.substr(1, body.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      const auto tok = trim(body.substr(0, comma));
      if (tok.empty()) throw ParseError("line " + std::to_string(ln) + ": empty list entry", ln);
      values.push_back(parse_token_at(tok, ln));
      if (comma == std::string_view::npos) break;
      body = body.substr(comma + 1);
      if (trim(body).empty()) throw ParseError("line " + std::to_string(ln) + ": trailing comma", ln);
    }
    return NumSet(std::move(values));
  }

  for (const auto& [ln, tok] : lines) values.push_back(parse_token_at(tok, ln));
  return NumSet(std::move(values));
}

NumSet read_set_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open set file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_set(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

std::string format_set(const NumSet& s) {
  std::string out;
  for (const auto& x : s) {
    out += x.str();
    out += '\n';
  }
  return out;
}

NumSet affine_image(const NumSet& s, const AffineMap& m) {
  std::vector<Rational> v;
  v.reserve(s.size());
  for (const auto& x : s) v.push_back(m(x));
  return NumSet(std::move(v));
}

NumSet negate(const NumSet& s) { return affine_image(s, AffineMap(-1, 0)); }

bool is_antisymmetric(const NumSet& s) {
  for (const auto& x : s)
    if (s.contains(-x)) return false;
  return true;
}

Rational midpoint(const NumSet& s) { return (s.min() + s.max()) / 2; }

IntegerImage to_integer_sets(std::span<const NumSet> sets) {
  mpz_class lcm = 1;
  for (const auto& s : sets)
    for (const auto& x : s) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.raw().get_den_mpz_t());
  IntegerImage out{{}, Rational(lcm)};
  const AffineMap dilate(out.scale, 0);
  for (const auto& s : sets) out.sets.push_back(affine_image(s, dilate));
  return out;
}

}  // namespace apx
