#include <json.hpp>

#include "apx/certify.hpp"
#include "apx/version.hpp"

namespace apx {

namespace {

using nlohmann::ordered_json;

ordered_json pair_of(const Rational& r) { return ordered_json::array({r.num().get_str(), r.den().get_str()}); }

Rational rational_of(const ordered_json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string())
    throw ParseError("expected a [numerator, denominator] pair of strings");
  try {
    const mpz_class num(j[0].get<std::string>(), 10);
    const mpz_class den(j[1].get<std::string>(), 10);
    if (den <= 0) throw ParseError("non-positive denominator");
    return Rational(num, den);
  } catch (const std::invalid_argument&) {
    throw ParseError("malformed integer in rational pair");
  }
}

ordered_json box_rows(const std::vector<Rational>& lo, const std::vector<Rational>& hi) {
  auto rows = ordered_json::array();
  for (std::size_t i = 0; i < lo.size(); ++i)
    rows.push_back({lo[i].num().get_str(), lo[i].den().get_str(), hi[i].num().get_str(), hi[i].den().get_str()});
  return rows;
}

void read_box_rows(const ordered_json& j, std::vector<Rational>& lo, std::vector<Rational>& hi) {
  if (!j.is_array()) throw ParseError("box must be an array of rows");
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != 4) throw ParseError("box row must be [lo_num, lo_den, hi_num, hi_den]");
    lo.push_back(rational_of(ordered_json::array({row[0], row[1]})));
    hi.push_back(rational_of(ordered_json::array({row[2], row[3]})));
  }
}

const char* form_name(FormKind f) {
  switch (f) {
    case FormKind::Outside: return "outside";
    case FormKind::Frame: return "frame";
    case FormKind::Centered: return "centered";
    case FormKind::Tangent: return "tangent";
  }
  return "?";
}

FormKind form_of(const std::string& s) {
  if (s == "outside") return FormKind::Outside;
  if (s == "frame") return FormKind::Frame;
  if (s == "centered") return FormKind::Centered;
  if (s == "tangent") return FormKind::Tangent;
  throw ParseError("unknown leaf form '" + s + "'");
}

}  // namespace

std::string certificate_to_json(const Certificate& c) {
  ordered_json j;
  j["format"] = "apx-certificate";
  j["format_version"] = kCertificateFormat;
  j["tool_version"] = kToolVersion;
  j["target"] = target_name(c.target);
  j["labels"] = c.labels;
  j["region"] = c.region;
  j["threshold"] = pair_of(c.threshold);
  j["tol"] = pair_of(c.tol);
  j["root"] = box_rows(c.root_lo, c.root_hi);
  j["leaf_count"] = c.leaves.size();
  j["max_bound"] = pair_of(c.max_bound);
  j["tree"] = c.tree;
  auto leaves = ordered_json::array();
  for (const auto& l : c.leaves) {
    ordered_json e;
    e["box"] = box_rows(l.lo, l.hi);
    e["form"] = form_name(l.form);
    if (l.form != FormKind::Outside) {
      e["piece"] = l.piece;
      if (l.form == FormKind::Frame) e["frame"] = l.frame;
      auto base = ordered_json::array();
      for (const auto& b : l.base) base.push_back(pair_of(b));
      e["base"] = std::move(base);
      e["bound"] = pair_of(l.bound);
    }
    leaves.push_back(std::move(e));
  }
  j["leaves"] = std::move(leaves);
  auto wit = ordered_json::array();
  for (const auto& w : c.witnesses) {
    auto pt = ordered_json::array();
    for (const auto& x : w.point) pt.push_back(pair_of(x));
    wit.push_back({{"point", std::move(pt)}, {"value", pair_of(w.value)}, {"source", w.source}});
  }
  j["witnesses"] = std::move(wit);
  j["stats"] = {{"nodes", c.stats.nodes},
                {"leaves", c.stats.leaves},
                {"outside", c.stats.outside},
                {"near_maximal", c.stats.near_maximal},
                {"max_depth", c.stats.max_depth},
                {"frame_leaves", c.stats.frame_leaves},
                {"centered_leaves", c.stats.centered_leaves},
                {"tangent_leaves", c.stats.tangent_leaves}};
  return j.dump() + "\n";
}

Certificate certificate_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("certificate is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "apx-certificate") throw ParseError("not a certificate document");
    if (j.at("format_version").get<int>() != kCertificateFormat)
      throw ParseError("unsupported certificate format version " + j.at("format_version").dump());
    Certificate c;
    const auto target = parse_cert_target(j.at("target").get<std::string>());
    if (!target) throw ParseError("unknown target " + j.at("target").dump());
    c.target = *target;
    c.labels = j.at("labels").get<std::vector<std::string>>();
    c.region = j.at("region").get<std::string>();
    c.threshold = rational_of(j.at("threshold"));
    c.tol = rational_of(j.at("tol"));
    read_box_rows(j.at("root"), c.root_lo, c.root_hi);
    c.max_bound = rational_of(j.at("max_bound"));
    c.tree = j.at("tree").get<std::string>();
    for (const auto& e : j.at("leaves")) {
      LeafRecord l;
      read_box_rows(e.at("box"), l.lo, l.hi);
      l.form = form_of(e.at("form").get<std::string>());
      if (l.form != FormKind::Outside) {
        l.piece = e.at("piece").get<int>();
        if (l.form == FormKind::Frame) l.frame = e.at("frame").get<int>();
        for (const auto& b : e.at("base")) l.base.push_back(rational_of(b));
        l.bound = rational_of(e.at("bound"));
      }
      c.leaves.push_back(std::move(l));
    }
    if (j.at("leaf_count").get<std::size_t>() != c.leaves.size()) throw ParseError("leaf_count does not match leaves");
    for (const auto& w : j.at("witnesses")) {
      Witness x;
      for (const auto& p : w.at("point")) x.point.push_back(rational_of(p));
      x.value = rational_of(w.at("value"));
      x.source = w.at("source").get<std::string>();
      c.witnesses.push_back(std::move(x));
    }
    const auto& st = j.at("stats");
    c.stats.nodes = st.at("nodes").get<std::uint64_t>();
    c.stats.leaves = st.at("leaves").get<std::uint64_t>();
    c.stats.outside = st.at("outside").get<std::uint64_t>();
    c.stats.near_maximal = st.at("near_maximal").get<std::uint64_t>();
    c.stats.max_depth = st.at("max_depth").get<unsigned>();
    c.stats.frame_leaves = st.at("frame_leaves").get<std::uint64_t>();
    c.stats.centered_leaves = st.at("centered_leaves").get<std::uint64_t>();
    c.stats.tangent_leaves = st.at("tangent_leaves").get<std::uint64_t>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed certificate: ") + e.what());
  }
}

}  // namespace apx
