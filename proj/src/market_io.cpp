#include "mmfloor/market_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace mmfloor {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw MarketFormatError(where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known) fail(where, "unknown field '" + key + "'");
  }
}

const json& need(const json& obj, const std::string& where, const char* key) {
  if (!obj.is_object()) fail(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

Rat rat_field(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a \"p/q\" string");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

std::vector<Rat> rat_vector(const json& v, const std::string& where, std::size_t expected) {
  if (!v.is_array()) fail(where, "expected an array");
  if (v.size() != expected)
    fail(where, "expected " + std::to_string(expected) + " entries, got " +
                    std::to_string(v.size()));
  std::vector<Rat> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(rat_field(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

NFunction parse_phi(const json& v, const std::string& where) {
  check_keys(v, where, {"knots", "tail_slope", "tail_quad"});
  const json& knots_json = need(v, where, "knots");
  if (!knots_json.is_array()) fail(where + ".knots", "expected an array");
  std::vector<std::pair<Rat, Rat>> knots;
  for (std::size_t i = 0; i < knots_json.size(); ++i) {
    const std::string kw = where + ".knots[" + std::to_string(i) + "]";
    if (!knots_json[i].is_array() || knots_json[i].size() != 2)
      fail(kw, "expected a [t, value] pair");
    knots.emplace_back(rat_field(knots_json[i][0], kw), rat_field(knots_json[i][1], kw));
  }
  try {
    return NFunction(std::move(knots), rat_field(need(v, where, "tail_slope"), where),
                     rat_field(need(v, where, "tail_quad"), where));
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

TruncationSpec parse_truncation(const json& v, const std::string& where) {
  const json& kind = need(v, where, "kind");
  if (!kind.is_string()) fail(where + ".kind", "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "unit_ball") {
    check_keys(v, where, {"kind"});
    return TruncationSpec::unit_ball();
  }
  if (k == "eps_sequence") {
    check_keys(v, where, {"kind", "eps"});
    const json& eps = need(v, where, "eps");
    if (!eps.is_array() || eps.empty()) fail(where + ".eps", "expected a nonempty array");
    std::vector<Rat> values;
    for (std::size_t i = 0; i < eps.size(); ++i)
      values.push_back(rat_field(eps[i], where + ".eps[" + std::to_string(i) + "]"));
    try {
      return TruncationSpec::eps_sequence(EpsSequence(std::move(values)));
    } catch (const std::invalid_argument& e) {
      fail(where + ".eps", e.what());
    }
  }
  if (k == "orlicz") {
    check_keys(v, where, {"kind", "phi"});
    return TruncationSpec::orlicz(parse_phi(need(v, where, "phi"), where + ".phi"));
  }
  fail(where + ".kind", "expected unit_ball, eps_sequence or orlicz");
}

json phi_to_json(const NFunction& phi) {
  json knots = json::array();
  for (const auto& [t, y] : phi.knots()) knots.push_back({to_fraction(t), to_fraction(y)});
  return {{"knots", std::move(knots)},
          {"tail_slope", to_fraction(phi.tail_slope())},
          {"tail_quad", to_fraction(phi.tail_quad())}};
}

}  // namespace

Market parse_market(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MarketFormatError(e.what());  // carries byte position
  }
  const std::string where = "market";
  if (!doc.is_object()) fail(where, "expected a JSON object");
  check_keys(doc, where, {"atoms", "generators", "mode", "f", "truncation", "witnesses"});

  const json& atoms = need(doc, where, "atoms");
  if (!atoms.is_array() || atoms.empty()) fail("market.atoms", "expected a nonempty array");
  std::vector<std::string> labels;
  std::vector<Rat> probs;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string aw = "market.atoms[" + std::to_string(i) + "]";
    check_keys(atoms[i], aw, {"label", "prob"});
    const json& label = need(atoms[i], aw, "label");
    if (!label.is_string()) fail(aw + ".label", "expected a string");
    labels.push_back(label.get<std::string>());
    probs.push_back(rat_field(need(atoms[i], aw, "prob"), aw + ".prob"));
  }
  SpacePtr space;
  try {
    space = make_space(std::move(labels), std::move(probs));
  } catch (const std::invalid_argument& e) {
    fail("market.atoms", e.what());
  }
  const std::size_t n = space->size();

  const json& mode_json = need(doc, where, "mode");
  if (!mode_json.is_string()) fail("market.mode", "expected a string");
  const std::string mode_str = mode_json.get<std::string>();
  ConeMode mode;
  if (mode_str == "cone")
    mode = ConeMode::Cone;
  else if (mode_str == "subspace")
    mode = ConeMode::Subspace;
  else if (mode_str == "cone_minus_positives")
    mode = ConeMode::ConeMinusPositives;
  else
    fail("market.mode", "expected cone, subspace or cone_minus_positives");

  const json& gens_json = need(doc, where, "generators");
  if (!gens_json.is_array()) fail("market.generators", "expected an array");
  std::vector<RandomVariable> gens;
  for (std::size_t j = 0; j < gens_json.size(); ++j)
    gens.emplace_back(space, rat_vector(gens_json[j], "market.generators[" + std::to_string(j) + "]", n));

  RandomVariable f(space, rat_vector(need(doc, where, "f"), "market.f", n));

  std::optional<TruncationSpec> trunc;
  if (doc.contains("truncation"))
    trunc = parse_truncation(doc["truncation"], "market.truncation");

  std::vector<RandomVariable> witnesses;
  if (doc.contains("witnesses")) {
    const json& w = doc["witnesses"];
    if (!w.is_array()) fail("market.witnesses", "expected an array");
    for (std::size_t i = 0; i < w.size(); ++i)
      witnesses.emplace_back(space, rat_vector(w[i], "market.witnesses[" + std::to_string(i) + "]", n));
  }

  return Market{space, MarketCone(space, std::move(gens), mode), std::move(f), std::move(trunc),
                std::move(witnesses)};
}

Market load_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MarketFormatError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_market(buf.str());
}

std::string serialize_market(const Market& market) {
  json atoms = json::array();
  for (std::size_t i = 0; i < market.space->size(); ++i)
    atoms.push_back({{"label", market.space->label(i)},
                     {"prob", to_fraction(market.space->prob(i))}});
  json gens = json::array();
  for (const RandomVariable& g : market.cone.generators())
    gens.push_back(to_fraction_vector(g.values()));
  const char* mode = nullptr;
  switch (market.cone.mode()) {
    case ConeMode::Cone: mode = "cone"; break;
    case ConeMode::Subspace: mode = "subspace"; break;
    case ConeMode::ConeMinusPositives: mode = "cone_minus_positives"; break;
  }
  json doc = {{"atoms", std::move(atoms)},
              {"generators", std::move(gens)},
              {"mode", mode},
              {"f", to_fraction_vector(market.f.values())}};
  if (market.truncation) {
    switch (market.truncation->kind()) {
      case TruncationSpec::Kind::UnitBall:
        doc["truncation"] = {{"kind", "unit_ball"}};
        break;
      case TruncationSpec::Kind::EpsSequence:
        doc["truncation"] = {{"kind", "eps_sequence"},
                             {"eps", to_fraction_vector(market.truncation->eps().values())}};
        break;
      case TruncationSpec::Kind::Orlicz:
        doc["truncation"] = {{"kind", "orlicz"}, {"phi", phi_to_json(market.truncation->phi())}};
        break;
    }
  }
  if (!market.witnesses.empty()) {
    json w = json::array();
    for (const RandomVariable& x : market.witnesses) w.push_back(to_fraction_vector(x.values()));
    doc["witnesses"] = std::move(w);
  }
  return doc.dump(2) + "\n";
}

void save_market(const Market& market, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MarketFormatError("cannot write '" + path + "'");
  out << serialize_market(market);
}

}  // namespace mmfloor
