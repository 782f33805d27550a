#include "expd/relation_io.hpp"

#include <fstream>

#include "expd/errors.hpp"

namespace expd {

using nlohmann::json;

json universe_to_json(const Universe& u) {
  json j{{"name", u.name}, {"size", u.size}};
  if (u.labels) {
    json labels = json::array();
    for (const auto& l : *u.labels) {
      if (const auto* i = std::get_if<std::int64_t>(&l))
        labels.push_back(*i);
      else
        labels.push_back(std::get<std::string>(l));
    }
    j["labels"] = std::move(labels);
  }
  return j;
}

Universe universe_from_json(const json& j) {
  if (!j.is_object() || !j.contains("size") || !j["size"].is_number_unsigned())
    throw InputError("universe entry needs a nonnegative integer 'size'");
  Universe u(j.value("name", std::string{}), j["size"].get<std::size_t>());
  if (j.contains("labels")) {
    std::vector<Label> labels;
    for (const auto& l : j["labels"]) {
      if (l.is_number_integer())
        labels.emplace_back(l.get<std::int64_t>());
      else if (l.is_string())
        labels.emplace_back(l.get<std::string>());
      else
        throw InputError("universe '" + u.name + "': labels must be integers or strings");
    }
    u.labels = std::move(labels);
  }
  u.validate();
  return u;
}

json to_json(const FiniteRelation2& rel) {
  json pairs = json::array();
  for (auto [i, j] : rel.edges()) pairs.push_back({i, j});
  return json{{"kind", "rel2"},
              {"universes", {universe_to_json(rel.u()), universe_to_json(rel.v())}},
              {"pairs", std::move(pairs)}};
}

json to_json(const FiniteRelation3& rel) {
  json triples = json::array();
  for (const auto& t : rel.triples()) triples.push_back({t[0], t[1], t[2]});
  return json{{"kind", "rel3"},
              {"universes",
               {universe_to_json(rel.x()), universe_to_json(rel.y()), universe_to_json(rel.z())}},
              {"triples", std::move(triples)}};
}

namespace {

std::size_t index_at(const json& tuple, std::size_t k) {
  const auto& v = tuple.at(k);
  if (!v.is_number_unsigned()) throw InputError("relation indices must be nonnegative integers");
  return v.get<std::size_t>();
}

const json& universes_of(const json& j, std::size_t expected) {
  if (!j.contains("universes") || !j["universes"].is_array() || j["universes"].size() != expected)
    throw InputError("relation file needs exactly " + std::to_string(expected) + " universes");
  return j["universes"];
}

}  // namespace

FiniteRelation2 relation2_from_json(const json& j) {
  if (j.value("kind", "") != "rel2") throw InputError("expected kind \"rel2\"");
  const auto& us = universes_of(j, 2);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& p : j.value("pairs", json::array())) {
    if (!p.is_array() || p.size() != 2) throw InputError("each pair must be [i,j]");
    pairs.emplace_back(index_at(p, 0), index_at(p, 1));
  }
  return build_relation2(universe_from_json(us[0]), universe_from_json(us[1]), pairs);
}

FiniteRelation3 relation3_from_json(const json& j) {
  if (j.value("kind", "") != "rel3") throw InputError("expected kind \"rel3\"");
  const auto& us = universes_of(j, 3);
  std::vector<Triple> triples;
  for (const auto& t : j.value("triples", json::array())) {
    if (!t.is_array() || t.size() != 3) throw InputError("each triple must be [i,j,k]");
    triples.push_back({index_at(t, 0), index_at(t, 1), index_at(t, 2)});
  }
  return build_relation3(universe_from_json(us[0]), universe_from_json(us[1]),
                         universe_from_json(us[2]), std::move(triples));
}

AnyRelation relation_from_json(const json& j) {
  const std::string kind = j.is_object() ? j.value("kind", "") : "";
  if (kind == "rel2") return relation2_from_json(j);
  if (kind == "rel3") return relation3_from_json(j);
  throw InputError("relation file has unknown kind '" + kind + "'");
}

AnyRelation read_relation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open relation file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InputError("relation file '" + path + "': " + e.what());
  }
  return relation_from_json(j);
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump() << '\n';
  if (!out) throw InputError("write to '" + path + "' failed");
}

}  // namespace expd
