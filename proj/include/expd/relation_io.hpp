#pragma once

#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "expd/relation.hpp"

namespace expd {

// Relation file format, one object per file:
//   {"kind":"rel2"|"rel3",
//    "universes":[{"name":...,"size":...,"labels":[...]?}, ...],
//    "pairs":[[i,j],...] | "triples":[[i,j,k],...]}
// Indices, not labels, are stored; readers reject out-of-range indices.

nlohmann::json universe_to_json(const Universe& u);
Universe universe_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FiniteRelation2& rel);
nlohmann::json to_json(const FiniteRelation3& rel);

using AnyRelation = std::variant<FiniteRelation2, FiniteRelation3>;

AnyRelation relation_from_json(const nlohmann::json& j);
FiniteRelation2 relation2_from_json(const nlohmann::json& j);
FiniteRelation3 relation3_from_json(const nlohmann::json& j);

AnyRelation read_relation_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace expd
