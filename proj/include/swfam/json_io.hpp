#pragma once

#include "swfam/torelli.hpp"

#include <json.hpp>

#include <string>

namespace swfam {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "sw-family-calc/1";

inline Json json_of(const IMat& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows; ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json json_of_lattice(const IntersectionLattice& lat) {
  Json j;
  j["rank"] = lat.rank();
  Json gram = Json::array();  // row-major
  for (i64 v : lat.gram().a) gram.push_back(v);
  j["gram"] = std::move(gram);
  j["labels"] = lat.basis_labels();
  j["b_plus"] = lat.b_plus();
  j["b_minus"] = lat.b_minus();
  return j;
}

inline Json json_of(const ManifoldInvariants& inv) {
  Json j;
  j["b_plus"] = inv.b_plus;
  j["b_minus"] = inv.b_minus;
  j["sigma"] = inv.sigma;
  j["euler"] = inv.euler;
  j["is_spin"] = inv.is_spin;
  j["is_psc"] = inv.is_psc;
  return j;
}

inline Json json_of(const TraceNode& t) {
  Json j;
  j["rule"] = t.rule;
  j["note"] = t.note;
  j["kind"] = to_string(t.kind);
  if (t.kind != CVKind::unknown) j["value"] = t.value;
  if (t.rule == "R4") j["sign"] = t.sign;
  if (t.degraded_mod2) j["mod2_by_orientation"] = true;
  if (!t.children.empty()) {
    Json kids = Json::array();
    for (const TraceNode& c : t.children) kids.push_back(json_of(c));
    j["children"] = std::move(kids);
  }
  return j;
}

inline Json json_of(const CertifiedValue& cv, bool with_trace = true) {
  Json j;
  j["kind"] = to_string(cv.kind);
  if (cv.kind == CVKind::unknown)
    j["value"] = "unknown";
  else
    j["value"] = cv.value;
  if (with_trace) j["trace"] = json_of(cv.trace);
  return j;
}

inline Json json_of(const SupportMatrix& m) {
  Json j;
  j["D"] = m.D;
  j["indices"] = m.indices;
  Json entries = Json::array();
  for (std::size_t r = 0; r < m.entries.size(); ++r)
    for (std::size_t c = 0; c < m.entries[r].size(); ++c) {
      const CertifiedValue& e = m.entries[r][c];
      Json cell = Json::array();
      cell.push_back(m.indices[r]);
      cell.push_back(m.indices[c]);
      if (e.is_unknown())
        cell.push_back("unknown");
      else
        cell.push_back(((e.value % 2) + 2) % 2);
      entries.push_back(std::move(cell));
    }
  j["entries"] = std::move(entries);
  return j;
}

inline std::string csv_of(const SupportMatrix& m) {
  std::string out = "row_d,col_d,value\n";
  for (std::size_t r = 0; r < m.entries.size(); ++r)
    for (std::size_t c = 0; c < m.entries[r].size(); ++c) {
      const CertifiedValue& e = m.entries[r][c];
      out += std::to_string(m.indices[r]) + "," + std::to_string(m.indices[c]) + ",";
      out += e.is_unknown() ? "unknown" : std::to_string(((e.value % 2) + 2) % 2);
      out += "\n";
    }
  return out;
}

}  // namespace swfam
