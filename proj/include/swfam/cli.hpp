#pragma once

#include "swfam/json_io.hpp"
#include "swfam/parse.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace swfam::cli {

namespace detail {

inline void emit(const Json& j, const std::string& out_path, std::ostream& stdout_stream) {
  std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    stdout_stream << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) fail(Errc::usage, "cannot open output file " + out_path);
    f << text;
  }
}

inline void emit_text(const std::string& text, const std::string& out_path,
                      std::ostream& stdout_stream) {
  if (out_path.empty()) {
    stdout_stream << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) fail(Errc::usage, "cannot open output file " + out_path);
    f << text;
  }
}

inline AutomorphismTable load_autos(const std::string& path) {
  AutomorphismTable table;
  if (path.empty()) return table;
  std::ifstream f(path);
  if (!f) fail(Errc::usage, "cannot open automorphism file " + path);
  Json j = Json::parse(f, nullptr, true);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Json& entry = it.value();
    const Json& rows = entry.contains("matrix") ? entry.at("matrix") : entry;
    if (!rows.is_array() || rows.empty()) fail(Errc::usage, "automorphism matrix must be a 2d array");
    int n = static_cast<int>(rows.size());
    IMat m(n, n);
    for (int r = 0; r < n; ++r) {
      if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != n)
        fail(Errc::usage, "automorphism matrix must be square");
      for (int c = 0; c < n; ++c) m.at(r, c) = rows[r][c].get<i64>();
    }
    NamedAutomorphism named{std::move(m), std::nullopt};
    if (entry.is_object() && entry.contains("inner_manifold"))
      named.inner_manifold = entry.at("inner_manifold").get<std::string>();
    table[it.key()] = std::move(named);
  }
  return table;
}

inline Json header(i64 seed) {
  Json j;
  j["schema"] = kSchema;
  j["seed"] = seed;
  return j;
}

}  // namespace detail

// Exit codes: 0 success, 1 computation-level failure, 2 usage error.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact families Seiberg-Witten calculator"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string out_path;
  i64 seed = 0;
  std::string format = "json";
  app.add_option("--out", out_path, "write output to a file instead of stdout");
  app.add_option("--seed", seed, "seed recorded in the output header");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* inv_cmd = app.add_subcommand("invariants", "topological invariants of an expression");
  std::string inv_manifold;
  inv_cmd->add_option("--manifold", inv_manifold, "manifold expression")->required();

  auto* enum_cmd = app.add_subcommand("enumerate-spinc", "spin^c classes with d(s) = -1");
  std::string enum_manifold;
  i64 enum_bound = 1;
  enum_cmd->add_option("--manifold", enum_manifold)->required();
  enum_cmd->add_option("--bound", enum_bound, "coordinate bound")->required();

  auto* kah_cmd = app.add_subcommand("sw-kahler", "chamber invariants on E1 or E1(m,n)");
  std::string kah_surface;
  std::optional<i64> kah_a;
  bool kah_table = false;
  kah_cmd->add_option("--surface", kah_surface)->required();
  kah_cmd->add_option("--L", kah_a, "coefficient a of L = a t'");
  kah_cmd->add_flag("--table", kah_table, "emit the table of nonzero zero-chamber classes");

  auto* fam_cmd = app.add_subcommand("sw-family", "families invariant of a mapping cylinder");
  std::string fam_manifold, fam_spinc, fam_diffeo, fam_chamber = "zero", fam_autos;
  fam_cmd->add_option("--manifold", fam_manifold)->required();
  fam_cmd->add_option("--spinc", fam_spinc, "characteristic vector, comma separated")->required();
  fam_cmd->add_option("--diffeo", fam_diffeo)->required();
  fam_cmd->add_option("--chamber", fam_chamber)->check(CLI::IsMember({"zero", "constant"}));
  fam_cmd->add_option("--autos", fam_autos, "JSON side file of named automorphisms");

  auto* rank_cmd = app.add_subcommand("torelli-rank", "triangular support-matrix certificate");
  i64 rank_d = 0;
  rank_cmd->add_option("--D", rank_d, "number of rows (odd indices 1..2D-1)")->required();

  auto* td_cmd = app.add_subcommand("build-td", "construct the t_d family");
  i64 td_d = 0;
  bool td_dump = false;
  td_cmd->add_option("--d", td_d)->required();
  td_cmd->add_flag("--dump", td_dump, "include matrices in the output");

  auto* oq_cmd = app.add_subcommand("sw-oq", "orbit sum over a divisibility class");
  std::string oq_diffeo, oq_manifold, oq_autos;
  i64 oq_q = 1, oq_bound = 1;
  oq_cmd->add_option("--diffeo", oq_diffeo)->required();
  oq_cmd->add_option("--q", oq_q)->required();
  oq_cmd->add_option("--bound", oq_bound)->required();
  oq_cmd->add_option("--manifold", oq_manifold, "defaults to the t_d chart");
  oq_cmd->add_option("--autos", oq_autos, "JSON side file of named automorphisms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and friends
      out << app.help();
      return 0;
    }
    Json j = detail::header(seed);
    j["error"] = {{"kind", "usage"}, {"message", e.what()}};
    err << j.dump(2) << "\n";
    return 2;
  }

  try {
    if (*inv_cmd) {
      ManifoldExpr x = parse_manifold(inv_manifold);
      Json j = detail::header(seed);
      j["manifold"] = to_string(x);
      j["invariants"] = json_of(invariants(x));
      j["lattice"] = json_of_lattice(*x.lattice());
      detail::emit(j, out_path, out);
      return 0;
    }

    if (*enum_cmd) {
      ManifoldExpr x = parse_manifold(enum_manifold);
      auto classes = spinc_family(x, enum_bound);
      Json j = detail::header(seed);
      j["manifold"] = to_string(x);
      j["bound"] = enum_bound;
      j["count"] = classes.size();
      Json arr = Json::array();
      for (const SpinCClass& s : classes) arr.push_back(s.c.coords);
      j["classes"] = std::move(arr);
      detail::emit(j, out_path, out);
      return 0;
    }

    if (*kah_cmd) {
      ManifoldExpr x = parse_manifold(kah_surface);
      if (x.summands().size() != 1) fail(Errc::usage, "--surface must be a single atom");
      KahlerModel mdl = KahlerModel::for_atom(x.summands()[0]);
      if (kah_table) {
        auto table = basic_classes_zero(mdl, 0);
        if (format == "csv") {
          std::string csv = "a,value\n";
          for (const auto& [l, v] : table) {
            std::optional<i64> a = fiber_line_coefficient(mdl, l);
            csv += std::to_string(*a) + "," + std::to_string(v) + "\n";
          }
          detail::emit_text(csv, out_path, out);
          return 0;
        }
        Json j = detail::header(seed);
        j["surface"] = to_string(mdl.surface);
        j["k"] = mdl.k;
        Json arr = Json::array();
        for (const auto& [l, v] : table) {
          std::optional<i64> a = fiber_line_coefficient(mdl, l);
          arr.push_back(Json{{"a", *a}, {"value", v}});
        }
        j["basic_classes"] = std::move(arr);
        detail::emit(j, out_path, out);
        return 0;
      }
      if (!kah_a) fail(Errc::usage, "need --L (or --table)");
      IVec lc = fiber_line_coords();
      for (i64& v : lc) v = checked_mul(v, *kah_a);
      LatticeVector l(mdl.lattice, std::move(lc));
      Json j = detail::header(seed);
      j["surface"] = to_string(mdl.surface);
      j["a"] = *kah_a;
      std::optional<i64> plus = sw_chambered(mdl, l, KChamber::plus);
      std::optional<i64> minus = sw_chambered(mdl, l, KChamber::minus);
      std::optional<i64> zero = sw_zero_chamber(mdl, l);
      j["plus"] = plus ? Json(*plus) : Json("unknown");
      j["minus"] = minus ? Json(*minus) : Json("unknown");
      j["zero"] = zero ? Json(*zero) : Json("unknown");
      j["wall_side"] = to_string(wall_side(mdl, l));
      j["d"] = square(l) - pair(mdl.K, l);
      detail::emit(j, out_path, out);
      return 0;
    }

    if (*fam_cmd) {
      ManifoldExpr x = parse_manifold(fam_manifold);
      AutomorphismTable autos = detail::load_autos(fam_autos);
      DiffeoExpr f = parse_diffeo(fam_diffeo, x, autos);
      SpinCClass s{LatticeVector(x.lattice(), parse_int_vector(fam_spinc))};
      Chamber chamber = fam_chamber == "zero" ? Chamber::zero : Chamber::constant;
      CertifiedValue v = sw_family(x, s, f, chamber);
      Json j = detail::header(seed);
      j["manifold"] = to_string(x);
      j["spinc"] = s.c.coords;
      j["diffeo"] = to_string(f);
      j["chamber"] = to_string(chamber);
      j["kind"] = to_string(v.kind);
      j["value"] = v.is_unknown() ? Json("unknown") : Json(v.value);
      j["trace"] = json_of(v.trace);
      detail::emit(j, out_path, out);
      return 0;
    }

    if (*rank_cmd) {
      RankCertificate cert = rank_certificate(rank_d);
      if (format == "csv") {
        detail::emit_text(csv_of(cert.witness), out_path, out);
        return 0;
      }
      Json j = detail::header(seed);
      Json w = json_of(cert.witness);
      for (auto it = w.begin(); it != w.end(); ++it) j[it.key()] = it.value();
      j["rank"] = cert.rank_lower_bound;
      j["triangular"] = cert.triangular;
      detail::emit(j, out_path, out);
      return 0;
    }

    if (*td_cmd) {
      TdFamily fam = build_td(td_d);
      Json j = detail::header(seed);
      j["d"] = fam.d;
      j["manifold"] = to_string(fam.X);
      j["surface"] = to_string(Atom::e1log(2, fam.d + 2));
      j["c_sd"] = fam.sd.c.coords;
      j["divisibility"] = divisibility(fam.sd.c);
      j["f0"] = to_string(fam.f0);
      j["fd"] = to_string(fam.fd);
      j["td"] = to_string(fam.td);
      j["sgn_plus_f0"] = sgn_plus_of(fam.f0);
      j["sgn_plus_fd"] = sgn_plus_of(fam.fd);
      j["torelli_td"] = is_torelli(fam.td);
      if (td_dump) {
        j["psi_d"] = json_of(fam.psi_d.matrix);
        j["induced_f0"] = json_of(fam.f0.induced().matrix);
        j["induced_fd"] = json_of(fam.fd.induced().matrix);
        j["induced_td"] = json_of(fam.td.induced().matrix);
      }
      detail::emit(j, out_path, out);
      return 0;
    }

    if (*oq_cmd) {
      ManifoldExpr x = oq_manifold.empty() ? td_chart() : parse_manifold(oq_manifold);
      AutomorphismTable autos = detail::load_autos(oq_autos);
      DiffeoExpr f = parse_diffeo(oq_diffeo, x, autos);
      OqResult res = sw_oq(f, oq_q, oq_bound);
      Json j = detail::header(seed);
      j["manifold"] = to_string(x);
      j["diffeo"] = to_string(f);
      j["q"] = oq_q;
      j["bound"] = oq_bound;
      j["kind"] = to_string(res.total.kind);
      j["value"] = res.total.is_unknown() ? Json("unknown") : Json(res.total.value);
      j["bound_captures_support"] = res.bound_captures_support;
      Json arr = Json::array();
      for (const OqSummand& s : res.summands) {
        Json e;
        e["c"] = s.c;
        e["kind"] = to_string(s.value.kind);
        e["value"] = s.value.is_unknown() ? Json("unknown") : Json(s.value.value);
        arr.push_back(std::move(e));
      }
      j["summands"] = std::move(arr);
      detail::emit(j, out_path, out);
      return 0;
    }
  } catch (const ParseError& e) {
    Json j = detail::header(seed);
    j["error"] = {{"kind", "usage"}, {"message", e.what()}, {"offset", e.offset()}};
    err << j.dump(2) << "\n";
    return 2;
  } catch (const Error& e) {
    bool usage = e.code() == Errc::usage;
    Json j = detail::header(seed);
    j["error"] = {{"kind", usage ? "usage" : "computation"}, {"message", e.what()}};
    err << j.dump(2) << "\n";
    return usage ? 2 : 1;
  } catch (const Json::exception& e) {
    Json j = detail::header(seed);
    j["error"] = {{"kind", "usage"}, {"message", e.what()}};
    err << j.dump(2) << "\n";
    return 2;
  }

  return 2;
}

}  // namespace swfam::cli
