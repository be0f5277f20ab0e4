#include "deltashell/serialize.hpp"

#include <cstdio>

#include <json.hpp>

namespace dshell::serialize {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string basis_json(const trapbasis::BiorthogonalBasis& basis) {
  json j;
  j["E0"] = basis.params.E0;
  j["l_max"] = basis.params.l_max;
  j["r_s"] = basis.params.r_s;
  j["states"] = json::array();
  for (const auto& st : basis.states) {
    json s;
    s["l"] = st.l;
    s["nu"] = st.nu;
    s["E"] = st.E;
    s["A"] = st.kind == trapbasis::TrapEigenpair::Kind::pseudo ? st.A : 1.0;
    s["B"] = st.kind == trapbasis::TrapEigenpair::Kind::pseudo ? st.B : 1.0;
    s["norm"] = st.kind == trapbasis::TrapEigenpair::Kind::pseudo ? st.norm
                                                                  : st.osc_norm;
    j["states"].push_back(s);
  }
  return j.dump(2) + "\n";
}

std::string spectrum_csv(const trapres::SpectrumCurve& curve) {
  std::string out = "delta_z,track_id,E,E0,l_character,dominant_overlap\n";
  for (size_t i = 0; i < curve.dz.size(); ++i) {
    for (size_t j = 0; j < curve.E[i].size(); ++j) {
      out += fmt(curve.dz[i]) + "," + std::to_string(curve.track_of[i][j]) +
             "," + fmt(curve.E[i][j]) + "," + fmt(curve.E0[i][j]) + "," +
             std::to_string(curve.l_char[i][j]) + "," +
             fmt(curve.overlap[i][j]) + "\n";
    }
  }
  return out;
}

std::string resonances_json(const std::vector<trapres::ResonanceReport>& reports) {
  json j = json::array();
  for (const auto& r : reports) {
    json e;
    e["kind"] = r.kind == trapres::ResonanceReport::Kind::crossing ? "crossing"
                                                                   : "avoided";
    e["delta_z"] = r.delta_z;
    e["gap"] = r.gap;
    e["track_a"] = r.track_a;
    e["track_b"] = r.track_b;
    j.push_back(e);
  }
  return j.dump(2) + "\n";
}

std::string box_toy_csv(const std::vector<exactref::BoxToyState>& states,
                        int n_samples) {
  std::string out = "r";
  for (size_t s = 0; s < states.size(); ++s) {
    out += ",F" + std::to_string(s + 1) + ",P" + std::to_string(s + 1);
  }
  out += "\n";
  if (states.empty() || n_samples < 2) return out;
  const double L = states.front().L;
  for (int i = 0; i <= n_samples; ++i) {
    const double r = L * i / n_samples;
    out += fmt(r);
    for (const auto& st : states) out += "," + fmt(st.F(r)) + "," + fmt(st.P(r));
    out += "\n";
  }
  return out;
}

}  // namespace dshell::serialize
