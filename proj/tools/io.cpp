#include "io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace kdiv::io {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(std::string("json: missing field \"") + key + "\"");
  }
  return j.at(key);
}

std::string text_of(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw ValidationError(std::string("json: \"") + key + "\" must be a string");
  return v.get<std::string>();
}

VecXd optional_vector(const json& j, const char* key) {
  return j.contains(key) ? vector(j.at(key)) : VecXd();
}

}  // namespace

json parse(const std::string& text) {
  std::string body = text;
  if (!body.empty() && body.front() == '@') {
    std::ifstream in(body.substr(1));
    if (!in) throw ValidationError("cannot read " + body.substr(1));
    std::stringstream ss;
    ss << in.rdbuf();
    body = ss.str();
  }
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("json: ") + e.what());
  }
}

double number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ValidationError("json: expected a number or \"inf\", got " + j.dump());
}

json number(double v) {
  if (std::isinf(v)) return v > 0.0 ? json("inf") : json("-inf");
  return v;
}

VecXd vector(const json& j) {
  if (!j.is_array()) throw ValidationError("json: expected an array, got " + j.dump());
  VecXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i]);
  return v;
}

json vector(const VecXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

Grid grid(const json& j) {
  Grid g;
  g.min_exp = field(j, "min_exp").get<int>();
  g.max_exp = field(j, "max_exp").get<int>();
  g.per_octave = field(j, "per_octave").get<int>();
  if (g.max_exp < g.min_exp || g.per_octave < 1) throw ValidationError("grid: empty or malformed range");
  return g;
}

Grid grid(const std::string& text) {
  if (!text.empty() && (text.front() == '{' || text.front() == '@')) return grid(parse(text));
  Grid g;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d,%d,%d%c", &g.min_exp, &g.max_exp, &g.per_octave, &tail) != 3) {
    throw ValidationError("grid: expected \"min,max,per_octave\", got \"" + text + "\"");
  }
  if (g.max_exp < g.min_exp || g.per_octave < 1) throw ValidationError("grid: empty or malformed range");
  return g;
}

json to_json(const Grid& g) {
  return {{"min_exp", g.min_exp}, {"max_exp", g.max_exp}, {"per_octave", g.per_octave}};
}

CoupleDescriptor couple(const json& j) {
  const std::string kind = text_of(j, "kind");
  CoupleDescriptor c;
  if (kind == "sequence_lp") {
    c = CoupleDescriptor::sequence_lp(number(field(j, "p")), number(field(j, "q")), optional_vector(j, "w0"),
                                      optional_vector(j, "w1"));
  } else if (kind == "function_lp") {
    c = CoupleDescriptor::function_lp(number(field(j, "p")), number(field(j, "q")));
  } else if (kind == "weighted_l1") {
    c = CoupleDescriptor::weighted_l1(vector(field(j, "w0")), vector(field(j, "w1")));
  } else if (kind == "linfty_couple") {
    c = CoupleDescriptor::linfty_couple();
  } else {
    throw ValidationError("couple: unknown kind \"" + kind + "\"");
  }
  c.validate();
  return c;
}

json to_json(const CoupleDescriptor& c) {
  switch (c.kind) {
    case CoupleKind::SequenceLp: {
      json j = {{"kind", "sequence_lp"}, {"p", number(c.p)}, {"q", number(c.q)}};
      if (c.w0.size() != 0) j["w0"] = vector(c.w0);
      if (c.w1.size() != 0) j["w1"] = vector(c.w1);
      return j;
    }
    case CoupleKind::FunctionLp:
      return {{"kind", "function_lp"}, {"p", number(c.p)}, {"q", number(c.q)}};
    case CoupleKind::WeightedL1:
      return {{"kind", "weighted_l1"}, {"w0", vector(c.w0)}, {"w1", vector(c.w1)}};
    case CoupleKind::LInftyCouple:
      return {{"kind", "linfty_couple"}};
  }
  return {};
}

Element element(const json& j) {
  if (j.is_object() && j.contains("seq")) {
    const VecXd v = vector(j.at("seq"));
    if (v.size() == 0) throw ValidationError("element: empty sequence");
    if (!v.allFinite()) throw ValidationError("element: entries must be finite");
    return Element{v};
  }
  if (j.is_object() && j.contains("step")) {
    const json& s = j.at("step");
    const VecXd values = vector(field(s, "values"));
    if (values.size() == 0) throw ValidationError("element: empty step function");
    return Element{StepFunction(vector(field(s, "breaks")), values)};
  }
  throw ValidationError("element: expected {\"seq\": [...]} or {\"step\": {...}}");
}

json to_json(const Element& x) {
  if (const auto* f = std::get_if<StepFunction>(&x)) {
    return {{"step", {{"breaks", vector(f->breaks())}, {"values", vector(f->values())}}}};
  }
  return {{"seq", vector(std::get<WeightedSeq>(x))}};
}

Leg leg(const json& j) {
  Leg l;
  l.exponent = number(field(j, "p"));
  if (!(l.exponent > 0.0)) throw ValidationError("space: exponent must be positive");
  l.weights = optional_vector(j, "w");
  return l;
}

json to_json(const Leg& l) {
  json j = {{"p", number(l.exponent)}};
  if (l.weights.size() != 0) j["w"] = vector(l.weights);
  return j;
}

ConcavePL curve(const json& j) {
  const double slope = j.contains("slope") ? number(j.at("slope")) : 0.0;
  return {vector(field(j, "t")), vector(field(j, "y")), slope};
}

json to_json(const ConcavePL& f) {
  return {{"t", vector(f.knots_t())}, {"y", vector(f.knots_y())}, {"slope", number(f.terminal_slope())}};
}

ParameterLattice parameter(const json& j, const Grid& default_grid) {
  const std::string kind = text_of(j, "kind");
  const Grid g = j.contains("grid") ? grid(j.at("grid")) : default_grid;
  ParameterLattice E;
  if (kind == "lq_dyadic") {
    if (j.contains("weights")) {
      E = ParameterLattice::weighted(number(field(j, "q")), vector(j.at("weights")), g);
    } else {
      E = ParameterLattice::lq_dyadic(number(field(j, "q")), number(field(j, "theta")), g);
    }
  } else if (kind == "intersection") {
    std::vector<ParameterLattice> members;
    for (const json& m : field(j, "members")) members.push_back(parameter(m, g));
    E = ParameterLattice::intersection(std::move(members));
  } else {
    throw ValidationError("parameter: unknown kind \"" + kind + "\"");
  }
  E.validate();
  return E;
}

json to_json(const ParameterLattice& E) {
  if (E.kind == ParameterLattice::Kind::Intersection) {
    json members = json::array();
    for (const ParameterLattice& m : E.members) members.push_back(to_json(m));
    return {{"kind", "intersection"}, {"members", members}};
  }
  json j = {{"kind", "lq_dyadic"}, {"q", number(E.q)}, {"grid", to_json(E.grid)}};
  if (E.weights.size() != 0) {
    j["weights"] = vector(E.weights);
  } else {
    j["theta"] = number(E.theta);
  }
  return j;
}

json to_json(const ParameterNorm& n) {
  return {{"value", number(n.value)}, {"divergent", n.divergent}, {"quadrature_error", number(n.quadrature_error)}};
}

json to_json(const SplitWitness& w) {
  return {{"x0", to_json(w.x0)},          {"x1", to_json(w.x1)},
          {"norm0", number(w.norm0)},     {"norm1", number(w.norm1)},
          {"objective", number(w.objective)}, {"t", number(w.t)}};
}

json to_json(const DivisibilityCertificate& c) {
  json pieces = json::array();
  for (const Element& e : c.pieces) pieces.push_back(to_json(e));
  json majorants = json::array();
  for (const ConcavePL& f : c.majorants) majorants.push_back(to_json(f));
  return {{"pieces", pieces},
          {"majorants", majorants},
          {"constants", vector(c.constants)},
          {"gamma_cert", number(c.gamma_cert)},
          {"gamma_measured", number(c.gamma_measured)},
          {"residual", number(c.residual)},
          {"transfer", c.transfer},
          {"transfer_norm", number(c.transfer_norm)},
          {"band_upper", number(c.band_upper)},
          {"p", number(c.p)},
          {"quasi_concavity", number(c.quasi_concavity)},
          {"sign_aligned", c.sign_aligned},
          {"valid", c.valid(c.p < 1.0 ? 1e-10 : 1e-12)}};
}

json to_json(const OperatorWitness& w) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < w.T.rows(); ++i) rows.push_back(vector(VecXd(w.T.row(i).transpose())));
  return {{"matrix", rows},
          {"norm_l1", number(w.norm0)},
          {"norm_linf", number(w.norm1)},
          {"residual", number(w.residual)},
          {"bound", number(w.bound)},
          {"status", to_string(w.status)},
          {"exact", w.exact},
          {"domination_audit", w.domination_audit}};
}

json to_json(const MonotonicityEstimate& e) {
  json j = {{"trials", e.trials}, {"worst_ratio", number(e.worst_ratio)}};
  if (e.violating) {
    json pieces = json::array();
    for (const Element& p : e.violating->pieces) pieces.push_back(to_json(p));
    j["violating"] = {{"x", to_json(e.violating->x)}, {"pieces", pieces}};
  } else {
    j["violating"] = nullptr;
  }
  return j;
}

json to_json(const Convexified& c) { return {{"element", to_json(c.element)}, {"norm", number(c.norm)}}; }

json to_json(const EHatResult& r) {
  json cover = json::array();
  for (const CoverElement& c : r.cover) {
    cover.push_back({{"x", vector(c.x)}, {"norm", number(c.norm)}});
  }
  return {{"value", number(r.value)}, {"covered", r.covered}, {"status", to_string(r.status)}, {"cover", cover}};
}

std::string format(double v) {
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace kdiv::io
