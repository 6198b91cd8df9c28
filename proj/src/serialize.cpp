#include "subsel/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "subsel/error.hpp"

namespace subsel {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json meta_json(const std::map<std::string, double>& meta) {
  Json j = Json::object();
  for (const auto& [k, v] : meta) j[k] = number(v);
  return j;
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Vector vector_from(const Json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string(what) + " must be an array of numbers");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

std::vector<double> levels_from(const Json& j, const std::string& name) {
  if (j.is_array()) {
    const Vector v = vector_from(j, ("axis " + name).c_str());
    return {v.data(), v.data() + v.size()};
  }
  if (j.is_object() && j.contains("from") && j.contains("to") && j.contains("count")) {
    return linspace(j.at("from").get<double>(), j.at("to").get<double>(), j.at("count").get<std::size_t>());
  }
  throw ConfigError("axis " + name + " must be a list of levels or {from, to, count}");
}

Basis basis_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("family")) throw ConfigError("basis needs a 'family'");
  const std::string family = j.at("family").get<std::string>();
  const Index dim = get_or<Index>(j, "dim", 1);
  if (family == "linear") {
    return basis::linear(dim, get_or<bool>(j, "intercept", true), get_or<double>(j, "scale", 1.0));
  }
  if (family == "polynomial") {
    return basis::polynomial(dim, get_or<Index>(j, "variable", 0), get_or<int>(j, "degree", 1),
                             get_or<bool>(j, "intercept", true));
  }
  if (family == "trig") {
    const std::string fn = get_or<std::string>(j, "fn", "sin");
    if (fn != "sin" && fn != "cos") throw ConfigError("trig fn must be 'sin' or 'cos'");
    return basis::trig(dim, get_or<Index>(j, "variable", 0), fn == "sin" ? basis::Trig::sin : basis::Trig::cos,
                       get_or<double>(j, "a", 1.0), get_or<double>(j, "b", 0.0), get_or<double>(j, "c", 0.0),
                       get_or<double>(j, "scale", 1.0));
  }
  if (family == "concat") {
    if (!j.contains("parts") || !j.at("parts").is_array()) throw ConfigError("concat basis needs 'parts'");
    std::vector<Basis> parts;
    for (const Json& p : j.at("parts")) parts.push_back(basis_from_json(p));
    return basis::concat(std::move(parts));
  }
  throw ConfigError("unknown basis family '" + family + "'");
}

}  // namespace

Json to_json(const Vector& v) {
  Json j = Json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(number(v(i)));
  return j;
}

Json to_json(const CriterionValue& c) {
  return Json{{"name", std::string(to_string(c.name))}, {"value", number(c.value)}, {"meta", meta_json(c.meta)}};
}

Json to_json(const DesignPoint& p) {
  Json j{{"x", to_json(p.x)}};
  if (p.z.size() > 0) j["z"] = to_json(p.z);
  return j;
}

Json to_json(const GetVerdict& v) {
  return Json{{"is_optimal", v.is_optimal},   {"max_variance", number(v.max_variance)},
              {"bound", number(v.bound)},      {"tolerance", number(v.tolerance)},
              {"worst_index", v.worst_index},  {"worst_point", to_json(v.worst_point)}};
}

Json to_json(const FitResult& f) {
  Json trace = Json::array();
  for (double v : f.objective_trace) trace.push_back(number(v));
  return Json{{"theta_hat", to_json(f.theta_hat)},
              {"std_errors", to_json(f.std_errors)},
              {"loglik_or_rss", number(f.loglik_or_rss)},
              {"iterations", f.iterations},
              {"converged", f.converged},
              {"objective_trace", trace}};
}

Json to_json(const ConfusionMatrix& c) {
  return Json{{"predicted_0", {{"actual_0", c.counts[0][0]}, {"actual_1", c.counts[0][1]}}},
              {"predicted_1", {{"actual_0", c.counts[1][0]}, {"actual_1", c.counts[1][1]}}},
              {"total", c.total()},
              {"accuracy", number(c.accuracy())}};
}

Json to_json(const SubsampleSelection& s) {
  return Json{{"algorithm", s.algorithm}, {"size", s.indices.size()}, {"indices", s.indices}};
}

Json to_json(const IbossResult& r) {
  Json j = to_json(r.selection);
  Json cuts = Json::array();
  for (const IbossCut& c : r.cuts) {
    cuts.push_back({{"column", c.column},
                    {"low_count", c.low_count},
                    {"high_count", c.high_count},
                    {"low_cut", number(c.low_cut)},
                    {"high_cut", number(c.high_cut)}});
  }
  j["per_variable_cuts"] = cuts;
  return j;
}

Json to_json(const DesignMeasure& d) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    Json p = to_json(d.point(i));
    p["weight"] = number(d.weight(i));
    pts.push_back(p);
  }
  return Json{{"points", pts}};
}

Json to_json(const SeqTrace& t) {
  Json its = Json::array();
  for (const SeqIteration& it : t.iterations) {
    Json rec{{"iteration", it.iteration},   {"grid_index", it.grid_index}, {"grid_point", to_json(it.grid_point)},
             {"matched", it.matched},       {"utility", number(it.utility)}, {"n_current", it.n_current}};
    if (it.theta_hat.size() > 0) rec["theta_hat"] = to_json(it.theta_hat);
    its.push_back(rec);
  }
  return Json{{"initial", t.initial}, {"initial_theta", to_json(t.initial_theta)}, {"iterations", its}};
}

Json to_json(const RobustTrajectory& t) {
  Json steps = Json::array();
  for (const WiensStep& s : t.steps) {
    steps.push_back({{"iteration", s.iteration},
                     {"index", s.index},
                     {"d_nu", number(s.d_nu)},
                     {"lambda", number(s.lambda)},
                     {"weight_sum", number(s.weight_sum)},
                     {"min_weight", number(s.min_weight)},
                     {"checksum", s.checksum}});
  }
  return Json{{"initial_support", t.initial_support}, {"initial_d_nu", number(t.initial_d_nu)}, {"steps", steps}};
}

Json to_json(const MontepiedraVerdict& v) {
  return Json{{"holds", v.holds},
              {"max_excess", number(v.max_excess)},
              {"worst_index", v.worst_index},
              {"worst_point", to_json(v.worst_point)}};
}

CandidateGrid grid_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("axes") || !j.at("axes").is_object()) {
    throw ConfigError("grid config needs an 'axes' object");
  }
  std::vector<GridAxis> axes;
  for (const auto& [name, levels] : j.at("axes").items()) axes.push_back({name, levels_from(levels, name), false});
  if (j.contains("z_axes")) {
    if (!j.at("z_axes").is_object()) throw ConfigError("'z_axes' must be an object");
    for (const auto& [name, levels] : j.at("z_axes").items()) axes.push_back({name, levels_from(levels, name), true});
  }
  return build_grid(std::move(axes));
}

ModelSpec model_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("f")) throw ConfigError("model config needs an 'f' basis");
  std::optional<Basis> h, g;
  if (j.contains("h") && !j.at("h").is_null()) h = basis_from_json(j.at("h"));
  if (j.contains("g") && !j.at("g").is_null()) g = basis_from_json(j.at("g"));
  return ModelSpec(basis_from_json(j.at("f")), std::move(h), std::move(g));
}

BiasSpec bias_from_json(const Json& j) {
  BiasSpec b;
  b.psi = j.contains("psi") ? vector_from(j.at("psi"), "psi") : Vector();
  b.phi = j.contains("phi") ? vector_from(j.at("phi"), "phi") : Vector();
  b.sigma = get_or<double>(j, "sigma", 1.0);
  b.n_total = get_or<std::size_t>(j, "n_total", 1);
  return b;
}

DesignMeasure design_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("points") || !j.at("points").is_array()) {
    throw ConfigError("design needs a 'points' array");
  }
  std::vector<DesignPoint> pts;
  std::vector<double> w;
  for (const Json& p : j.at("points")) {
    if (!p.contains("x") || !p.contains("weight")) throw ConfigError("design point needs 'x' and 'weight'");
    DesignPoint dp{vector_from(p.at("x"), "x"), p.contains("z") ? vector_from(p.at("z"), "z") : Vector()};
    pts.push_back(std::move(dp));
    w.push_back(p.at("weight").get<double>());
  }
  return DesignMeasure(std::move(pts), Eigen::Map<Vector>(w.data(), static_cast<Index>(w.size())));
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const Json& j, const std::filesystem::path& path) { write_text(j.dump(2) + "\n", path); }

void write_text(const std::string& text, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace subsel
