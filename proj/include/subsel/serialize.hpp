#pragma once

// JSON artifacts and JSON configs (grids, models, designs).

#include <filesystem>
#include <string>

#include <json.hpp>

#include "subsel/criteria.hpp"
#include "subsel/estimation.hpp"
#include "subsel/iboss.hpp"
#include "subsel/robust.hpp"
#include "subsel/sequential.hpp"

namespace subsel {

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Json to_json(const CriterionValue& c);
Json to_json(const DesignPoint& p);
Json to_json(const GetVerdict& v);
Json to_json(const FitResult& f);
Json to_json(const ConfusionMatrix& c);
Json to_json(const SubsampleSelection& s);
Json to_json(const IbossResult& r);
Json to_json(const DesignMeasure& d);
Json to_json(const SeqTrace& t);
Json to_json(const RobustTrajectory& t);
Json to_json(const MontepiedraVerdict& v);

/// {"axes": {name: [levels] | {"from", "to", "count"}}, "z_axes": {...}}.
/// Axis order follows the file.
CandidateGrid grid_from_json(const Json& j);

/// {"f": basis, "h": basis, "g": basis} where a basis is one of
///   {"family": "linear", "dim", "intercept", "scale"}
///   {"family": "polynomial", "dim", "variable", "degree", "intercept"}
///   {"family": "trig", "dim", "variable", "fn": "sin"|"cos", "a", "b", "c", "scale"}
///   {"family": "concat", "parts": [basis, ...]}
ModelSpec model_from_json(const Json& j);

/// {"psi": [...], "phi": [...], "sigma", "n_total"}
BiasSpec bias_from_json(const Json& j);

/// {"points": [{"x": [...], "z": [...], "weight": w}, ...]}
DesignMeasure design_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);

/// Writes `j` pretty-printed with a trailing newline.
void write_json(const Json& j, const std::filesystem::path& path);

/// Writes the text exactly.
void write_text(const std::string& text, const std::filesystem::path& path);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace subsel
