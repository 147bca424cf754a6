#ifndef TAILINV_SERIALIZE_HPP
#define TAILINV_SERIALIZE_HPP

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>

#include "tailinv/cancellation.hpp"
#include "tailinv/forward.hpp"
#include "tailinv/inverse.hpp"
#include "tailinv/measure.hpp"
#include "tailinv/montecarlo.hpp"

namespace tailinv {

using Json = nlohmann::json;

// Wire formats (field names are part of the tool's interface):
//   discrete measure   {"dim": d, "atoms": [{"x": [...], "m": ...}]}
//   tail measure       {"dim": d, "alpha": a, "spectral": [{"dir": [...], "w": ...}]}
//   weight family      {"kind": "scalars"|"diag"|"matrices", "dim": d, "entries": [...]}
//   eval set           {"variant": "rect"|"norm_exceed"|"half_line", ...}

Json to_json(const DiscreteMeasure& m);
DiscreteMeasure discrete_from_json(const Json& j);

Json to_json(const HomogeneousTailMeasure& mu);
HomogeneousTailMeasure tail_measure_from_json(const Json& j);

Json to_json(const WeightFamily& fam);
WeightFamily weight_family_from_json(const Json& j);

Json to_json(const EvalSet& set);
EvalSet eval_set_from_json(const Json& j);

Json to_json(const DeterminingVerdict& v);
Json to_json(const MomentReport& r);
Json to_json(const ContractionCertificate& c);
Json to_json(const NeumannResult& r);
Json to_json(const std::vector<RoundtripRow>& rows);
Json to_json(const HillEstimate& h);
Json to_json(const std::vector<TailRatioRow>& rows);
Json to_json(const EmpiricalSpectral& e);
Json to_json(const CompareReport& r);

/// Binary batch format: one JSON header line (dim, n, seed, provenance)
/// terminated by '\n', then n*dim little-endian IEEE doubles.
void write_batch(std::ostream& os, const SampleBatch& batch);
SampleBatch read_batch(std::istream& is);
void write_batch_file(const std::string& path, const SampleBatch& batch);
SampleBatch read_batch_file(const std::string& path);

} // namespace tailinv

#endif
