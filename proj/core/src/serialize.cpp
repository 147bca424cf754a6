#include "tailinv/serialize.hpp"

#include <bit>
#include <fstream>
#include <sstream>

namespace tailinv {

static_assert(std::endian::native == std::endian::little,
              "batch files are little-endian; big-endian hosts are unsupported");

namespace {

Json vec_to_json(const Vec& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vec vec_from_json(const Json& j) {
    if (!j.is_array()) throw ValidationError("json: expected an array of numbers");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

Json mat_to_json(const Mat& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("json: expected a matrix as an array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != cols)
            throw ValidationError("json: ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

} // namespace

Json to_json(const DiscreteMeasure& m) {
    Json atoms = Json::array();
    for (const Atom& a : m.atoms()) atoms.push_back(Json{{"x", vec_to_json(a.point)}, {"m", a.mass}});
    return Json{{"dim", m.dim()}, {"atoms", std::move(atoms)}};
}

DiscreteMeasure discrete_from_json(const Json& j) {
    if (!j.contains("dim") || !j.contains("atoms"))
        throw ValidationError("discrete measure json: needs fields dim, atoms");
    std::vector<Atom> atoms;
    for (const Json& a : j.at("atoms")) atoms.push_back(Atom{vec_from_json(a.at("x")), a.at("m").get<double>()});
    return DiscreteMeasure(j.at("dim").get<int>(), std::move(atoms));
}

Json to_json(const HomogeneousTailMeasure& mu) {
    Json spectral = Json::array();
    for (const SpectralAtom& s : mu.spectral())
        spectral.push_back(Json{{"dir", vec_to_json(s.direction)}, {"w", s.weight}});
    return Json{{"dim", mu.dim()}, {"alpha", mu.alpha()}, {"spectral", std::move(spectral)}};
}

HomogeneousTailMeasure tail_measure_from_json(const Json& j) {
    if (!j.contains("dim") || !j.contains("alpha") || !j.contains("spectral"))
        throw ValidationError("tail measure json: needs fields dim, alpha, spectral");
    std::vector<SpectralAtom> spectral;
    for (const Json& s : j.at("spectral"))
        spectral.push_back(SpectralAtom{vec_from_json(s.at("dir")), s.at("w").get<double>()});
    return HomogeneousTailMeasure(j.at("dim").get<int>(), j.at("alpha").get<double>(), std::move(spectral));
}

Json to_json(const WeightFamily& fam) {
    Json entries = Json::array();
    switch (fam.kind()) {
        case WeightKind::Scalars:
            for (double v : fam.scalar_entries()) entries.push_back(v);
            return Json{{"kind", "scalars"}, {"dim", fam.dim()}, {"entries", std::move(entries)}};
        case WeightKind::DiagonalVectors:
            for (const Vec& v : fam.diagonal_entries()) entries.push_back(vec_to_json(v));
            return Json{{"kind", "diag"}, {"dim", fam.dim()}, {"entries", std::move(entries)}};
        case WeightKind::Matrices:
            for (const Mat& m : fam.matrix_entries()) entries.push_back(mat_to_json(m));
            return Json{{"kind", "matrices"}, {"dim", fam.dim()}, {"entries", std::move(entries)}};
    }
    throw ValidationError("weight family json: unknown kind");
}

WeightFamily weight_family_from_json(const Json& j) {
    if (!j.contains("kind") || !j.contains("entries"))
        throw ValidationError("weight family json: needs fields kind, entries");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "scalars") {
        std::vector<double> entries;
        for (const Json& e : j.at("entries")) entries.push_back(e.get<double>());
        return WeightFamily::scalars(j.value("dim", 1), std::move(entries));
    }
    if (kind == "diag") {
        std::vector<Vec> entries;
        for (const Json& e : j.at("entries")) entries.push_back(vec_from_json(e));
        return WeightFamily::diagonals(std::move(entries));
    }
    if (kind == "matrices") {
        std::vector<Mat> entries;
        for (const Json& e : j.at("entries")) entries.push_back(mat_from_json(e));
        return WeightFamily::matrices(std::move(entries));
    }
    throw ValidationError("weight family json: kind must be scalars, diag, or matrices");
}

Json to_json(const EvalSet& set) {
    if (const auto* r = std::get_if<Rect>(&set.body()))
        return Json{{"variant", "rect"}, {"lo", vec_to_json(r->lo)}, {"hi", vec_to_json(r->hi)}};
    if (const auto* n = std::get_if<NormExceed>(&set.body()))
        return Json{{"variant", "norm_exceed"}, {"dim", set.dim()}, {"radius", n->radius}};
    const auto& h = std::get<HalfLineProduct>(set.body());
    return Json{{"variant", "half_line"}, {"signs", h.signs}, {"thresholds", vec_to_json(h.thresholds)}};
}

EvalSet eval_set_from_json(const Json& j) {
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "rect") return EvalSet::rect(vec_from_json(j.at("lo")), vec_from_json(j.at("hi")));
    if (variant == "norm_exceed")
        return EvalSet::norm_exceed(j.at("dim").get<int>(), j.at("radius").get<double>());
    if (variant == "half_line")
        return EvalSet::half_line(j.at("signs").get<std::vector<int>>(), vec_from_json(j.at("thresholds")));
    throw ValidationError("eval set json: variant must be rect, norm_exceed, or half_line");
}

Json to_json(const DeterminingVerdict& v) {
    Json j{{"status", to_string(v.status)},
           {"theta_max", v.theta_max},
           {"conditions_checked", v.conditions_checked},
           {"min_abs_value", v.min_abs_value},
           {"warnings", v.warnings},
           {"randomized_search", v.randomized_search}};
    if (v.min_theta.size() > 0) j["min_theta"] = vec_to_json(v.min_theta);
    if (!v.min_condition.empty()) j["min_condition"] = v.min_condition;
    if (v.status == VerdictStatus::Certified) j["certificate"] = v.certificate;
    if (v.status == VerdictStatus::Refuted) {
        j["condition"] = v.condition_id;
        j["witness_theta"] = vec_to_json(v.witness_theta);
        j["witness_abs_value"] = v.witness_abs_value;
        if (v.witness_j > 0) j["witness_j"] = v.witness_j;
        if (!v.witness_pattern.empty()) j["witness_pattern"] = v.witness_pattern;
    }
    return j;
}

Json to_json(const MomentReport& r) {
    return Json{{"nonconcentration", r.nonconcentration},
                {"concentrated_on_subspace", r.concentrated_on_subspace},
                {"moment_minus", r.moment_minus},
                {"moment_plus", r.moment_plus},
                {"quadrant_moments", r.quadrant_moments},
                {"small_multiplier", r.small_multiplier},
                {"tail_probe_sup", r.tail_probe_sup},
                {"hypotheses_ok", r.hypotheses_ok}};
}

Json to_json(const ContractionCertificate& c) {
    Json j{{"alpha", c.alpha},
           {"gamma1", c.gamma1},
           {"norms", c.norms},
           {"kappa", c.kappa},
           {"feasible", c.feasible}};
    if (c.preconditioner) j["preconditioner"] = mat_to_json(*c.preconditioner);
    return j;
}

Json to_json(const NeumannResult& r) {
    return Json{{"value", r.value},
                {"terms_used", r.terms_used},
                {"tail_bound", r.tail_bound},
                {"per_term", r.per_term},
                {"kappa", r.kappa},
                {"mass_bound", r.mass_bound},
                {"inf_b", r.inf_b},
                {"bound_achieved", r.bound_achieved}};
}

Json to_json(const std::vector<RoundtripRow>& rows) {
    Json arr = Json::array();
    for (const RoundtripRow& r : rows)
        arr.push_back(Json{{"set", to_json(r.set)},
                           {"truth", r.truth},
                           {"recovered", r.recovered},
                           {"bound", r.bound},
                           {"pass", r.pass}});
    return arr;
}

Json to_json(const HillEstimate& h) {
    return Json{{"alpha_hat", h.alpha_hat}, {"k", h.k}, {"ci95", Json::array({h.ci_lo, h.ci_hi})}};
}

Json to_json(const std::vector<TailRatioRow>& rows) {
    Json arr = Json::array();
    for (const TailRatioRow& r : rows)
        arr.push_back(Json{{"s", r.s},
                           {"ratio", r.ratio},
                           {"sigma", r.sigma},
                           {"exceed_s", r.exceed_s},
                           {"exceed_2s", r.exceed_2s},
                           {"sufficient", r.sufficient}});
    return arr;
}

Json to_json(const EmpiricalSpectral& e) {
    return Json{{"directions", to_json(e.directions)}, {"n_exceed", e.n_exceed}, {"radius", e.radius}};
}

Json to_json(const CompareReport& r) {
    Json rows = Json::array();
    for (const CompareRow& row : r.rows)
        rows.push_back(Json{{"set", to_json(row.set)},
                            {"empirical", row.empirical},
                            {"theoretical", row.theoretical},
                            {"sigma", row.sigma},
                            {"dev_sigmas", row.dev_sigmas}});
    return Json{{"rows", std::move(rows)},
                {"max_abs_dev", r.max_abs_dev},
                {"max_dev_sigmas", r.max_dev_sigmas}};
}

void write_batch(std::ostream& os, const SampleBatch& batch) {
    Json header{{"dim", batch.dim}, {"n", batch.n}, {"seed", batch.seed}, {"provenance", batch.provenance}};
    os << header.dump() << '\n';
    os.write(reinterpret_cast<const char*>(batch.values.data()),
             static_cast<std::streamsize>(batch.values.size() * sizeof(double)));
    if (!os) throw ComputeError("write_batch: stream failure");
}

SampleBatch read_batch(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("read_batch: missing header line");
    Json header = Json::parse(line);
    SampleBatch batch;
    batch.dim = header.at("dim").get<int>();
    batch.n = header.at("n").get<std::size_t>();
    batch.seed = header.at("seed").get<std::uint64_t>();
    batch.provenance = header.value("provenance", "");
    if (batch.dim < 1) throw ValidationError("read_batch: bad dimension");
    batch.values.resize(batch.n * static_cast<std::size_t>(batch.dim));
    is.read(reinterpret_cast<char*>(batch.values.data()),
            static_cast<std::streamsize>(batch.values.size() * sizeof(double)));
    if (is.gcount() != static_cast<std::streamsize>(batch.values.size() * sizeof(double)))
        throw ValidationError("read_batch: truncated payload");
    return batch;
}

void write_batch_file(const std::string& path, const SampleBatch& batch) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ComputeError("write_batch_file: cannot open " + path);
    write_batch(os, batch);
}

SampleBatch read_batch_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("read_batch_file: cannot open " + path);
    return read_batch(is);
}

} // namespace tailinv
