#include "sumrule/serialize.hpp"

namespace sumrule {

using nlohmann::json;

json polynomial_to_json(const Polynomial& p) {
    return json(p.coeffs());
}

Polynomial polynomial_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("polynomial: expected a JSON array of coefficients");
    return Polynomial(j.get<std::vector<double>>());
}

json grid_measure_to_json(const GridMeasure& g) {
    json intervals = json::array();
    for (const auto& [l, r] : g.support.intervals) intervals.push_back({l, r});
    return json{{"intervals", intervals},
                {"nodes", g.nodes},
                {"densities", g.densities},
                {"mass", g.mass}};
}

GridMeasure grid_measure_from_json(const json& j) {
    GridMeasure g;
    for (const auto& iv : j.at("intervals"))
        g.support.intervals.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
    g.nodes = j.at("nodes").get<std::vector<std::vector<double>>>();
    g.densities = j.at("densities").get<std::vector<std::vector<double>>>();
    g.mass = j.at("mass").get<double>();
    g.validate();
    return g;
}

json measure_model_to_json(const MeasureModel& m) {
    json atoms = json::array();
    for (const Atom& a : m.atoms) atoms.push_back({a.position, a.weight});
    return json{{"ac", grid_measure_to_json(m.ac)}, {"atoms", atoms}, {"normalized", m.normalized}};
}

MeasureModel measure_model_from_json(const json& j) {
    MeasureModel m;
    m.ac = grid_measure_from_json(j.at("ac"));
    for (const auto& a : j.at("atoms"))
        m.atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
    m.normalized = j.at("normalized").get<bool>();
    m.validate();
    return m;
}

json jacobi_to_json(const JacobiSequence& r) {
    return json{{"b", r.b}, {"a", r.a}};
}

JacobiSequence jacobi_from_json(const json& j) {
    JacobiSequence r;
    r.b = j.at("b").get<std::vector<double>>();
    r.a = j.at("a").get<std::vector<double>>();
    r.validate();
    return r;
}

json sum_rule_report_to_json(const SumRuleReport& rep) {
    json u = json::array();
    for (size_t i = 0; i < rep.U.size(); ++i)
        u.push_back(rep.U_finite[i] ? json(rep.U[i]) : json("inf"));
    json j{{"U", u},
           {"boundary_terms", rep.boundary_terms},
           {"m_plus", rep.m_plus_terms},
           {"corridor", rep.corridor},
           {"C_KV", rep.C_KV},
           {"cut_count", rep.cut_count},
           {"tol_eq", rep.tol_eq},
           {"verdict", to_string(rep.verdict)}};
    j["spectral_kl"] = rep.spectral_kl.is_finite() ? json(rep.spectral_kl.value()) : json("inf");
    j["outlier_sum"] = rep.outlier_sum.is_finite() ? json(rep.outlier_sum.value()) : json("inf");
    j["spectral_total"] =
        rep.spectral_total.is_finite() ? json(rep.spectral_total.value()) : json("inf");
    return j;
}

json gem_report_to_json(const GemReport& rep) {
    return json{{"in_S1", rep.in_S1},
                {"outlier_sum_finite", rep.outlier_sum_finite},
                {"szego_finite", rep.szego_finite},
                {"coefficient_bounded", rep.coefficient_bounded},
                {"consistent", rep.consistent},
                {"outlier_sum", rep.outlier_sum},
                {"szego_integral", rep.szego_integral},
                {"sup_U", rep.sup_U}};
}

json ensemble_config_to_json(const EnsembleConfig& cfg) {
    return json{{"n", cfg.n},
                {"beta", cfg.beta},
                {"potential", polynomial_to_json(cfg.V)},
                {"sampler", to_string(cfg.sampler)},
                {"steps", cfg.steps},
                {"burn_in", cfg.burn_in},
                {"step_scale", cfg.step_scale},
                {"seed", cfg.seed},
                {"self_check", cfg.self_check}};
}

EnsembleConfig ensemble_config_from_json(const json& j) {
    EnsembleConfig cfg;
    cfg.n = j.at("n").get<int>();
    cfg.beta = j.at("beta").get<double>();
    cfg.V = polynomial_from_json(j.at("potential"));
    cfg.sampler = sampler_from_string(j.at("sampler").get<std::string>());
    cfg.steps = j.at("steps").get<long>();
    cfg.burn_in = j.at("burn_in").get<long>();
    cfg.step_scale = j.value("step_scale", 1.0);
    cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));
    cfg.self_check = j.value("self_check", false);
    cfg.validate();
    return cfg;
}

} // namespace sumrule
