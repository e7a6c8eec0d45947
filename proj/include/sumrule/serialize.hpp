#ifndef SUMRULE_SERIALIZE_HPP
#define SUMRULE_SERIALIZE_HPP

#include "json.hpp"

#include "sumrule/ensemble.hpp"
#include "sumrule/jacobi.hpp"
#include "sumrule/measure.hpp"
#include "sumrule/polynomial.hpp"
#include "sumrule/sumrule.hpp"

namespace sumrule {

// Wire formats:
//   Polynomial      -> bare JSON array of coefficients, lowest degree first
//   GridMeasure     -> {intervals: [[l,r],...], nodes: [[...],...],
//                       densities: [[...],...], mass}
//   MeasureModel    -> {ac: GridMeasure, atoms: [[position, weight],...],
//                       normalized}
//   JacobiSequence  -> {b: [...], a: [...]}

nlohmann::json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const nlohmann::json& j);

nlohmann::json grid_measure_to_json(const GridMeasure& g);
GridMeasure grid_measure_from_json(const nlohmann::json& j);

nlohmann::json measure_model_to_json(const MeasureModel& m);
MeasureModel measure_model_from_json(const nlohmann::json& j);

nlohmann::json jacobi_to_json(const JacobiSequence& r);
JacobiSequence jacobi_from_json(const nlohmann::json& j);

nlohmann::json sum_rule_report_to_json(const SumRuleReport& rep);
nlohmann::json gem_report_to_json(const GemReport& rep);

nlohmann::json ensemble_config_to_json(const EnsembleConfig& cfg);
EnsembleConfig ensemble_config_from_json(const nlohmann::json& j);

} // namespace sumrule

#endif
