#pragma once

#include <json.hpp>

#include "grushin/spectral.hpp"

namespace grushin {

inline nlohmann::json model_json(const GrushinModel& m) {
    if (m.is_winded()) return {{"family", "winded"}, {"n", m.winding()}};
    return {{"family", "alpha"}, {"alpha", m.alpha_value()}};
}

inline nlohmann::json quantization_json(const Quantization& q) {
    switch (q.kind) {
        case QuantKind::Intrinsic: return {{"kind", "intrinsic"}, {"c", q.c}};
        case QuantKind::Extrinsic: return {{"kind", "extrinsic"}};
        case QuantKind::WindedExtrinsic: return {{"kind", "winded_extrinsic"}};
    }
    return {};
}

inline const char* endpoint_side_name(EndpointSide side) {
    return side == EndpointSide::Lower ? "lower" : "upper";
}

inline const char* endpoint_nature_name(EndpointNature n) {
    switch (n) {
        case EndpointNature::RegularFinite: return "regular_finite";
        case EndpointNature::SingularFinite: return "singular_finite";
        case EndpointNature::Infinite: return "infinite";
    }
    return "?";
}

inline const char* weyl_class_name(WeylClass c) {
    return c == WeylClass::LimitPoint ? "limit_point" : "limit_circle";
}

inline nlohmann::json endpoint_class_json(const FiberOperator& f, EndpointSide side,
                                          const EndpointClass& cls) {
    nlohmann::json j{{"side", endpoint_side_name(side)},
                     {"position", f.endpoint_position(side)},
                     {"nature", endpoint_nature_name(f.endpoint_nature(side))},
                     {"class", weyl_class_name(cls.cls)},
                     {"borderline", cls.borderline},
                     {"evidence", criterion_name(cls.criterion)}};
    if (cls.gamma) j["gamma"] = *cls.gamma;
    if (cls.pole_coefficient) j["pole_coefficient"] = *cls.pole_coefficient;
    return j;
}

inline nlohmann::json classification_json(const FiberOperator& f, EndpointSide side) {
    const EndpointClass cls = classify_endpoint(f, side);
    nlohmann::json j{{"model", model_json(f.model)},
                     {"quantization", quantization_json(f.quant)},
                     {"k", f.k}};
    j["endpoint"] = endpoint_class_json(f, side, cls);
    // flat copies of the verdict fields
    j["class"] = weyl_class_name(cls.cls);
    j["evidence"] = criterion_name(cls.criterion);
    if (cls.gamma) j["gamma"] = *cls.gamma;
    if (cls.pole_coefficient) j["pole_coefficient"] = *cls.pole_coefficient;
    return j;
}

inline nlohmann::json weyl_evidence_json(const FiberOperator& f, EndpointSide side,
                                         const WeylEvidence& ev) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : ev.rows)
        rows.push_back({{"cutoff", r.cutoff},
                        {"mass_first", r.mass_first},
                        {"mass_second", r.mass_second}});
    const char* verdict = ev.verdict == WeylVerdict::LimitCircleEvidence ? "limit_circle_evidence"
                          : ev.verdict == WeylVerdict::LimitPointEvidence ? "limit_point_evidence"
                                                                          : "inconclusive";
    return {{"model", model_json(f.model)},
            {"quantization", quantization_json(f.quant)},
            {"k", f.k},
            {"endpoint", endpoint_side_name(side)},
            {"anchor", ev.anchor},
            {"rows", rows},
            {"status", ev.blew_up ? "partial_blowup" : "complete"},
            {"verdict", verdict}};
}

inline nlohmann::json deficiency_report_json(const GrushinModel& model, Quantization quant,
                                             int k_min, int k_max,
                                             const DeficiencyReport& rep) {
    nlohmann::json fibers = nlohmann::json::array();
    for (const auto& v : rep.fibers) {
        const FiberOperator f = make_fiber(model, quant, v.k);
        fibers.push_back({{"k", v.k},
                          {"lower", endpoint_class_json(f, EndpointSide::Lower, v.lower)},
                          {"upper", endpoint_class_json(f, EndpointSide::Upper, v.upper)},
                          {"deficiency", {v.deficiency, v.deficiency}}});
    }
    return {{"model", model_json(model)},
            {"quantization", quantization_json(quant)},
            {"k_range", {k_min, k_max}},
            {"fibers", fibers},
            {"essentially_self_adjoint", rep.essentially_self_adjoint},
            {"total_deficiency", {rep.total_deficiency, rep.total_deficiency}}};
}

}  // namespace grushin
