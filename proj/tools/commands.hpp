#pragma once

#include <optional>
#include <string>

#include "fionf/fionf.hpp"

namespace fionf::cli {

struct options {
    int trunc = -1;
    int htrunc = -1;
    std::string field = "exact";
    double tol = 1e-10;
    std::string branch = "principal";
    std::string homotopy = "exp_sharp";
    std::string condition = "diagonal";
    int turns = 0;
};

// Name of the pipeline stage currently running, for error reports.
inline std::string current_stage;

inline void enter(const char* stage) { current_stage = stage; }

inline exp_model tau_model_of(const json& in)
{
    if (in.is_object() && in.contains("tau_model"))
        return model_from_json(in["tau_model"], "/tau_model");
    return {};
}

template <typename K>
json strip(json j)
{
    j.erase("schema");
    j.erase("field");
    return j;
}

template <typename K>
json jets_json(const std::vector<Jet<K>>& v)
{
    json a = json::array();
    for (const auto& x : v)
        a.push_back(strip<K>(jet_to_json(x)));
    return a;
}

inline json cplx_json(cplx c) { return codec<cplx>::encode(c); }

template <typename K>
json qnf_json(const QuadraticNormalForm<K>& q)
{
    json blocks = json::array();
    for (const auto& b : q.blocks) {
        json jb{{"kind", b.kind}, {"dofs", b.dofs}, {"actions", b.actions}, {"a", codec<K>::encode(b.a)}};
        if (b.kind == "loxodromic")
            jb["b"] = codec<K>::encode(b.b);
        blocks.push_back(jb);
    }
    return json{{"counts", {{"loxodromic", q.n_hc}, {"hyperbolic", q.n_hr}, {"elliptic", q.n_e}}},
                {"blocks", blocks},
                {"kappa0", strip<K>(matrix_to_json(q.kappa0))},
                {"normal", strip<K>(jet_to_json(q.normal))},
                {"residual", q.residual}};
}

// ---------------------------------------------------------------------------
// symlog

inline json symlog_float(const json& in, const options&)
{
    enter("symlog");
    const cmatrix a = matrix_from_json<cplx>(in.is_object() && in.contains("matrix") ? in["matrix"] : in,
                                             in.is_object() && in.contains("matrix") ? "/matrix" : "");
    Eigen::MatrixXd ar(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            if (a(i, j).imag() != 0.0)
                throw precondition_error("symlog: matrix must be real");
            ar(i, j) = a(i, j).real();
        }
    const LogResult r = symplectic_log(ar);
    json blocks = json::array();
    for (const auto& b : r.spectral.blocks) {
        json orbit = json::array();
        for (const auto& l : b.orbit)
            orbit.push_back(cplx_json(l));
        blocks.push_back({{"type", b.type},
                          {"lambda", cplx_json(b.lambda)},
                          {"mu", cplx_json(b.mu)},
                          {"orbit", orbit},
                          {"multiplicity", b.multiplicity},
                          {"jordan_blocks", b.jordan_blocks}});
    }
    return json{{"B", strip<cplx>(matrix_to_json(from_eigen(r.B)))},
                {"blocks", blocks},
                {"spectral", {{"prop_orthogonality", r.spectral.prop_orthogonality},
                              {"cluster_tol", r.spectral.cluster_tol},
                              {"cluster_rule", r.spectral.cluster_rule},
                              {"jordan_basis", r.spectral.jordan_basis}}},
                {"residuals", {{"exp", r.exp_residual}, {"jb", r.jb_residual}, {"jb_raw", r.jb_raw}, {"imag", r.imag_residual}}}};
}

inline json symlog_exact(const json& in, const options&)
{
    enter("symlog");
    const exp_model model = tau_model_of(in);
    const bool wrapped = in.is_object() && in.contains("matrix");
    const xmatrix a = matrix_from_json<exact>(wrapped ? in["matrix"] : in, wrapped ? "/matrix" : "");
    const ExactLogResult r = symplectic_log_exact(a, model);
    const xmatrix back = exp_exact(r, model);
    json out{{"B", strip<exact>(matrix_to_json(r.field))}, {"turns", strip<exact>(matrix_to_json(r.turns))},
             {"log", "B + 2 pi * turns"}, {"kinds", r.kinds}, {"components", r.components},
             {"residuals", {{"exp_exact", back == a ? 0 : 1}}}};
    return out;
}

// ---------------------------------------------------------------------------
// resonance

inline resonance_condition condition_of(const std::string& s)
{
    if (s == "map_log")
        return resonance_condition::map_log;
    if (s == "quantum")
        return resonance_condition::quantum;
    if (s == "diagonal")
        return resonance_condition::diagonal;
    throw schema_violation("/condition", "unknown condition '" + s + "'");
}

inline json resonance_report_json(const ResonanceReport& r)
{
    json v = json::array();
    for (const auto& x : r.violations)
        v.push_back({{"k", x.k}, {"degree", x.degree}, {"value", x.value}});
    json j{{"mu", r.mus}, {"degree_bound", r.degree_bound}, {"condition", condition_name(r.condition)},
           {"resonant", r.resonant()}, {"violations", v}};
    if (r.min_factor)
        j["min_factor"] = *r.min_factor;
    if (r.min_abs_sum)
        j["min_abs_sum"] = *r.min_abs_sum;
    return j;
}

inline json resonance_cmd(const json& in, const options& o, bool exact_field)
{
    enter("resonance");
    const json& mu = io::at(in, "mu", "");
    if (!mu.is_array() || mu.empty())
        throw schema_violation("/mu", "expected a nonempty array");
    int bound = o.trunc;
    if (in.contains("bound"))
        bound = io::get_int(in["bound"], "/bound");
    if (bound < 1)
        throw schema_violation("/bound", "missing degree bound (give \"bound\" or --trunc)");
    std::string cond = o.condition;
    if (in.contains("condition"))
        cond = in["condition"].is_string() ? in["condition"].get<std::string>() : "";
    const resonance_condition c = condition_of(cond);
    if (exact_field) {
        std::vector<exact_mu> ms;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            const std::string p = "/mu/" + std::to_string(i);
            const json& m = mu[i];
            if (!m.is_object())
                throw schema_violation(p, "expected an object");
            auto part = [&](const char* key) {
                if (!m.contains(key))
                    return rational(0);
                const json& x = m[key];
                if (x.is_string())
                    return io::parse_rational(x.get<std::string>(), p + "/" + key);
                if (x.is_number_integer())
                    return rational(x.get<long>());
                throw schema_violation(p + "/" + key, "expected an integer or a rational string");
            };
            ms.push_back({part("re"), part("im"), part("turns")});
        }
        return resonance_report_json(resonance_scan(ms, bound, c));
    }
    std::vector<cplx> ms;
    for (std::size_t i = 0; i < mu.size(); ++i)
        ms.push_back(codec<cplx>::decode(mu[i], "/mu/" + std::to_string(i)));
    return resonance_report_json(resonance_scan(ms, bound, c, std::max(o.tol, 1e-12)));
}

// ---------------------------------------------------------------------------
// maplog

template <typename K>
json maplog_cmd(const json& in, const options& o)
{
    enter("maplog");
    const exp_model model = tau_model_of(in);
    MapJet<K> kappa = map_from_json<K>(in.contains("map") ? in["map"] : in, in.contains("map") ? "/map" : "", o.trunc);
    if (o.trunc > 0)
        kappa = kappa.with_trunc(o.trunc);
    const MapLogResult<K> r = map_log(kappa, model, o.tol);
    return json{{"p", strip<K>(jet_to_json(r.p))},
                {"p0", strip<K>(jet_to_json(r.p0))},
                {"residual_by_degree", r.residual_by_degree},
                {"branch", r.branch},
                {"linear_origin", r.linear_origin}};
}

// ---------------------------------------------------------------------------
// bnf

template <typename K>
QuadraticNormalForm<K> normalize_of(const Jet<K>& p)
{
    enter("quadratic_normalize");
    return detail::normalize_quadratic(quadratic_part(p).with_trunc(2));
}

template <typename K>
json bnf_cmd(const json& in, const options& o)
{
    Jet<K> p = jet_from_json<K>(in.contains("p") ? in["p"] : in, in.contains("p") ? "/p" : "", o.trunc);
    if (p.has_h())
        throw schema_violation("/h_trunc", "bnf expects a classical jet");
    const int big_n = o.trunc > 0 ? o.trunc : p.trunc();
    p = p.with_trunc(big_n);
    const QuadraticNormalForm<K> q = normalize_of(p);
    const Jet<K> pn = Frame<K>::substitute(p, q.kappa0);
    enter("birkhoff_reduce");
    const BirkhoffResult<K> b = birkhoff_reduce(pn, big_n, o.tol);
    enter("to_actions");
    const Jet<K> f = to_actions(b.p0 + b.r, q, std::max(o.tol, 1e-9));
    const MapJet<K> kappa = compose(MapJet<K>::linear(q.kappa0, b.kappa.comp.at(0)), b.kappa);
    return json{{"quadratic", qnf_json(q)},
                {"kappa0", strip<K>(matrix_to_json(q.kappa0))},
                {"kappa", strip<K>(map_to_json(kappa))},
                {"p0", strip<K>(jet_to_json(b.p0))},
                {"r", strip<K>(jet_to_json(b.r))},
                {"generators", jets_json(b.generators)},
                {"F", action_jet_to_json(f)},
                {"actions", detail::action_names(q)},
                {"residuals", {{"identity", b.check}, {"quadratic", q.residual}}}};
}

// ---------------------------------------------------------------------------
// oplog

template <typename K>
FormalFIO<K> read_fio(const json& in, const options& o, const exp_model& model, json* stage_log)
{
    if (in.is_object() && in.contains("kappa") && !in.contains("p_ref")) {
        enter("map_log");
        const MapJet<K> kappa = map_from_json<K>(in["kappa"], "/kappa");
        const MapLogResult<K> ml = map_log(kappa, model, o.tol);
        if (stage_log)
            (*stage_log)["map_log"] = {{"p", strip<K>(jet_to_json(ml.p))}, {"residual_by_degree", ml.residual_by_degree}};
        json j = in;
        j["p_ref"] = strip<K>(jet_to_json(ml.p));
        return fio_from_json<K>(j, "", o.trunc);
    }
    return fio_from_json<K>(in, "", o.trunc);
}

template <typename K>
void orders_of(const FormalFIO<K>& u, const options& o, int& big_n, int& big_m)
{
    big_n = o.trunc > 0 ? o.trunc : std::max(u.p_ref.trunc(), u.amp.trunc() + 2);
    big_m = o.htrunc > 0 ? o.htrunc : u.amp.htrunc() + 1;
}

template <typename K>
json oplog_json(const OperatorLogResult<K>& r)
{
    return json{{"P", strip<K>(jet_to_json(r.P))},
                {"constant", codec<K>::encode(r.constant)},
                {"turns", r.turns},
                {"homotopy", r.homotopy},
                {"gauge", "h^1 constant real part in (-pi, pi]"},
                {"residual_by_weight", r.residual_by_weight},
                {"imag_discarded", r.imag_discarded}};
}

template <typename K>
json oplog_cmd(const json& in, const options& o)
{
    const exp_model model = tau_model_of(in);
    const FormalFIO<K> u = read_fio<K>(in, o, model, nullptr);
    int big_n = 0, big_m = 0;
    orders_of(u, o, big_n, big_m);
    enter("operator_log");
    if constexpr (!scalar_traits<K>::is_exact) {
        if (o.homotopy == "linear" || o.turns != 0) {
            const homotopy_kind h = o.homotopy == "linear" ? homotopy_kind::linear : homotopy_kind::exp_sharp;
            return oplog_json(operator_log_along(u, big_n, big_m, h, o.turns, model, o.tol));
        }
    }
    else if (o.homotopy != "exp_sharp" || o.turns != 0)
        throw precondition_error("oplog: --homotopy/--turns need the float field");
    return oplog_json(operator_log(u, big_n, big_m, model, o.tol));
}

// ---------------------------------------------------------------------------
// qbnf

template <typename K>
json quantum_json(const QuantumBNF<K>& r)
{
    return json{{"Q", strip<K>(jet_to_json(r.Q))},
                {"R", strip<K>(jet_to_json(r.R))},
                {"P0", strip<K>(jet_to_json(r.P0))},
                {"residuals", {{"conjugation", r.check}, {"commutator", r.commutator}}}};
}

template <typename K>
json actions_layers(const Jet<K>& nf, const QuadraticNormalForm<K>& q, int big_m, double tol)
{
    enter("to_actions");
    json f = json::array();
    for (int j = 0; j <= big_m; ++j)
        f.push_back(action_jet_to_json(to_actions(nf.layer(j), q, tol)));
    return f;
}

template <typename K>
json qbnf_cmd(const json& in, const options& o)
{
    Jet<K> p = jet_from_json<K>(in.contains("P") ? in["P"] : in, in.contains("P") ? "/P" : "", o.trunc, o.htrunc, true);
    if (o.trunc > 0 || o.htrunc > 0)
        p = p.with_trunc(o.trunc > 0 ? o.trunc : p.trunc(), o.htrunc > 0 ? o.htrunc : p.htrunc());
    const QuadraticNormalForm<K> q = normalize_of(p.layer(0));
    const Jet<K> pn = Frame<K>::substitute(p, q.kappa0);
    enter("quantum_bnf");
    const QuantumBNF<K> r = quantum_bnf(pn, o.tol);
    json out = quantum_json(r);
    out["quadratic"] = qnf_json(q);
    out["F"] = actions_layers(r.P0 + r.R, q, p.htrunc(), std::max(o.tol, 1e-9));
    out["actions"] = detail::action_names(q);
    return out;
}

// ---------------------------------------------------------------------------
// pipeline

template <typename K>
json pipeline_cmd(const json& in, const options& o)
{
    const exp_model model = tau_model_of(in);
    json stages = json::object();
    const FormalFIO<K> u = read_fio<K>(in, o, model, &stages);
    int big_n = 0, big_m = 0;
    orders_of(u, o, big_n, big_m);
    const NormalFormReport<K> rep = fio_normal_form(u, big_n, big_m, model, o.tol, &current_stage);
    stages["operator_log"] = oplog_json(rep.log);
    stages["quadratic"] = qnf_json(rep.qnf);
    stages["birkhoff"] = {{"r", strip<K>(jet_to_json(rep.birkhoff.r))},
                          {"generators", jets_json(rep.birkhoff.generators)},
                          {"residual", rep.birkhoff.check}};
    stages["quantum_bnf"] = quantum_json(rep.quantum);
    json f = json::array();
    for (const auto& x : rep.F)
        f.push_back(action_jet_to_json(x));
    return json{{"F", f},
                {"actions", rep.actions},
                {"gauge", {{"h1_constant", codec<K>::encode(rep.log.constant)}, {"turns", rep.log.turns}, {"rule", "(-pi, pi]"}}},
                {"stages", stages}};
}

} // namespace fionf::cli
