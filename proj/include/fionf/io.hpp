#pragma once

// JSON codecs for scalars, matrices, jets, maps and formal FIOs.
//
// Exact numbers are rational pairs {"num","den"} with optional imaginary
// pair {"inum","iden"}; tau-dependent values carry {"tau":{"num":[..],"den":[..]}}
// with gaussian coefficient lists, low degree first. Float numbers are
// {"re","im"} (a bare JSON number is also accepted on input).

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fionf/errors.hpp"
#include "fionf/expmodel.hpp"
#include "fionf/jet.hpp"
#include "fionf/matrix.hpp"
#include "fionf/scalar.hpp"
#include "fionf/weylq.hpp"

namespace fionf {

using json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "1";

struct schema_violation : schema_error {
    std::string pointer;
    schema_violation(std::string ptr, const std::string& msg) : schema_error(ptr + ": " + msg), pointer(std::move(ptr)) {}
};

namespace io {

inline const json& at(const json& j, const std::string& key, const std::string& ptr)
{
    if (!j.is_object())
        throw schema_violation(ptr, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
        throw schema_violation(ptr + "/" + key, "missing");
    return *it;
}

inline int get_int(const json& j, const std::string& ptr)
{
    if (!j.is_number_integer())
        throw schema_violation(ptr, "expected an integer");
    return j.get<int>();
}

inline double get_double(const json& j, const std::string& ptr)
{
    if (!j.is_number())
        throw schema_violation(ptr, "expected a number");
    return j.get<double>();
}

// integer literal as number or decimal string
inline rational get_rational_part(const json& j, const std::string& ptr)
{
    try {
        if (j.is_number_integer())
            return rational(j.get<long>());
        if (j.is_string()) {
            rational r(j.get<std::string>(), 10);
            if (sgn(r.get_den()) != 0) {
                r.canonicalize();
                return r;
            }
        }
    }
    catch (const std::invalid_argument&) {
    }
    throw schema_violation(ptr, "expected an integer or an integer string");
}

inline rational get_rational(const json& j, const std::string& num, const std::string& den, const std::string& ptr)
{
    rational p = get_rational_part(at(j, num, ptr), ptr + "/" + num);
    rational q = j.contains(den) ? get_rational_part(j[den], ptr + "/" + den) : rational(1);
    if (sgn(q) == 0)
        throw schema_violation(ptr + "/" + den, "zero denominator");
    rational r = p / q;
    r.canonicalize();
    return r;
}

// "p/q" or "p"
inline rational parse_rational(const std::string& s, const std::string& ptr)
{
    try {
        rational r(s, 10);
        if (sgn(r.get_den()) == 0)
            throw schema_violation(ptr, "zero denominator");
        r.canonicalize();
        return r;
    }
    catch (const std::invalid_argument&) {
        throw schema_violation(ptr, "bad rational '" + s + "'");
    }
}

inline json rational_json(const rational& r, const char* num = "num", const char* den = "den")
{
    json j;
    j[num] = r.get_num().get_str();
    j[den] = r.get_den().get_str();
    return j;
}

inline json gauss_json(const gauss& g)
{
    json j = rational_json(g.re);
    if (sgn(g.im) != 0) {
        j["inum"] = g.im.get_num().get_str();
        j["iden"] = g.im.get_den().get_str();
    }
    return j;
}

inline gauss gauss_from(const json& j, const std::string& ptr)
{
    if (j.is_string())
        return gauss(parse_rational(j.get<std::string>(), ptr));
    if (j.is_number_integer())
        return gauss(rational(j.get<long>()));
    gauss g(get_rational(j, "num", "den", ptr));
    if (j.contains("inum"))
        g.im = get_rational(j, "inum", "iden", ptr);
    return g;
}

inline json gpoly_json(const gpoly& p)
{
    json a = json::array();
    for (const auto& c : p.coeffs())
        a.push_back(gauss_json(c));
    return a;
}

inline gpoly gpoly_from(const json& j, const std::string& ptr)
{
    if (!j.is_array())
        throw schema_violation(ptr, "expected an array");
    gpoly p;
    for (std::size_t d = 0; d < j.size(); ++d)
        p = p + gpoly::monomial(static_cast<int>(d), gauss_from(j[d], ptr + "/" + std::to_string(d)));
    return p;
}

} // namespace io

template <typename K>
struct codec;

template <>
struct codec<cplx> {
    static constexpr const char* field = "float";
    static json encode(const cplx& c) { return json{{"re", c.real() + 0.0}, {"im", c.imag() + 0.0}}; }
    static cplx decode(const json& j, const std::string& ptr)
    {
        if (j.is_number())
            return {j.get<double>(), 0.0};
        if (j.is_object() && (j.contains("num") || j.contains("tau")))
            return decode_exact_as_float(j, ptr);
        const double re = io::get_double(io::at(j, "re", ptr), ptr + "/re");
        const double im = j.contains("im") ? io::get_double(j["im"], ptr + "/im") : 0.0;
        return {re, im};
    }
    static cplx decode_exact_as_float(const json& j, const std::string& ptr)
    {
        if (j.contains("tau"))
            throw schema_violation(ptr + "/tau", "tau-dependent value in the float field");
        return io::gauss_from(j, ptr).to_cplx();
    }
};

template <>
struct codec<exact> {
    static constexpr const char* field = "exact";
    static json encode(const exact& c)
    {
        if (c.is_constant())
            return io::gauss_json(c.constant());
        json j;
        j["tau"] = json{{"num", io::gpoly_json(c.num())}, {"den", io::gpoly_json(c.den())}};
        return j;
    }
    static exact decode(const json& j, const std::string& ptr)
    {
        if (j.is_object() && j.contains("tau")) {
            const json& t = j["tau"];
            gpoly num = io::gpoly_from(io::at(t, "num", ptr + "/tau"), ptr + "/tau/num");
            gpoly den = t.contains("den") ? io::gpoly_from(t["den"], ptr + "/tau/den") : gpoly(gauss(1));
            if (den.is_zero())
                throw schema_violation(ptr + "/tau/den", "zero denominator");
            return exact(std::move(num), std::move(den));
        }
        if (j.is_number_float() || (j.is_object() && j.contains("re")))
            throw schema_violation(ptr, "float value in the exact field");
        return exact(io::gauss_from(j, ptr));
    }
};

// ---------------------------------------------------------------------------

template <typename K>
json matrix_to_json(const Matrix<K>& m)
{
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (int j = 0; j < m.cols(); ++j)
            r.push_back(codec<K>::encode(m(i, j)));
        rows.push_back(r);
    }
    return json{{"schema", std::string("fionf.matrix/") + schema_version}, {"field", codec<K>::field},
                {"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

// {"data": [[...], ...]} or a bare array of rows
template <typename K>
Matrix<K> matrix_from_json(const json& j, const std::string& ptr = "")
{
    const json& d = j.is_array() ? j : io::at(j, "data", ptr);
    const std::string dp = j.is_array() ? ptr : ptr + "/data";
    if (!d.is_array() || d.empty() || !d[0].is_array())
        throw schema_violation(dp, "expected a nonempty array of rows");
    const int r = static_cast<int>(d.size());
    const int c = static_cast<int>(d[0].size());
    Matrix<K> m(r, c);
    for (int i = 0; i < r; ++i) {
        const std::string rp = dp + "/" + std::to_string(i);
        if (!d[static_cast<std::size_t>(i)].is_array() || static_cast<int>(d[static_cast<std::size_t>(i)].size()) != c)
            throw schema_violation(rp, "ragged row");
        for (int k = 0; k < c; ++k)
            m(i, k) = codec<K>::decode(d[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], rp + "/" + std::to_string(k));
    }
    return m;
}

template <typename K>
json jet_to_json(const Jet<K>& a)
{
    json terms = json::array();
    for (const auto& [k, c] : a.terms()) {
        json e = json::array();
        for (int v = 0; v < a.nrho(); ++v)
            e.push_back(key_exp(k, v));
        json t{{"exp", e}};
        if (a.has_h())
            t["h"] = a.hpow(k);
        const json cj = codec<K>::encode(c);
        for (auto it = cj.begin(); it != cj.end(); ++it)
            t[it.key()] = it.value();
        terms.push_back(t);
    }
    json j{{"schema", std::string("fionf.jet/") + schema_version}, {"field", codec<K>::field}, {"n", a.n_dof()}, {"trunc", a.trunc()}};
    if (a.has_h())
        j["h_trunc"] = a.htrunc();
    j["terms"] = terms;
    return j;
}

// Missing "trunc"/"h_trunc" fall back to the given defaults; force_h lifts a
// classical jet to an h-jet.
template <typename K>
Jet<K> jet_from_json(const json& j, const std::string& ptr = "", int def_trunc = -1, int def_htrunc = -1, bool force_h = false)
{
    const int n = io::get_int(io::at(j, "n", ptr), ptr + "/n");
    if (n < 1 || 2 * n + 1 > max_vars)
        throw schema_violation(ptr + "/n", "degrees of freedom must be 1..3");
    int trunc = def_trunc;
    if (j.contains("trunc"))
        trunc = io::get_int(j["trunc"], ptr + "/trunc");
    const bool has_h = force_h || j.contains("h_trunc");
    int htrunc = def_htrunc;
    if (j.contains("h_trunc"))
        htrunc = io::get_int(j["h_trunc"], ptr + "/h_trunc");
    const json& terms = io::at(j, "terms", ptr);
    if (!terms.is_array())
        throw schema_violation(ptr + "/terms", "expected an array");
    if (trunc < 0) {
        trunc = 0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            int w = 0;
            const json& t = terms[i];
            if (t.contains("exp") && t["exp"].is_array())
                for (const auto& x : t["exp"])
                    w += x.is_number_integer() ? x.get<int>() : 0;
            if (t.contains("h") && t["h"].is_number_integer())
                w += 2 * t["h"].get<int>();
            trunc = std::max(trunc, w);
        }
    }
    if (has_h && htrunc < 0)
        htrunc = trunc / 2;
    Jet<K> a = has_h ? Jet<K>::semiclassical(n, trunc, htrunc) : Jet<K>::phase(n, trunc);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string tp = ptr + "/terms/" + std::to_string(i);
        const json& t = terms[i];
        const json& e = io::at(t, "exp", tp);
        if (!e.is_array() || static_cast<int>(e.size()) != 2 * n)
            throw schema_violation(tp + "/exp", "expected " + std::to_string(2 * n) + " exponents");
        expvec ev{};
        for (int v = 0; v < 2 * n; ++v) {
            ev[static_cast<std::size_t>(v)] = io::get_int(e[static_cast<std::size_t>(v)], tp + "/exp/" + std::to_string(v));
            if (ev[static_cast<std::size_t>(v)] < 0)
                throw schema_violation(tp + "/exp/" + std::to_string(v), "negative exponent");
        }
        if (t.contains("h")) {
            if (!has_h)
                throw schema_violation(tp + "/h", "h power in a classical jet");
            ev[static_cast<std::size_t>(2 * n)] = io::get_int(t["h"], tp + "/h");
        }
        const mkey k = a.key(ev);
        if (!a.admissible(k))
            continue;
        a.add_term(k, codec<K>::decode(t, tp));
    }
    return a;
}

// Polynomial in the action variables iota_1..iota_k.
template <typename K>
json action_jet_to_json(const Jet<K>& a)
{
    json terms = json::array();
    for (const auto& [k, c] : a.terms()) {
        json e = json::array();
        for (int v = 0; v < a.nv(); ++v)
            e.push_back(key_exp(k, v));
        json t{{"exp", e}};
        const json cj = codec<K>::encode(c);
        for (auto it = cj.begin(); it != cj.end(); ++it)
            t[it.key()] = it.value();
        terms.push_back(t);
    }
    return json{{"actions", a.nv()}, {"trunc", a.trunc()}, {"terms", terms}};
}

template <typename K>
json map_to_json(const MapJet<K>& m)
{
    json c = json::array();
    for (const auto& x : m.comp) {
        json jj = jet_to_json(x);
        jj.erase("schema");
        jj.erase("field");
        c.push_back(jj);
    }
    return json{{"schema", std::string("fionf.map/") + schema_version}, {"field", codec<K>::field}, {"n", m.n_dof()},
                {"trunc", m.trunc()}, {"components", c}};
}

template <typename K>
MapJet<K> map_from_json(const json& j, const std::string& ptr = "", int def_trunc = -1)
{
    const int n = io::get_int(io::at(j, "n", ptr), ptr + "/n");
    int trunc = def_trunc;
    if (j.contains("trunc"))
        trunc = io::get_int(j["trunc"], ptr + "/trunc");
    const json& c = io::at(j, "components", ptr);
    if (!c.is_array() || static_cast<int>(c.size()) != 2 * n)
        throw schema_violation(ptr + "/components", "expected " + std::to_string(2 * n) + " components");
    MapJet<K> m;
    std::vector<Jet<K>> parts;
    int t = trunc;
    for (std::size_t i = 0; i < c.size(); ++i) {
        json ci = c[i];
        if (!ci.contains("n"))
            ci["n"] = n;
        parts.push_back(jet_from_json<K>(ci, ptr + "/components/" + std::to_string(i), trunc));
        t = std::max(t, parts.back().trunc());
    }
    for (auto& p : parts)
        m.comp.push_back(p.with_trunc(t));
    return m;
}

inline json model_to_json(const exp_model& m)
{
    json j{{"kind", m.name()}};
    if (m.type() != exp_model::kind::none)
        j["param"] = m.param().get_str();
    return j;
}

inline exp_model model_from_json(const json& j, const std::string& ptr)
{
    const json& k = io::at(j, "kind", ptr);
    if (!k.is_string())
        throw schema_violation(ptr + "/kind", "expected a string");
    const std::string s = k.get<std::string>();
    if (s == "none")
        return {};
    const json& p = io::at(j, "param", ptr);
    const rational r = p.is_string() ? io::parse_rational(p.get<std::string>(), ptr + "/param") : io::gauss_from(p, ptr + "/param").re;
    try {
        if (s == "exp_base")
            return exp_model::exp_base(r);
        if (s == "log_base")
            return exp_model::log_base(r);
    }
    catch (const precondition_error& e) {
        throw schema_violation(ptr + "/param", e.what());
    }
    throw schema_violation(ptr + "/kind", "unknown model '" + s + "'");
}

template <typename K>
json fio_to_json(const FormalFIO<K>& u)
{
    json p = jet_to_json(u.p_ref), a = jet_to_json(u.amp);
    p.erase("schema");
    a.erase("schema");
    return json{{"schema", std::string("fionf.fio/") + schema_version}, {"field", codec<K>::field}, {"p_ref", p}, {"amp", a}};
}

template <typename K>
FormalFIO<K> fio_from_json(const json& j, const std::string& ptr = "", int def_trunc = -1, int def_htrunc = -1)
{
    FormalFIO<K> u;
    u.p_ref = jet_from_json<K>(io::at(j, "p_ref", ptr), ptr + "/p_ref", def_trunc);
    if (u.p_ref.has_h())
        throw schema_violation(ptr + "/p_ref", "p_ref must be classical");
    u.amp = jet_from_json<K>(io::at(j, "amp", ptr), ptr + "/amp", -1, def_htrunc, true);
    if (u.amp.n_dof() != u.p_ref.n_dof())
        throw schema_violation(ptr + "/amp/n", "amplitude and phase disagree on n");
    return u;
}

} // namespace fionf
