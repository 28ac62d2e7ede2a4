#include "pairing/serialize.hpp"

namespace pairing {

using nlohmann::json;

namespace {

json point_to_json(const Pt<FpElement>& P) {
    if (P.infinity) return json::array();
    return json::array({hex_str(P.x.value()), hex_str(P.y.value())});
}

json point_to_json(const Pt<ExtElement>& P) {
    if (P.infinity) return json::array();
    return json::array({element_to_json(P.x), element_to_json(P.y)});
}

std::string rational_str(const mpq_class& q) {
    if (q.get_den() == 1) return hex_str(q.get_num());
    return hex_str(q.get_num()) + "/" + hex_str(q.get_den());
}

mpq_class rational_parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return mpq_class(parse_hex(s));
    mpq_class q(parse_hex(s.substr(0, slash)), parse_hex(s.substr(slash + 1)));
    q.canonicalize();
    return q;
}

json poly_to_json(const RationalPoly& p) {
    json arr = json::array();
    for (const auto& c : p.coeffs()) arr.push_back(rational_str(c));
    return arr;
}

RationalPoly poly_from_json(const json& j) {
    std::vector<mpq_class> coeffs;
    for (const auto& c : j) coeffs.push_back(rational_parse(c.get<std::string>()));
    return RationalPoly(std::move(coeffs));
}

json vector_to_json(const OptimalVector& v) {
    json lam = json::array();
    for (const auto& l : v.lambda) lam.push_back(hex_str(l));
    return json{{"lambda", lam}, {"base", hex_str(v.base)}, {"m", hex_str(v.m)}};
}

OptimalVector vector_from_json(const json& j) {
    OptimalVector v;
    for (const auto& l : j.at("lambda")) v.lambda.push_back(parse_hex(l.get<std::string>()));
    v.base = parse_hex(j.at("base").get<std::string>());
    v.m = parse_hex(j.at("m").get<std::string>());
    return v;
}

}  // namespace

json element_to_json(const ExtElement& a) {
    json arr = json::array();
    for (const auto& c : a.coeffs()) arr.push_back(hex_str(c));
    return arr;
}

ExtElement element_from_json(const json& j, const ExtFieldSpec& spec) {
    std::vector<mpz_class> c;
    for (const auto& v : j) c.push_back(parse_hex(v.get<std::string>()));
    return ExtElement(spec, std::move(c));
}

json spec_to_json(const ExtFieldSpec& spec) {
    json out{{"p", hex_str(spec.p())},
             {"k", spec.k()},
             {"kind", modulus_kind_name(spec.kind())}};
    if (spec.kind() != ModulusKind::Generic) out["a"] = hex_str(spec.param_a());
    json mod = json::array();
    for (const auto& c : spec.modulus()) mod.push_back(hex_str(c));
    out["modulus"] = mod;
    return out;
}

std::shared_ptr<const ExtFieldSpec> spec_from_json(const json& j) {
    auto base = std::make_shared<const PrimeField>(parse_hex(j.at("p").get<std::string>()));
    unsigned k = j.at("k").get<unsigned>();
    std::string kind = j.at("kind").get<std::string>();
    std::vector<mpz_class> mod;
    for (const auto& c : j.at("modulus")) mod.push_back(parse_hex(c.get<std::string>()));
    ModulusKind mk = kind == "binomial"   ? ModulusKind::Binomial
                     : kind == "trinomial" ? ModulusKind::Trinomial
                                           : ModulusKind::Generic;
    return ExtFieldSpec::make(std::move(base), k, mk, std::move(mod));
}

json context_to_json(const PairingContext& ctx) {
    json out;
    out["family"] = ctx.family;
    out["x0"] = hex_str(ctx.x0);
    out["p"] = hex_str(ctx.p);
    out["r"] = hex_str(ctx.r);
    out["t"] = hex_str(ctx.t);
    out["k"] = ctx.k;
    out["d"] = ctx.d;
    out["e"] = ctx.e;
    out["h1"] = hex_str(ctx.h1);
    out["r_cofactor"] = hex_str(ctx.r_cofactor);
    out["curve"] = json{{"a", hex_str(ctx.E1.a.value())}, {"b", hex_str(ctx.E1.b.value())}};
    out["field"] = spec_to_json(*ctx.Fpk);
    if (ctx.has_twist) {
        out["twist"] = json{{"u", ctx.twist.u},
                            {"xi", element_to_json(ctx.twist.xi)},
                            {"a", element_to_json(ctx.twist.curve.a)},
                            {"b", element_to_json(ctx.twist.curve.b)},
                            {"order", hex_str(ctx.twist.order)}};
    }
    out["g1"] = point_to_json(ctx.g1);
    out["g2"] = point_to_json(ctx.g2);
    if (ctx.has_ate_vector) out["ate_vector"] = vector_to_json(ctx.ate_vec);
    if (ctx.has_twisted_vector) out["twisted_vector"] = vector_to_json(ctx.twisted_vec);
    return out;
}

std::unique_ptr<PairingContext> context_from_json(const json& j) {
    auto ctx = std::make_unique<PairingContext>();
    ctx->family = j.value("family", std::string());
    ctx->x0 = parse_hex(j.value("x0", std::string("0x0")));
    ctx->p = parse_hex(j.at("p").get<std::string>());
    ctx->r = parse_hex(j.at("r").get<std::string>());
    ctx->t = parse_hex(j.at("t").get<std::string>());
    ctx->k = j.at("k").get<unsigned>();
    ctx->d = j.at("d").get<unsigned>();
    ctx->e = j.at("e").get<unsigned>();
    ctx->h1 = parse_hex(j.at("h1").get<std::string>());
    ctx->r_cofactor = parse_hex(j.value("r_cofactor", std::string("0x1")));

    if (!is_probable_prime(ctx->p, 32)) throw InvalidContext("context: p not prime");
    if (!is_probable_prime(ctx->r, 32)) throw InvalidContext("context: r not prime");
    if ((ctx->p + 1 - ctx->t) % ctx->r != 0) throw InvalidContext("context: r | #E fails");
    if (ctx->t * ctx->t > 4 * ctx->p) throw InvalidContext("context: Hasse bound fails");

    ctx->Fpk = spec_from_json(j.at("field"));
    if (ctx->Fpk->p() != ctx->p || ctx->Fpk->k() != ctx->k)
        throw InvalidContext("context: field spec mismatch");
    ctx->Fp = ctx->Fpk->fp_ptr();

    const PrimeField& F = *ctx->Fp;
    FpElement a(F, parse_hex(j.at("curve").at("a").get<std::string>()));
    FpElement b(F, parse_hex(j.at("curve").at("b").get<std::string>()));
    ctx->E1 = CurveT<FpElement>::make(a, b);
    ctx->Ek = embed_curve(ctx->E1, *ctx->Fpk);

    if (j.contains("twist")) {
        const json& tw = j.at("twist");
        ctx->twist.u = tw.at("u").get<unsigned>();
        ctx->twist.xi = element_from_json(tw.at("xi"), *ctx->Fpk);
        ctx->twist.curve = CurveT<ExtElement>::make(element_from_json(tw.at("a"), *ctx->Fpk),
                                                    element_from_json(tw.at("b"), *ctx->Fpk));
        ctx->twist.order = parse_hex(tw.at("order").get<std::string>());
        ctx->has_twist = true;
    }

    const json& g1 = j.at("g1");
    ctx->g1 = Pt<FpElement>::make(ctx->E1, FpElement(F, parse_hex(g1.at(0).get<std::string>())),
                                  FpElement(F, parse_hex(g1.at(1).get<std::string>())));
    const json& g2 = j.at("g2");
    ctx->g2 = Pt<ExtElement>::make(ctx->Ek, element_from_json(g2.at(0), *ctx->Fpk),
                                   element_from_json(g2.at(1), *ctx->Fpk));
    if (!scalar_mul(ctx->r, ctx->g1, ctx->E1).infinity)
        throw InvalidContext("context: g1 is not r-torsion");
    if (!scalar_mul(ctx->r, ctx->g2, ctx->Ek).infinity)
        throw InvalidContext("context: g2 is not r-torsion");
    if (!(frobenius_point(ctx->g2, 1) == scalar_mul(ctx->p, ctx->g2, ctx->Ek)))
        throw InvalidContext("context: g2 eigenvalue is not q");

    if (j.contains("ate_vector")) {
        ctx->ate_vec = vector_from_json(j.at("ate_vector"));
        ctx->has_ate_vector = true;
        mpz_class acc = 0, bi = 1;
        for (const auto& l : ctx->ate_vec.lambda) {
            acc += l * bi;
            bi *= ctx->ate_vec.base;
        }
        if (acc != ctx->ate_vec.m * ctx->r) throw InvalidContext("context: bad ate vector");
    }
    if (j.contains("twisted_vector")) {
        ctx->twisted_vec = vector_from_json(j.at("twisted_vector"));
        ctx->has_twisted_vector = true;
    }
    return ctx;
}

json family_to_json(const CurveFamily& f) {
    json cong = json::array();
    for (const auto& r : f.cong.residues) cong.push_back(hex_str(r));
    return json{{"name", f.name},
                {"k", f.k},
                {"d", f.d},
                {"construction", f.construction},
                {"q", poly_to_json(f.q)},
                {"r", poly_to_json(f.r)},
                {"t", poly_to_json(f.t)},
                {"y", poly_to_json(f.y)},
                {"cm_d", f.cm_d},
                {"congruence", json{{"modulus", hex_str(f.cong.modulus)}, {"residues", cong}}},
                {"allow_r_cofactor", f.allow_r_cofactor},
                {"r_cofactor_bound", hex_str(f.r_cofactor_bound)},
                {"degrees", json::array({f.table_degrees[0], f.table_degrees[1],
                                         f.table_degrees[2]})}};
}

CurveFamily family_from_json(const json& j) {
    CurveFamily f;
    f.name = j.at("name").get<std::string>();
    f.k = j.at("k").get<unsigned>();
    f.d = j.at("d").get<unsigned>();
    f.construction = j.value("construction", std::string());
    f.q = poly_from_json(j.at("q"));
    f.r = poly_from_json(j.at("r"));
    f.t = poly_from_json(j.at("t"));
    f.y = poly_from_json(j.at("y"));
    f.cm_d = j.at("cm_d").get<unsigned>();
    f.cong.modulus = parse_hex(j.at("congruence").at("modulus").get<std::string>());
    f.cong.residues.clear();
    for (const auto& r : j.at("congruence").at("residues"))
        f.cong.residues.push_back(parse_hex(r.get<std::string>()));
    f.allow_r_cofactor = j.value("allow_r_cofactor", false);
    f.r_cofactor_bound = parse_hex(j.value("r_cofactor_bound", std::string("0x1")));
    const json& deg = j.at("degrees");
    f.table_degrees = {deg.at(0).get<int>(), deg.at(1).get<int>(), deg.at(2).get<int>()};
    FamilyReport rep = family_verify(f);
    if (!rep.all_ok()) throw InvalidContext("imported family fails verification: " + rep.detail);
    return f;
}

json catalog_to_json() {
    json out = json::array();
    for (const auto& f : family_catalog()) out.push_back(family_to_json(f));
    return out;
}

}  // namespace pairing
