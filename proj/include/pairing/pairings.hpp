#pragma once

#include <functional>

#include "pairing/miller.hpp"

namespace pairing {

// Flag selection for a context: denominator elimination when k is even and
// x(g2) lies in F_{p^{k/2}}, the l' speedup for odd k.
MillerFlags default_flags(const PairingContext& ctx);
bool denominator_elimination_allowed(const PairingContext& ctx);

// The six pairings. P in G1 (order r, eigenvalue 1), Q in G2 (order r,
// eigenvalue q). All reduced variants return elements of mu_r.
ExtElement weil(const PairingContext& ctx, const Pt<FpElement>& P, const Pt<ExtElement>& Q,
                MillerVariant variant = MillerVariant::Naf);
ExtElement tate_reduced(const PairingContext& ctx, const Pt<FpElement>& P,
                        const Pt<ExtElement>& Q, MillerVariant variant = MillerVariant::Naf);
ExtElement ate(const PairingContext& ctx, const Pt<FpElement>& P, const Pt<ExtElement>& Q,
               MillerVariant variant = MillerVariant::Naf);
ExtElement twisted_ate(const PairingContext& ctx, const Pt<FpElement>& P, const Pt<ExtElement>& Q,
                       bool reduce_multiplier = false, MillerVariant variant = MillerVariant::Naf);
ExtElement optimal_ate(const PairingContext& ctx, const Pt<FpElement>& P, const Pt<ExtElement>& Q,
                       const OptimalVector& v);
ExtElement optimal_twisted(const PairingContext& ctx, const Pt<FpElement>& P,
                           const Pt<ExtElement>& Q, const OptimalVector& v);

// Unreduced function evaluations for the timing harness (Miller part only).
FunctionValue weil_unreduced(const PairingContext& ctx, const Pt<FpElement>& P,
                             const Pt<ExtElement>& Q, MillerVariant variant);
FunctionValue tate_unreduced(const PairingContext& ctx, const Pt<FpElement>& P,
                             const Pt<ExtElement>& Q, MillerVariant variant);
FunctionValue ate_unreduced(const PairingContext& ctx, const Pt<FpElement>& P,
                            const Pt<ExtElement>& Q, MillerVariant variant);
FunctionValue twisted_ate_unreduced(const PairingContext& ctx, const Pt<FpElement>& P,
                                    const Pt<ExtElement>& Q, bool reduce_multiplier,
                                    MillerVariant variant);
FunctionValue optimal_ate_unreduced(const PairingContext& ctx, const Pt<FpElement>& P,
                                    const Pt<ExtElement>& Q, const OptimalVector& v,
                                    MillerVariant variant);
FunctionValue optimal_twisted_unreduced(const PairingContext& ctx, const Pt<FpElement>& P,
                                        const Pt<ExtElement>& Q, const OptimalVector& v,
                                        MillerVariant variant);

enum class VectorForm { Ate, Twisted };

// LLL with exact rational Gram-Schmidt, delta = 0.99.
std::vector<std::vector<mpz_class>> lll_reduce(std::vector<std::vector<mpz_class>> basis,
                                               const mpq_class& delta = mpq_class(99, 100));

// Short vector with sum lambda_i base^i = m r, r not dividing m, and a
// non-degenerate pairing on the context generators. Candidates are ranked by
// Miller-loop cost, then infinity norm, then lexicographically.
OptimalVector find_optimal_vector(const PairingContext& ctx, VectorForm form);

using PairingFn =
    std::function<ExtElement(const Pt<FpElement>&, const Pt<ExtElement>&)>;

struct VerifyReport {
    bool bilinear = true;
    bool in_mu_r = true;
    bool nondegenerate = true;
    unsigned trials = 0;
    std::string detail;

    bool all_ok() const { return bilinear && in_mu_r && nondegenerate; }
};

// e(aP, bQ) = e(P, Q)^{ab}, e^r = 1, e != 1 over `trials` random scalar pairs.
VerifyReport verify_pairing(const PairingFn& e, const PairingContext& ctx, unsigned trials,
                            std::uint64_t seed = 7);

// Name dispatch: weil | tate | ate | twisted-ate | optimal-ate | optimal-twisted.
PairingFn pairing_by_name(const PairingContext& ctx, const std::string& name);
std::vector<std::string> pairing_names(const PairingContext& ctx);  // the applicable set

}  // namespace pairing
