#pragma once

#include "pairing/families.hpp"

// Shared toy instances, built once per test binary. Seeds are the smallest
// the families admit at desk scale.
namespace toyctx {

inline const pairing::PairingContext& bn() {  // p=103, r=97, t=7, k=12, d=6
    static auto ctx = pairing::instantiate(pairing::family_by_name("BN"), 1);
    return *ctx;
}

inline const pairing::PairingContext& e9() {  // p=4966939, r=87211, k=9, d=3
    static auto ctx = pairing::instantiate(pairing::family_by_name("E9"), 8);
    return *ctx;
}

inline const pairing::PairingContext& bls24() {  // p=4680007, r=390001, k=24, d=6
    static auto ctx = pairing::instantiate(pairing::family_by_name("BLS24"), -5);
    return *ctx;
}

inline const pairing::PairingContext& kss18() {  // p=14913518857, r=73819, k=18
    static auto ctx = pairing::instantiate(pairing::family_by_name("KSS18"), -28);
    return *ctx;
}

}  // namespace toyctx
