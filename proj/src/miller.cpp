#include "pairing/miller.hpp"

namespace pairing {

const char* miller_variant_name(MillerVariant v) {
    switch (v) {
        case MillerVariant::DoubleAdd: return "double-add";
        case MillerVariant::Naf: return "naf";
        case MillerVariant::BoxallDoubleAdd: return "boxall-double-add";
        case MillerVariant::BoxallNaf: return "boxall-naf";
    }
    return "?";
}

}  // namespace pairing
