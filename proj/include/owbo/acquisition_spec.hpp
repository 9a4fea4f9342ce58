#pragma once

#include <stdexcept>
#include <string>

namespace owbo {

enum class AcqKind { pi, ei, lcb, lcb_lw, ivr, ivr_bo, ivr_lw, ivr_lwbo };

// Tagged acquisition choice plus its trade-off parameters. The
// minimize/maximize convention is a fixed property of the kind:
// PI, EI, IVR, IVR-LW are maximized; LCB, LCB-LW, IVR-BO, IVR-LWBO minimized.
struct AcquisitionSpec {
    AcqKind kind = AcqKind::ei;
    double xi = 0.01;    // improvement margin, PI/EI only
    double kappa = 1.0;  // exploration weight

    bool maximize() const {
        switch (kind) {
            case AcqKind::pi:
            case AcqKind::ei:
            case AcqKind::ivr:
            case AcqKind::ivr_lw:
                return true;
            default:
                return false;
        }
    }

    // kinds that evaluate the likelihood-ratio mixture
    bool weighted() const {
        return kind == AcqKind::lcb_lw || kind == AcqKind::ivr_lw ||
               kind == AcqKind::ivr_lwbo;
    }

    // kinds built on the integrated-variance form
    bool integral_family() const {
        return kind == AcqKind::ivr || kind == AcqKind::ivr_bo ||
               kind == AcqKind::ivr_lw || kind == AcqKind::ivr_lwbo;
    }

    // the same rule with the weight dropped (w == 1); identity for
    // already-unweighted kinds
    AcquisitionSpec unweighted() const {
        AcquisitionSpec s = *this;
        if (kind == AcqKind::lcb_lw) s.kind = AcqKind::lcb;
        if (kind == AcqKind::ivr_lw) s.kind = AcqKind::ivr;
        if (kind == AcqKind::ivr_lwbo) s.kind = AcqKind::ivr_bo;
        return s;
    }
};

inline std::string acq_name(AcqKind k) {
    switch (k) {
        case AcqKind::pi: return "pi";
        case AcqKind::ei: return "ei";
        case AcqKind::lcb: return "lcb";
        case AcqKind::lcb_lw: return "lcb-lw";
        case AcqKind::ivr: return "ivr";
        case AcqKind::ivr_bo: return "ivr-bo";
        case AcqKind::ivr_lw: return "ivr-lw";
        case AcqKind::ivr_lwbo: return "ivr-lwbo";
    }
    return "?";
}

inline AcqKind parse_acq(const std::string& s) {
    if (s == "pi") return AcqKind::pi;
    if (s == "ei") return AcqKind::ei;
    if (s == "lcb") return AcqKind::lcb;
    if (s == "lcb-lw") return AcqKind::lcb_lw;
    if (s == "ivr") return AcqKind::ivr;
    if (s == "ivr-bo") return AcqKind::ivr_bo;
    if (s == "ivr-lw") return AcqKind::ivr_lw;
    if (s == "ivr-lwbo") return AcqKind::ivr_lwbo;
    throw std::invalid_argument("unknown acquisition: " + s);
}

}  // namespace owbo
