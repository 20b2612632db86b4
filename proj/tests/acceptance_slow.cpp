// Slow acceptance criterion: the bound-state part of the one-transmitted /
// two-reflected three-photon probability crosses zero exactly once, from
// below, as the coupling sweeps the full range.

#include <cstdarg>
#include <cmath>

#include "acceptance_common.hpp"
#include "wqed/fock.hpp"

using namespace wqed;
using wqed::acceptance::fmt;
using wqed::acceptance::Harness;

namespace {

bool rll_sign_change(std::string& detail) {
    QuadratureSpec q;
    const GaussianPacket pkt(10.0, 0.1);
    std::vector<double> vs, bs;
    for (double v = 0.05; v <= 1.0 + 1e-9; v += 0.05) {
        SystemParams p(10.0, v, 0.0);
        auto amps = combine_sectors(3, pkt, p, q);
        auto rll = single_sector_probability(amps[2], q);  // one right, two left
        vs.push_back(v);
        bs.push_back(rll.bs);
        std::printf("  V=%.2f  (P_RLL)_BS = %+.6f\n", v, rll.bs);
        std::fflush(stdout);
    }
    int changes = 0;
    bool first_negative = bs.front() < 0.0;
    for (size_t i = 1; i < bs.size(); ++i)
        if ((bs[i - 1] < 0.0) != (bs[i] < 0.0)) ++changes;
    detail = fmt("sign changes: %d (expect 1), starts %s (expect negative)", changes,
                 first_negative ? "negative" : "positive");
    return changes == 1 && first_negative && bs.back() > 0.0;
}

}  // namespace

int main() {
    Harness h;
    h.criterion(9, "three-photon bound part: suppression then enhancement", rll_sign_change);
    return h.exit_code();
}
