#pragma once

#include <string>
#include <vector>

#include "wqed/smatrix.hpp"

// Transmission/reflection probabilities of 1..3-photon Fock wavepackets,
// split into the plane-wave (independent-photon) part and the bound-state
// part.  The bound part is total - pw, so the decomposition is exact by
// construction; the cross-term integral is available separately for
// diagnostics.

namespace wqed {

struct SectorResult {
    SectorLabel label;
    double total = 0.0;
    double pw = 0.0;
    double bs = 0.0;          // total - pw
    double err_total = 0.0;
    double err_pw = 0.0;
    bool flagged = false;
    std::string note;
};

struct SectorProbabilities {
    int n = 0;
    std::vector<SectorResult> sectors;  // ordered all-R .. all-L
    bool flagged = false;
    std::string note;

    double sum_total() const {
        double s = 0.0;
        for (const auto& r : sectors) s += r.total;
        return s;
    }
    const SectorResult& operator[](const std::string& name) const;
};

SectorProbabilities prob_one(const GaussianPacket& pkt, const SystemParams& p,
                             const QuadratureSpec& q);
SectorProbabilities prob_two(const GaussianPacket& pkt, const SystemParams& p,
                             const QuadratureSpec& q);
SectorProbabilities prob_three(const GaussianPacket& pkt, const SystemParams& p,
                               const QuadratureSpec& q);
SectorProbabilities fock_probabilities(int n, const GaussianPacket& pkt,
                                       const SystemParams& p, const QuadratureSpec& q);

// diagnostic: the interference + |cluster|^2 integral of one sector,
// normally folded into bs = total - pw
double sector_cross_term(const OutputAmplitude& amp, const QuadratureSpec& q);

// probabilities of a single outcome sector (used by sweeps that only
// need one sector)
SectorResult single_sector_probability(const OutputAmplitude& amp, const QuadratureSpec& q);

struct SweepRow {
    double v = 0.0;
    SectorLabel label;
    double total = 0.0, pw = 0.0, bs = 0.0, err = 0.0;
    bool flagged = false;
    std::string note;
};

enum class SweepKind { one, two, three };

// Evaluate the requested probabilities over a coupling grid.  Rows come
// out in grid order, sectors all-R first.  Per-point failures are
// recorded in the row and the sweep continues.
std::vector<SweepRow> sweep(SweepKind kind, const std::vector<double>& v_grid,
                            double delta, double epsilon, double gamma_prime,
                            const QuadratureSpec& q, int threads = 0);

// worker count for parallel sweeps, capped by the WQED_THREADS env var
int worker_threads();

}  // namespace wqed
