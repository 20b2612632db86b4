#include "wqed/fock.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace wqed {

namespace {

struct Integrals {
    double total, pw, err_total, err_pw;
    bool converged;
};

Integrals sector_integrals(const OutputAmplitude& amp, const QuadratureSpec& q) {
    const auto& ctx = amp.kernels();
    const int n = amp.sector().n;
    const double k0 = ctx.packet().k0;
    const double w = ctx.sector_window_halfwidth();

    QuadBox box;
    box.dim = n;
    for (int i = 0; i < n; ++i) {
        box.lo[i] = std::max(1e-12, k0 - w);
        box.hi[i] = k0 + w;
    }
    std::vector<std::vector<double>> bps(n, ctx.sector_axis_breakpoints(box.lo[0], box.hi[0]));

    const double nu = amp.sector().multiplicity();
    auto ftot = [&](std::span<const double> x) { return std::norm(amp.eval(x)); };
    auto fpw = [&](std::span<const double> x) { return std::norm(amp.pw(x)); };
    auto rt = integrate_nd(ftot, box, q, bps);
    auto rp = integrate_nd(fpw, box, q, bps);
    return {nu * rt.value, nu * rp.value, nu * rt.error, nu * rp.error,
            rt.converged && rp.converged};
}

SectorProbabilities probabilities_impl(int n, const GaussianPacket& pkt,
                                       const SystemParams& p, const QuadratureSpec& q) {
    SectorProbabilities out;
    out.n = n;
    auto amps = combine_sectors(n, pkt, p, q);
    if (!pkt.narrowband()) {
        out.flagged = true;
        out.note = "narrowband condition k0/delta >= 20 violated";
    }
    for (const auto& a : amps) {
        auto ir = sector_integrals(a, q);
        SectorResult r;
        r.label = a.sector();
        r.total = ir.total;
        r.pw = ir.pw;
        r.bs = ir.total - ir.pw;
        r.err_total = ir.err_total;
        r.err_pw = ir.err_pw;
        if (!ir.converged) {
            r.flagged = true;
            r.note = "quadrature tolerance not reached";
            out.flagged = true;
        }
        out.sectors.push_back(std::move(r));
    }
    if (p.gamma_prime == 0.0 && n >= 2) {
        const double dev = std::abs(out.sum_total() - 1.0);
        const double lim = n == 2 ? 1e-3 : 3e-3;
        if (dev > lim) {
            out.flagged = true;
            out.note = "unitarity violation " + std::to_string(dev);
        }
    }
    return out;
}

}  // namespace

const SectorResult& SectorProbabilities::operator[](const std::string& name) const {
    for (const auto& r : sectors)
        if (r.label.name() == name) return r;
    throw std::out_of_range("SectorProbabilities: no sector " + name);
}

SectorProbabilities prob_one(const GaussianPacket& pkt, const SystemParams& p,
                             const QuadratureSpec& q) {
    return probabilities_impl(1, pkt, p, q);
}

SectorProbabilities prob_two(const GaussianPacket& pkt, const SystemParams& p,
                             const QuadratureSpec& q) {
    return probabilities_impl(2, pkt, p, q);
}

SectorProbabilities prob_three(const GaussianPacket& pkt, const SystemParams& p,
                               const QuadratureSpec& q) {
    return probabilities_impl(3, pkt, p, q);
}

SectorProbabilities fock_probabilities(int n, const GaussianPacket& pkt,
                                       const SystemParams& p, const QuadratureSpec& q) {
    if (n < 1 || n > 3) throw std::invalid_argument("fock_probabilities: n must be 1..3");
    return probabilities_impl(n, pkt, p, q);
}

SectorResult single_sector_probability(const OutputAmplitude& amp, const QuadratureSpec& q) {
    auto ir = sector_integrals(amp, q);
    SectorResult r;
    r.label = amp.sector();
    r.total = ir.total;
    r.pw = ir.pw;
    r.bs = ir.total - ir.pw;
    r.err_total = ir.err_total;
    r.err_pw = ir.err_pw;
    if (!ir.converged) {
        r.flagged = true;
        r.note = "quadrature tolerance not reached";
    }
    return r;
}

double sector_cross_term(const OutputAmplitude& amp, const QuadratureSpec& q) {
    const auto& ctx = amp.kernels();
    const int n = amp.sector().n;
    const double k0 = ctx.packet().k0;
    const double w = ctx.sector_window_halfwidth();
    QuadBox box;
    box.dim = n;
    for (int i = 0; i < n; ++i) {
        box.lo[i] = std::max(1e-12, k0 - w);
        box.hi[i] = k0 + w;
    }
    std::vector<std::vector<double>> bps(n, ctx.sector_axis_breakpoints(box.lo[0], box.hi[0]));
    auto f = [&](std::span<const double> x) {
        const cplx t = amp.pw(x), b = amp.bs(x);
        return 2.0 * std::real(std::conj(t) * b) + std::norm(b);
    };
    return amp.sector().multiplicity() * integrate_nd(f, box, q, bps).value;
}

int worker_threads();

std::vector<SweepRow> sweep(SweepKind kind, const std::vector<double>& v_grid,
                            double delta, double epsilon, double gamma_prime,
                            const QuadratureSpec& q, int threads) {
    const int n = kind == SweepKind::one ? 1 : kind == SweepKind::two ? 2 : 3;
    std::vector<std::vector<SweepRow>> per_point(v_grid.size());
    if (threads <= 0) threads = worker_threads();
    threads = std::max(1, std::min<int>(threads, int(v_grid.size())));

    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= v_grid.size()) return;
            std::vector<SweepRow> rows;
            try {
                SystemParams p(epsilon, v_grid[i], gamma_prime);
                GaussianPacket pkt(epsilon, delta);
                auto probs = fock_probabilities(n, pkt, p, q);
                for (const auto& s : probs.sectors) {
                    SweepRow r;
                    r.v = v_grid[i];
                    r.label = s.label;
                    r.total = s.total;
                    r.pw = s.pw;
                    r.bs = s.bs;
                    r.err = s.err_total + s.err_pw;
                    r.flagged = s.flagged || probs.flagged;
                    r.note = !s.note.empty() ? s.note : probs.note;
                    rows.push_back(std::move(r));
                }
            } catch (const std::exception& e) {
                SweepRow r;
                r.v = v_grid[i];
                r.label = SectorLabel{n, n};
                r.total = r.pw = r.bs = std::nan("");
                r.flagged = true;
                r.note = e.what();
                rows.push_back(std::move(r));
            }
            per_point[i] = std::move(rows);
        }
    };

    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    std::vector<SweepRow> out;
    for (auto& rows : per_point)
        for (auto& r : rows) out.push_back(std::move(r));
    return out;
}

int worker_threads() {
    if (const char* env = std::getenv("WQED_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
}

}  // namespace wqed
