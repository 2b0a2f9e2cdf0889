#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <vector>

#include "rholder/stability.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace rholder;

namespace {

template <class Fn>
double best_of(int reps, const Fn& fn) {
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

// Times the two embarrassingly parallel layers in both execution modes and
// checks that the parallel results are bitwise identical to the serial
// reference, which the index-addressed reduction is supposed to guarantee.
int main(int argc, char** argv) {
    int rows = argc > 1 ? std::atoi(argv[1]) : 16;
    int levels = argc > 2 ? std::atoi(argv[2]) : 4096;
    int reps = argc > 3 ? std::atoi(argv[3]) : 3;
    if (rows < 2 || levels < 8 || reps < 1) {
        std::fprintf(stderr, "usage: %s [rows>=2] [coarea-levels>=8] [reps>=1]\n", argv[0]);
        return 2;
    }

#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without openmp; both modes run serially\n");
#endif

    ModelParams mp = make_canonical_model(3.0);
    PipelineOptions popt;
    popt.solve.grid_n = 4000;  // rows stay cheap enough to repeat

    std::vector<Interval> family = caps_to_interval_family(mp, 0.25 * mp.L, 0.85 * mp.L, rows);
    StabilityOptions sopt;
    std::vector<StabilityReport> ref, par;
    sopt.exec = Exec::serial;
    double sweep_s = best_of(reps, [&] { ref = run_stability_sweep(mp, family, popt, sopt); });
    sopt.exec = Exec::openmp;
    double sweep_p = best_of(reps, [&] { par = run_stability_sweep(mp, family, popt, sopt); });
    bool sweep_same = ref.size() == par.size();
    for (std::size_t i = 0; sweep_same && i < ref.size(); ++i)
        sweep_same = ref[i].delta == par[i].delta && ref[i].gaps == par[i].gaps &&
                     ref[i].status == par[i].status;

    EigenPair ep = first_eigen_interval(mp, 0.3 * mp.L, 0.8 * mp.L);
    const double inf = std::numeric_limits<double>::infinity();
    CoareaResult cs, cp;
    double co_s = best_of(reps, [&] { cs = coarea_check(ep, mp, 0.02, inf, levels, Exec::serial); });
    double co_p = best_of(reps, [&] { cp = coarea_check(ep, mp, 0.02, inf, levels, Exec::openmp); });
    bool co_same = cs.lhs == cp.lhs && cs.rhs == cp.rhs && cs.residual == cp.residual;

    char sweep_label[64], co_label[64];
    std::snprintf(sweep_label, sizeof sweep_label, "stability sweep, %d rows", rows);
    std::snprintf(co_label, sizeof co_label, "coarea quadrature, %d levels", levels);
    std::printf("%-32s %10s %10s %9s %s\n", "kernel", "serial", "openmp", "speedup", "identical");
    std::printf("%-32s %9.3fs %9.3fs %8.2fx %s\n", sweep_label, sweep_s, sweep_p,
                sweep_s / sweep_p, sweep_same ? "yes" : "NO");
    std::printf("%-32s %9.3fs %9.3fs %8.2fx %s\n", co_label, co_s, co_p, co_s / co_p,
                co_same ? "yes" : "NO");

    if (!sweep_same || !co_same) {
        std::fprintf(stderr, "parallel results differ from the serial reference\n");
        return 1;
    }
    return 0;
}
