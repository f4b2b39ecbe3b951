#include "tomo/recon.hpp"

#include <cstdio>
#include <ostream>

namespace tomo {

namespace {

void put_g9(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    os << buf;
}

}  // namespace

void write_diagnostics_csv(const ReconResult& result, std::ostream& os) {
    os << "iteration,residual,objective,c_alpha,beta,alpha\n";
    for (std::size_t i = 0; i < result.diagnostics.size(); ++i) {
        const IterationLog& log = result.diagnostics[i];
        os << (i + 1) << ',';
        put_g9(os, log.residual);
        os << ',';
        put_g9(os, log.objective);
        os << ',';
        put_g9(os, log.c_alpha);
        os << ',';
        put_g9(os, log.beta);
        os << ',';
        put_g9(os, log.alpha);
        os << '\n';
    }
}

}  // namespace tomo
