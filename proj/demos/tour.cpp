// Small tour: admissibility, a short evolution, one estimate ratio.
#include <cstdio>

#include "mkg2d/dynamics.hpp"
#include "mkg2d/estimates.hpp"
#include "mkg2d/rough_data.hpp"

using namespace mkg2d;

int main() {
  for (RegularityTriple t : {RegularityTriple{1, 1, 1}, RegularityTriple{0.5, 0.5, 0.5}}) {
    const Verdict v = check_admissibility(t);
    std::printf("(s, r, l) = (%g, %g, %g): %s\n", t.s, t.r, t.l, v.ok ? "admissible" : "inadmissible");
    for (const auto& name : v.violated) std::printf("  violated %s\n", name.c_str());
  }

  const GridSpec g = GridSpec::square(32);
  DataOptions opt;
  opt.kind = DataKind::smooth_gaussian;
  const GaugeState s0 = rough_data_generate({}, g, 3, opt).to_state();
  EvolveConfig cfg;
  cfg.dt = 5e-3;
  cfg.t_end = 0.5;
  cfg.diag_stride = 20;
  evolve(s0, cfg, {}, [](const DiagnosticsRecord& d) {
    std::printf("t = %.3f  energy = %.12f  charge = %+.3e  gauss = %.2e\n", d.t, d.energy, d.charge,
                d.gauss_residual_l2);
  });

  const SpectralField2D bump = gaussian_bump(g, {std::numbers::pi, std::numbers::pi, 0.5, 1.0, 2.0, 0.0});
  std::printf("L^4 Strichartz/Tataru ratio of a bump: %.4f\n",
              strichartz_tataru_ratio(bump, 4.0, StrichartzVariant::lp_l2, TimeGrid{}, 0.01));
}
