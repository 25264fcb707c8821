// Pilot-scale walk-through: a 4-ary 3-cube is augmented with dispersed and
// cohesive wireless links and the hop, latency and speedup figures printed.

#include <cstdio>

#include "wine/channel.hpp"
#include "wine/coordination.hpp"
#include "wine/geometry.hpp"
#include "wine/topology.hpp"
#include "wine/workload.hpp"

int main() {
    using namespace wine;
    const auto base = topology::build_torus(4, 3);
    const auto layout = geometry::layout_for_torus(4, 3, {}, {}, {});
    const channel::LinkSpec link = channel::FsoSpec{};
    const workload::SpeedupModel model;

    const auto base_metrics = topology::path_metrics(base);
    std::printf("baseline   hops %.3f  diameter %zu\n", base_metrics.mean_hops_all_pairs, base_metrics.diameter);

    for (auto target : {coordination::state::dispersed, coordination::state::cohesive}) {
        const auto plan = target == coordination::state::dispersed
                              ? coordination::plan_dispersed(base, 32, &layout)
                              : coordination::plan_cohesive(base, 32, 4);
        const auto assignment = coordination::assign_panels(plan.pairs, layout, link);
        const auto g = coordination::deploy(base, assignment, 0.6);
        const auto m = topology::path_metrics(g);
        const double s = workload::benchmark_speedup(base_metrics.mean_hops_all_pairs, m.mean_hops_all_pairs, model);
        std::printf("%-10s hops %.3f  links %zu/%zu  state %s  speedup %+.2f%%  %.4f GFLOPS\n",
                    coordination::to_string(target), m.mean_hops_all_pairs, assignment.succeeded(), plan.pairs.size(),
                    coordination::to_string(coordination::classify_state(g)), 100.0 * (s - 1.0),
                    workload::extrapolate_flops(model.baseline_flops, s) / 1e9);
    }
}
