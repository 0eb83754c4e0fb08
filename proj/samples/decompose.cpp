// Sparse decomposition of a random target with FW and FCFW, then a sparse
// l_2 projection onto a ball.
#include <iostream>

#include "caradory/caradory.hpp"

using namespace caradory;

int main() {
  const Instance inst = gen_random_polytope(50, 51, 8, 42);
  const ObjectiveSpec spec(inst.target, 3.0);

  SolverConfig cfg;
  cfg.epsilon = 1e-3;
  cfg.max_iter = 20000;
  for (Algorithm a : {Algorithm::FW, Algorithm::AFW, Algorithm::FCFW}) {
    cfg.algorithm = a;
    const SolveResult r = solve(inst.set, spec, cfg);
    r.combination.check(inst.set);
    std::cout << to_string(a) << ": " << to_string(r.trace.status) << " after " << r.trace.last().t
              << " iterations, cardinality " << r.combination.cardinality() << ", ||x - x*||_3 = "
              << target_distance(r.combination.point, spec) << '\n';
  }

  const Instance ball = ball_instance(10, 2.0, 1.0, 2.0);
  SolverConfig pcfg;
  pcfg.epsilon = 1e-4;
  pcfg.max_iter = 200;
  ProjectionReference ref{ball_instance_distance(ball), std::nullopt};
  const ProjectionResult pr = projection_solve(ball.set, ball.objective(), pcfg, ref);
  std::cout << "ball projection: distance " << pr.report.distance << " (optimal " << ref.distance << "), "
            << pr.result.combination.cardinality() << " boundary points\n";

  std::cout << "Hadamard n=64 needs at least " << lower_bound_cardinality(64, 0.1)
            << " vertices for accuracy 0.1\n";
}
