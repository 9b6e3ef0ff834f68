"""How much faster is the lagged fixed point than plain gradient descent?

Both methods minimise the same energy from the same start and stop on the same
relative-change tolerance. We count outer iterations and check that the energy
they reach agrees.

    python demos/solver_race.py
"""

import numpy as np

from phasetv import (
    ModelParams, NoiseSpec, SceneSpec, SolveConfig, add_noise, decompose,
    fixed_point_denoise, generate_scene, gradient_descent_denoise, wrap,
)
from phasetv.solvers import default_step

params = ModelParams()
psi = wrap(generate_scene(SceneSpec()))

for target in (74.41, 43.34):
    data = decompose(add_noise(psi, NoiseSpec(target, seed=0))[0])
    config = SolveConfig(params=params, record_energy=True, max_outer=100_000)
    _, fp = fixed_point_denoise(data, config)
    _, gd = gradient_descent_denoise(data, config)
    print(f"{target:.2f} dB")
    print(f"  fixed point      {fp.outer_iterations:6d} iterations  {fp.wall_time:6.2f} s"
          f"  energy {fp.energy_totals[-1]:.4f}")
    print(f"  gradient descent {gd.outer_iterations:6d} iterations  {gd.wall_time:6.2f} s"
          f"  energy {gd.energy_totals[-1]:.4f}  (step {default_step(data, params):.2e})")
    print(f"  ratio {gd.outer_iterations / fp.outer_iterations:.1f}x")

    # the fixed point never lets the energy go up
    e = np.asarray(fp.energy_totals)
    print(f"  largest fixed-point energy increase: {np.max(np.diff(e)):.2e}")
