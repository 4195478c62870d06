"""Filters designed offline on the expected weight matrix.

The topology is redrawn with probability q at every step. The filter is fit
to (1 - q) W(G0) + q E[W(fresh graph)] once and then used unchanged while
the graph switches underneath it.
"""
import numpy as np

from polyconsensus import (DynamicNetwork, MarkovSwitch, RunConfig, WeightScheme,
                           deflated_eigenvalues, expected_weight_matrix, generate_rgg,
                           lp_minimax, run_filtered, run_standard)

n, trials = 50, 20
scheme = WeightScheme("laplacian")
fresh = expected_weight_matrix(MarkovSwitch(1.0, n), scheme, samples=500, rng=0)

for q in (0.1, 0.8):
    std, opt = [], []
    for trial in range(trials):
        rng = np.random.default_rng([7, trial])
        g0 = generate_rgg(n, rng)
        x0 = rng.uniform(size=n)
        model = MarkovSwitch(q, n)
        W_bar = expected_weight_matrix(model, scheme, current=g0, fresh_mean=fresh)
        f = lp_minimax(deflated_eigenvalues(W_bar), 2).filter
        net = DynamicNetwork(model, scheme, g0)
        cfg = RunConfig(max_iters=60, tol=1e-15, seed=trial)
        std.append(run_standard(net, x0, cfg).errors[-1])
        opt.append(run_filtered(net, f, x0, cfg).errors[-1])
    print(f"q={q}: median error after 60 steps  standard {np.median(std):.2e}  "
          f"filtered {np.median(opt):.2e}")
