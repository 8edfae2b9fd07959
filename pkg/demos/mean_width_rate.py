"""How fast the mean width excess vanishes, and where the constant lands.

For a smooth body the excess E[W(Z) - W(K)] decays like n^(-2/(d+1)).
In the plane that is n^(-2/3), and n^(2/3) times the excess should settle
near the curvature constant returned by ``theorem_targets``.
"""

from kcell import Ball, Cosine2, ExperimentConfig, Isotropic, rate_fit, run_experiment, theorem_targets

for label, dist in (("isotropic", Isotropic(2)), ("cosine2:4", Cosine2(2, 4))):
    K = Ball(1.0, 2)
    cfg = ExperimentConfig("thm31", K, dist, (128, 512, 2048, 8192), 1000, seed=11)
    res = run_experiment(cfg)
    target = theorem_targets(K, dist).thm31
    slope, se, _ = rate_fit(res.rows, "mean_dW")
    print(f"{label}: fitted slope {slope:.3f} +/- {se:.3f} (expect -0.667), limit constant {target:.4f}")
    for row in res.rows:
        scaled = row["n"] ** (2 / 3) * row["mean_dW"]
        print(f"    n={row['n']:5d}  E dW = {row['mean_dW']:.3e}  n^(2/3) E dW = {scaled:.3f}")
