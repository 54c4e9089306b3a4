"""The attention operator and the three-step alternating procedure.

Attends a toy question (5 token columns) and image (7 region columns),
prints the weight distributions at each step, and verifies the simplex
and convex-hull guarantees numerically.
"""

import numpy as np

from basiq.coattention import AttentionParameters, alternating_coattention, attention_op

D, T_Q, T_V, K = 8, 5, 7, 4

rng = np.random.default_rng(21)
q = rng.standard_normal((D, T_Q))   # question token features
v = rng.standard_normal((D, T_V))   # image region features
steps = [AttentionParameters.random(K, D, D, seed=s, scale=0.8) for s in range(3)]

summary = attention_op(q, np.zeros(D), steps[0])
print("step 1, question summary weights: ",
      np.array2string(summary.weights, precision=3))

image = attention_op(v, summary.attended, steps[1])
print("step 2, image weights guided by it:",
      np.array2string(image.weights, precision=3))

question = attention_op(q, image.attended, steps[2])
print("step 3, re-attended question:      ",
      np.array2string(question.weights, precision=3))

s_hat, v_hat, q_hat = alternating_coattention(q, v, steps)
same = (np.array_equal(s_hat, summary.attended)
        and np.array_equal(v_hat, image.attended)
        and np.array_equal(q_hat, question.attended))
print(f"\nalternating procedure equals the composed calls: {same}")

for name, features, result in (("summary", q, summary), ("image", v, image),
                               ("question", q, question)):
    w = result.weights
    lo = features.min(axis=1) - 1e-12
    hi = features.max(axis=1) + 1e-12
    hull_ok = bool(np.all(result.attended >= lo) and np.all(result.attended <= hi))
    print(f"{name}: weights sum {w.sum():.15f}, min {w.min():.4f}, "
          f"attended stays in the column hull: {hull_ok}")
