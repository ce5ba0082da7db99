"""Tour of the probability-simplex primitives.

Negative entropy and its range, the KL/Bregman identity, temperature
softmax and log-sum-exp, and projection onto the floored simplex.
"""

import numpy as np

from driftsched import (
    SimplexVec,
    bregman_neg_entropy,
    kl_div,
    log_sum_exp,
    neg_entropy,
    softmax,
    truncate,
)

print("== entropy on the simplex ==")
for k in (2, 4, 16):
    u = SimplexVec.uniform(k)
    v = SimplexVec.vertex(k, 0)
    print(f"K={k:>2}: uniform -> {neg_entropy(u):+.4f} (= -log K = {-np.log(k):+.4f}), "
          f"vertex -> {neg_entropy(v):+.4f}")

print("\n== Bregman divergence of negative entropy equals KL ==")
rng = np.random.default_rng(0)
x, y = rng.dirichlet(np.ones(6)), rng.dirichlet(np.ones(6))
print(f"three-term form : {bregman_neg_entropy(x, y):.12f}")
print(f"direct KL sum   : {kl_div(x, y):.12f}")
print(f"|difference|    : {abs(bregman_neg_entropy(x, y) - kl_div(x, y)):.2e}")

print("\n== Pinsker: KL dominates half the squared l1 distance ==")
l1 = np.abs(x - y).sum()
print(f"KL = {kl_div(x, y):.4f} >= 0.5*l1^2 = {0.5 * l1 ** 2:.4f}")

print("\n== temperature softmax and log-sum-exp ==")
q = np.array([3.0, 1.0, 0.0])
for mu in (2.0, 0.5, 0.05):
    p = softmax(q, mu).probs
    print(f"mu={mu:<4}: softmax={np.round(p, 4)}  lse={log_sum_exp(q, mu):.4f} "
          f"(max={q.max()}, gap={log_sum_exp(q, mu) - q.max():.4f})")
print("as mu shrinks the softmax sharpens and the smoothed max tightens")

print("\n== flooring keeps entropy gradients bounded ==")
x = np.array([0.995, 0.004, 0.001])
for eps in (0.01, 0.05):
    t = truncate(x, eps)
    grad_inf = np.abs(1.0 + np.log(t.probs)).max()
    print(f"eps={eps}: {np.round(t.probs, 4)} sum={t.probs.sum():.10f} "
          f"|grad|_inf={grad_inf:.2f} <= {1 + abs(np.log(eps)):.2f}")
