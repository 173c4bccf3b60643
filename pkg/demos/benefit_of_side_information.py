#!/usr/bin/env python3
"""How much is side information worth, and under which loss?

Walks through the central quantity of the library: the drop in optimal
expected loss when the predictor of X may depend on an observed Y.  Under
logarithmic loss this drop is exactly the mutual information; under other
losses it is some other Jensen gap.
"""

import numpy as np

import sideinfo as si

rng = np.random.default_rng(0)

print("=" * 68)
print("A joint where Y pins X down half the time")
print("=" * 68)

joint = si.validate_joint([[0.0, 0.25], [0.0, 0.25], [0.5, 0.0]])
px, py = si.marginals(joint)
print("P(X,Y) =\n", joint.table)
print("P_X =", px.probs, "  P_Y =", py.probs)
print("Seeing Y=1 reveals X=x3; seeing Y=2 leaves a coin flip on {x1, x2}.\n")

for name in ("log", "zero_one", "brier", "spherical", "absolute_ordered"):
    loss = si.builtin_loss(name, 3)
    rep = si.benefit(loss, joint)
    print(
        f"{name:>16}: risk alone = {rep.risk_no_side: .6f}, with Y = "
        f"{rep.risk_with_side: .6f}, benefit C = {rep.c_value: .6f}"
    )

print("\nUnder log loss the benefit is the mutual information:")
print("  C(log) =", si.benefit(si.builtin_loss("log", 3), joint).c_value)
print("  I(X;Y) =", si.mutual_information(joint), " (= ln 2)")

print("\n" + "=" * 68)
print("The benefit is always a Jensen gap of a convex function")
print("=" * 68)

# The normalized Bayes envelope G of each loss reproduces C as
#   sum_y P(y) G(P_{X|y}) - G(P_X)
for name in ("log", "zero_one", "brier"):
    loss = si.builtin_loss(name, 3)
    g = si.g_normalized(loss)
    direct = si.benefit(loss, joint).c_value
    via_gap = si.benefit_from_G(g, joint)
    print(f"{name:>10}: direct = {direct:.9f}, Jensen gap of G = {via_gap:.9f}")

print("\nG vanishes at the simplex vertices (certainty is worth nothing):")
g_log = si.g_normalized(si.builtin_loss("log", 3))
print("  G(delta_i) =", [round(g_log.value(si.point_mass(i, 3).probs), 12) for i in range(3)])

print("\n" + "=" * 68)
print("Independence means zero benefit, for every loss")
print("=" * 68)

prod = si.Joint(px.probs[:, None] * py.probs[None, :])
for name in ("log", "zero_one", "brier"):
    print(f"  C({name}) on product joint =", si.benefit(si.builtin_loss(name, 3), prod).c_value)

print("\n" + "=" * 68)
print("Conditional benefit: what does Y add on top of W?")
print("=" * 68)

j3 = si.Joint(rng.dirichlet(np.ones(27)).reshape(3, 3, 3))
log3 = si.builtin_loss("log", 3)
print("random 3x3x3 joint over (X, Y, W):")
print("  conditional benefit of Y given W (log loss) =", si.conditional_benefit(log3, j3))
print("  conditional mutual information I(X;Y|W)     =", si.conditional_mutual_information(j3))
