"""Minimal idempotent of a power-bounded matrix, computed two ways.

T mixes a rotation by 2 pi / 5 with a contraction, in a skewed basis.  The
powers T^n never converge, but T^(5k) does: the contraction dies out and the
rotation returns to the identity.  The limit is the spectral projection onto
the unimodular part.
"""
import numpy as np

from koehler import decompose, minimal_idempotent_dynamical, minimal_idempotent_spectral, orbit_closure
from koehler.jdlg import verify_all

c, s = np.cos(2 * np.pi / 5), np.sin(2 * np.pi / 5)
D = np.zeros((3, 3))
D[:2, :2] = [[c, -s], [s, c]]
D[2, 2] = 0.6
S = np.array([[1.0, 0.5, 0.0], [0.0, 1.0, 0.3], [0.2, 0.0, 1.0]])
T = S @ D @ np.linalg.inv(S)

# route 1: reorder the Schur form and solve a Sylvester equation
P_spec = minimal_idempotent_spectral(T)
# route 2: look only at powers, pick the one closest to idempotent, purify it
P_dyn = minimal_idempotent_dynamical(T)
print("rank of P:", P_spec.rank)
print("||P_spectral - P_dynamical||_F =", np.linalg.norm(P_spec.P - P_dyn.P))
print("doubling witness (n, ||T^n - P||):", [(n, f"{d:.1e}") for n, d in P_dyn.membership_witness])

# a finite net for the closure of the orbit
net = orbit_closure(T, N=256, epsilon=1e-6)
print("net size:", net.size, "closed under products:", net.product_closed)

# split C^3 = im P (+) ker P and check every clause
dec = decompose(T, P_spec)
print("rev dim:", dec.rev_dim, "aws dim:", dec.aws_dim)
for rep in verify_all(dec, T, net):
    print(f"  {rep.name:24s} {rep.status}  {rep.certificates}")
