"""Peripheral spectrum of a nonnegative matrix, from eigenvalues and from its graph.

The graph below has two strongly connected pieces of equal Perron radius,
a 2-cycle and a 3-cycle, plus a contracting tail.  The peripheral spectrum
must be the union of the square and cube roots of unity, and it must be
cyclic: with e^(i theta) every e^(i k theta) appears.
"""
import numpy as np

from koehler import ConeOrder, check_cyclicity, frobenius_oracle, minimal_idempotent_spectral, peripheral_spectrum
from koehler.engine import inverse_on_rev
from koehler.lattice import induced_lattice_ops, verify_lattice_isomorphism

A = np.zeros((6, 6))
A[0, 1] = A[1, 0] = 1.0
A[2, 3] = A[3, 4] = A[4, 2] = 1.0
A[5, 5] = 0.5
A[5, 0] = 0.25  # the tail feeds into the 2-cycle

ps = peripheral_spectrum(A)
oracle = frobenius_oracle(A)
print("angles from eigenvalues:", np.round(ps.angles, 6))
print("angles from the graph:  ", np.round(oracle.angles, 6))
print("agree:", ps.matches(oracle), " cyclic:", bool(check_cyclicity(ps, 6)))

# the minimal idempotent is positive and carves a lattice out of R^6
P = minimal_idempotent_spectral(A)
sup, inf = induced_lattice_ops(P, ConeOrder(6))
x, y = P.P.real @ np.arange(6.0), P.P.real @ np.array([3.0, -1, 2, 0, 1, 5])
print("sup_P(x, y) =", np.round(sup(x, y), 6))

# T acts on im P as a lattice isomorphism, and its inverse there is positive
J = inverse_on_rev(A, P)
print("return time:", J.return_time)
print(verify_lattice_isomorphism(A, P, ConeOrder(6), inverse=J).status)
