"""Return times of reversible vectors carry finite-sums structure.

For x in im P the set of n with T^n x close to x contains all finite sums of
some sequence.  With a rational rotation the return set is exactly a set of
multiples, and a witness is found by ascending search.
"""
import numpy as np

from koehler import decompose, finite_sums, find_fs_sequence, minimal_idempotent_spectral, return_time_set
from koehler.ip import verify_ip_recurrence

print("FS(1, 3, 9) =", sorted(finite_sums((1, 3, 9))))
print("witness in FS(1, 3, 9):", find_fs_sequence(finite_sums((1, 3, 9)), 3, 13).sequence)

# rotation by 3/7 of a turn next to a decaying direction
lam = np.exp(2j * np.pi * 3 / 7)
T = np.diag([lam, 0.4])
R = return_time_set(T, np.array([1.0, 0.0]), 1e-6, 100)
print("return times up to 100:", R)
print("length-4 witness:", find_fs_sequence(R, 4, 100).sequence)

rep = verify_ip_recurrence(T, decompose(T, minimal_idempotent_spectral(T)), N=1000, m=4)
print(rep.status, rep.certificates)
