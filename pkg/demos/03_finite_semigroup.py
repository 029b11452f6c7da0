"""Minimal ideals and idempotents in the full transformation monoid on 3 points.

Products are composition, (a * b)(i) = a(b(i)).  The minimal ideal consists of
the three constant maps.  They share one kernel (everything collapses), so
they sit in a single minimal left ideal; their images differ, so each has its
own minimal right ideal.
"""
from koehler.semigroup import (
    center,
    idempotents,
    kernel,
    minidem_correspondence,
    minimal_ideals,
    rees_checks,
    transformation_semigroup,
)

# 3-cycle, transposition, and the map sending point 1 onto point 0
T3 = transformation_semigroup([(1, 2, 0), (1, 0, 2), (0, 0, 2)])
print("size:", T3.size, " idempotents:", len(idempotents(T3)))
print("minimal ideal:", sorted(T3.elements[i] for i in kernel(T3)))

left, right = minimal_ideals(T3)
print("minimal left ideals: ", [sorted(T3.elements[i] for i in I.members) for I in left])
print("minimal right ideals:", [sorted(T3.elements[i] for i in I.members) for I in right])
print("center:", [T3.elements[i] for i in center(T3)])

for rep in (rees_checks(T3), minidem_correspondence(T3)):
    print(f"{rep.name}: {rep.status}  {rep.certificates}")
