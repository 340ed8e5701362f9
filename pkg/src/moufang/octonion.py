"""Generalized octonion algebras by Cayley-Dickson doubling, and their
traceless Malcev algebras.

The doubling convention is fixed as

    (a, b) (c, d) = (a c + mu * conj(d) b,  d a + b conj(c)),
    conj(a, b)    = (conj(a), -b).

Conventions differ across texts; the verified identities are convention
independent but the structure-constant tables and witnesses are not, so
this one is fixed and documented.  Basis order after three doublings with
parameters (alpha, beta, gamma) is (1, u, v, uv, w, uw, vw, (uv)w).
All arithmetic is exact rational.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .models import MoufangLoop

Vector = tuple[Fraction, ...]


class AlgebraError(Exception):
    """Invalid construction or a failed structural verification."""


_BASIS_LABELS_8 = ("1", "u", "v", "uv", "w", "uw", "vw", "(uv)w")


@dataclass(frozen=True)
class CayleyAlgebra:
    """A unital algebra from iterated doubling: dim 1, 2, 4 or 8.

    mul[(i, j)] = (k, c) means e_i e_j = c e_k: basis products are always
    scalar multiples of basis elements under this construction.
    """

    dim: int
    params: tuple[Fraction, ...]
    mul: dict[tuple[int, int], tuple[int, Fraction]]
    conj_signs: tuple[int, ...]
    labels: tuple[str, ...]

    def product(self, x: Vector, y: Vector) -> Vector:
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if not yj:
                    continue
                k, c = self.mul[(i, j)]
                out[k] += xi * yj * c
        return tuple(out)

    def conj(self, x: Vector) -> Vector:
        return tuple(s * xi for s, xi in zip(self.conj_signs, x))

    def basis(self, i: int) -> Vector:
        return tuple(
            Fraction(1) if j == i else Fraction(0) for j in range(self.dim)
        )

    def norm(self, x: Vector) -> Fraction:
        """n(x) = x conj(x); raises if the product is not scalar."""
        prod = self.product(x, self.conj(x))
        if any(prod[1:]):
            raise AlgebraError("x * conj(x) is not a scalar")
        return prod[0]


def ground_field() -> CayleyAlgebra:
    return CayleyAlgebra(
        1, (), {(0, 0): (0, Fraction(1))}, (1,), ("1",)
    )


def cayley_dickson(base: CayleyAlgebra, mu: Fraction | int) -> CayleyAlgebra:
    """Double `base` with parameter mu: the new imaginary unit squares to mu."""
    mu = Fraction(mu)
    if mu == 0:
        raise AlgebraError("doubling parameter must be nonzero")
    if base.dim not in (1, 2, 4):
        raise AlgebraError(
            "doubling beyond dimension 8 is refused: the result would not "
            "be alternative"
        )
    n = base.dim
    mul: dict[tuple[int, int], tuple[int, Fraction]] = {}

    def half(i: int) -> tuple[int, int]:
        return (i % n, i // n)  # (base index, 0 = first or 1 = second slot)

    for i in range(2 * n):
        bi, si = half(i)
        for j in range(2 * n):
            bj, sj = half(j)
            if si == 0 and sj == 0:        # (a,0)(c,0) = (ac, 0)
                k, c = base.mul[(bi, bj)]
                mul[(i, j)] = (k, c)
            elif si == 0 and sj == 1:      # (a,0)(0,d) = (0, da)
                k, c = base.mul[(bj, bi)]
                mul[(i, j)] = (k + n, c)
            elif si == 1 and sj == 0:      # (0,b)(c,0) = (0, b conj(c))
                k, c = base.mul[(bi, bj)]
                mul[(i, j)] = (k + n, c * base.conj_signs[bj])
            else:                          # (0,b)(0,d) = (mu conj(d) b, 0)
                k, c = base.mul[(bj, bi)]
                mul[(i, j)] = (k, mu * c * base.conj_signs[bj])
    conj_signs = base.conj_signs + tuple(-1 for _ in range(n))
    if base.dim == 1:
        labels = ("1", "u")
    elif base.dim == 2:
        labels = ("1", "u", "v", "uv")
    else:
        labels = _BASIS_LABELS_8
    return CayleyAlgebra(2 * n, base.params + (mu,), mul, conj_signs, labels)


def octonion_algebra(alpha, beta, gamma) -> CayleyAlgebra:
    """O(alpha, beta, gamma): three doublings of the ground field."""
    return cayley_dickson(
        cayley_dickson(cayley_dickson(ground_field(), alpha), beta), gamma
    )


def associator(a: CayleyAlgebra, x: Vector, y: Vector, z: Vector) -> Vector:
    xy_z = a.product(a.product(x, y), z)
    x_yz = a.product(x, a.product(y, z))
    return tuple(p - q for p, q in zip(xy_z, x_yz))


def check_alternative(a: CayleyAlgebra) -> Optional[tuple]:
    """Polarized alternativity sweep; returns a witness triple or None."""
    zero = (Fraction(0),) * a.dim
    for i, j, k in itertools.product(range(a.dim), repeat=3):
        x, y, z = a.basis(i), a.basis(j), a.basis(k)
        left = tuple(
            p + q for p, q in zip(associator(a, x, y, z),
                                  associator(a, y, x, z))
        )
        right = tuple(
            p + q for p, q in zip(associator(a, x, y, z),
                                  associator(a, x, z, y))
        )
        if left != zero or right != zero:
            return (i, j, k)
    return None


def nalt_check(a: CayleyAlgebra, v: Vector) -> bool:
    """Does v satisfy (v,x,y) = -(x,v,y) = (x,y,v) for all basis x, y?"""
    for i, j in itertools.product(range(a.dim), repeat=2):
        x, y = a.basis(i), a.basis(j)
        first = associator(a, v, x, y)
        second = associator(a, x, v, y)
        third = associator(a, x, y, v)
        if any(p + q for p, q in zip(first, second)):
            return False
        if first != third:
            return False
    return True


def check_moufang(a: CayleyAlgebra, which: str) -> Optional[tuple]:
    """Polarized Moufang law sweep over all basis quadruples.

    The laws are quadratic in the repeated variable; in characteristic zero
    checking the full polarization P(a,b,x,y) + P(b,a,x,y) = 0 on the basis
    is equivalent and complete.  Returns a witness quadruple or None.
    """
    p = a.product
    if which == "left":     # a(x(ay)) = ((ax)a)y
        def law(s, x, y):
            return tuple(
                u - v for u, v in zip(p(s, p(x, p(s, y))),
                                      p(p(p(s, x), s), y))
            )
    elif which == "middle":  # (ax)(ya) = (a(xy))a
        def law(s, x, y):
            return tuple(
                u - v for u, v in zip(p(p(s, x), p(y, s)),
                                      p(p(s, p(x, y)), s))
            )
    elif which == "right":   # ((xa)y)a = x(a(ya))
        def law(s, x, y):
            return tuple(
                u - v for u, v in zip(p(p(p(x, s), y), s),
                                      p(x, p(s, p(y, s))))
            )
    else:
        raise AlgebraError(f"unknown Moufang law {which!r}")

    zero = (Fraction(0),) * a.dim
    def add(u, v):
        return tuple(x + y for x, y in zip(u, v))

    for i, j, k, l in itertools.product(range(a.dim), repeat=4):
        e_i, e_j, x, y = a.basis(i), a.basis(j), a.basis(k), a.basis(l)
        # polarization of the quadratic variable
        full = add(law(add(e_i, e_j), x, y),
                   tuple(-(u + v) for u, v in zip(law(e_i, x, y),
                                                  law(e_j, x, y))))
        if full != zero:
            return (i, j, k, l)
    return None


# --- traceless Malcev algebra --------------------------------------------


@dataclass(frozen=True)
class MalcevAlgebra:
    """Anticommutative algebra with the Malcev law, by structure constants."""

    dim: int
    bracket: dict[tuple[int, int], tuple[Fraction, ...]]
    labels: tuple[str, ...]

    def bracket_vec(self, x: Vector, y: Vector) -> Vector:
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if not yj:
                    continue
                row = self.bracket[(i, j)]
                c = xi * yj
                for k, ck in enumerate(row):
                    if ck:
                        out[k] += c * ck
        return tuple(out)

    def basis(self, i: int) -> Vector:
        return tuple(
            Fraction(1) if j == i else Fraction(0) for j in range(self.dim)
        )


def jacobian(m: MalcevAlgebra, a: Vector, b: Vector, c: Vector) -> Vector:
    br = m.bracket_vec
    terms = (br(br(a, b), c), br(br(b, c), a), br(br(c, a), b))
    return tuple(sum(t[k] for t in terms) for k in range(m.dim))


def malcev_witness(m: MalcevAlgebra) -> Optional[tuple]:
    """Polarized Malcev law sweep; returns a witness quadruple or None.

    The law Jac(a,b,[a,c]) = [Jac(a,b,c),a] is quadratic in a; the check
    runs its full polarization over all basis quadruples.
    """
    br = m.bracket_vec
    zero = (Fraction(0),) * m.dim

    def law(a, b, c):
        lhs = jacobian(m, a, b, br(a, c))
        rhs = br(jacobian(m, a, b, c), a)
        return tuple(p - q for p, q in zip(lhs, rhs))

    for i, j, k, l in itertools.product(range(m.dim), repeat=4):
        a1, a2 = m.basis(i), m.basis(j)
        b, c = m.basis(k), m.basis(l)
        both = tuple(p + q for p, q in zip(law(a1, b, c), law(a2, b, c)))
        mixed = law(tuple(p + q for p, q in zip(a1, a2)), b, c)
        diff = tuple(p - q for p, q in zip(mixed, both))
        if diff != zero:
            return (i, j, k, l)
    return None


def traceless_malcev(a: CayleyAlgebra, check: bool = True) -> MalcevAlgebra:
    """Commutator algebra on the trace-zero part of an octonion algebra."""
    if a.dim != 8:
        raise AlgebraError("traceless Malcev algebra needs an 8-dim algebra")
    bracket: dict[tuple[int, int], tuple[Fraction, ...]] = {}
    for i in range(1, 8):
        for j in range(1, 8):
            x, y = a.basis(i), a.basis(j)
            comm = tuple(
                p - q for p, q in zip(a.product(x, y), a.product(y, x))
            )
            if comm[0] != 0:
                raise AlgebraError(
                    "commutator of traceless elements has a trace component"
                )
            bracket[(i - 1, j - 1)] = comm[1:]
    m = MalcevAlgebra(7, bracket, a.labels[1:])
    if check:
        witness = malcev_witness(m)
        if witness is not None:
            raise AlgebraError(f"Malcev law fails at basis quadruple {witness}")
    return m


# --- the order-16 unit loop ----------------------------------------------


def unit_loop(a: CayleyAlgebra) -> MoufangLoop:
    """The loop {+-e_i} of an octonion algebra with parameters (-1,-1,-1).

    Elements are encoded as sign * basis: index i for +e_i, 8 + i for -e_i.
    For other parameters the signed basis is not closed under the product
    and the construction is refused.
    """
    if a.dim != 8 or a.params != (Fraction(-1),) * 3:
        raise AlgebraError(
            "the signed basis closes into a loop only for parameters "
            "(-1, -1, -1)"
        )
    order = 16

    def code(k: int, c: Fraction) -> int:
        if c == 1:
            return k
        if c == -1:
            return 8 + k
        raise AlgebraError("basis product is not +-(basis element)")

    table = [[0] * order for _ in range(order)]
    for i in range(order):
        si, bi = (1, i) if i < 8 else (-1, i - 8)
        for j in range(order):
            sj, bj = (1, j) if j < 8 else (-1, j - 8)
            k, c = a.mul[(bi, bj)]
            table[i][j] = code(k, c * si * sj)
    labels = tuple(
        ("" if i < 8 else "-") + a.labels[i % 8] for i in range(order)
    )
    return MoufangLoop.from_table(table, labels, name="o16")


def o16_loop() -> MoufangLoop:
    return unit_loop(octonion_algebra(-1, -1, -1))


# --- structure-constant export -------------------------------------------


def algebra_text(a: CayleyAlgebra) -> str:
    """Sparse-triple export of the product table (same syntax as models)."""
    lines = [
        "kind algebra",
        f"model cayley{a.dim}" + "".join(f"_{p}" for p in a.params),
        f"dim {a.dim}",
        "basis " + " ".join(a.labels),
    ]
    for (i, j), (k, c) in sorted(a.mul.items()):
        if c:
            lines.append(f"mul {i} {j} {k} {c}")
    lines.append("unit 0 1")
    lines.append("end")
    return "\n".join(lines) + "\n"
