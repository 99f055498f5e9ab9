"""Square matrices, elementary operations and the generic-position reduction.

Elementary matrices act on the right everywhere: ``a * e_ij(t)`` adds
``t * a_i`` to coordinate ``j`` of a row, and ``g * e_ij(t)`` adds ``t``
times column ``i`` to column ``j``.  Indices are 1-based in the public API
and in every serialized form.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InternalInvariantViolation, NotGenericPosition, NotSL, NotUnimodular, SizeMismatch
from .rings import RingElement


@dataclass(frozen=True)
class ElementaryOp:
    i: int
    j: int
    t: RingElement

    def __post_init__(self):
        if self.i == self.j or self.i < 1 or self.j < 1:
            raise ValueError(f"invalid elementary position ({self.i}, {self.j})")

    @property
    def ring(self):
        return self.t.ring

    def inverse(self):
        return ElementaryOp(self.i, self.j, -self.t)

    def matrix(self, size):
        if max(self.i, self.j) > size:
            raise SizeMismatch(f"e_{self.i}{self.j} does not fit size {size}")
        rows = [[self.ring.one if r == c else self.ring.zero for c in range(size)] for r in range(size)]
        rows[self.i - 1][self.j - 1] = self.t
        return SqMatrix(self.ring, rows)

    def to_json(self):
        return {"i": self.i, "j": self.j, "t": str(self.t)}

    @classmethod
    def from_json(cls, ring, data):
        return cls(int(data["i"]), int(data["j"]), ring(data["t"]))

    def __str__(self):
        return f"e_{self.i},{self.j}({self.t})"


class SqMatrix:
    __slots__ = ("ring", "rows", "size")

    def __init__(self, ring, rows):
        rows = tuple(tuple(ring(x) for x in r) for r in rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise SizeMismatch("matrix must be square and nonempty")
        self.ring = ring
        self.rows = rows
        self.size = len(rows)

    @classmethod
    def identity(cls, ring, size):
        return cls(ring, [[1 if r == c else 0 for c in range(size)] for r in range(size)])

    def __getitem__(self, rc):
        r, c = rc
        return self.rows[r - 1][c - 1]

    def __eq__(self, other):
        return isinstance(other, SqMatrix) and self.ring == other.ring and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __mul__(self, other):
        if isinstance(other, ElementaryOp):
            return apply_right(self, other)
        if other.size != self.size:
            raise SizeMismatch(f"{self.size} x {other.size}")
        n, z = self.size, self.ring.zero
        out = []
        for r in range(n):
            row = []
            for c in range(n):
                s = z
                for k in range(n):
                    s = s + self.rows[r][k] * other.rows[k][c]
                row.append(s)
            out.append(row)
        return SqMatrix(self.ring, out)

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows) + "]"

    __repr__ = __str__

    def det(self):
        memo = {}
        n = self.size

        def minor(r, cols):
            if r == n:
                return self.ring.one
            hit = memo.get((r, cols))
            if hit is not None:
                return hit
            total = self.ring.zero
            for pos, c in enumerate(cols):
                a = self.rows[r][c]
                if a.is_zero():
                    continue
                term = a * minor(r + 1, cols[:pos] + cols[pos + 1:])
                total = total - term if pos % 2 else total + term
            memo[(r, cols)] = total
            return total

        return minor(0, tuple(range(n)))

    def is_sl(self):
        return self.det() == self.ring.one

    def inverse(self):
        """Inverse via the adjugate; requires a unit determinant."""
        d = self.det()
        dinv = d.inverse()
        n = self.size
        out = [[None] * n for _ in range(n)]
        for r in range(n):
            for c in range(n):
                sub = [[self.rows[i][j] for j in range(n) if j != c] for i in range(n) if i != r]
                cof = SqMatrix(self.ring, sub).det() if n > 1 else self.ring.one
                if (r + c) % 2:
                    cof = -cof
                out[c][r] = cof * dinv
        return SqMatrix(self.ring, out)

    def to_json(self, with_ring=False):
        out = {"rows": [[str(x) for x in r] for r in self.rows]}
        if with_ring:
            from .rings import ring_to_json

            out["ring"] = ring_to_json(self.ring)
        return out

    @classmethod
    def from_json(cls, ring, data):
        return cls(ring, data["rows"])


def apply_right(obj, op):
    """Right multiplication of a row (sequence) or SqMatrix by an elementary op."""
    i, j, t = op.i - 1, op.j - 1, op.t
    if isinstance(obj, SqMatrix):
        if max(i, j) >= obj.size:
            raise SizeMismatch(f"{op} does not act on size {obj.size}")
        rows = [list(r) for r in obj.rows]
        for r in rows:
            r[j] = r[j] + r[i] * t
        out = SqMatrix.__new__(SqMatrix)
        out.ring, out.rows, out.size = obj.ring, tuple(tuple(r) for r in rows), obj.size
        return out
    row = list(obj)
    if max(i, j) >= len(row):
        raise SizeMismatch(f"{op} does not act on a row of length {len(row)}")
    row[j] = row[j] + row[i] * t
    return tuple(row)


def product_of_ops(ring, size, ops):
    g = SqMatrix.identity(ring, size)
    for op in ops:
        g = apply_right(g, op)
    return g


def reduction_positions(size):
    """Positions of the reduction steps in the order they are performed."""
    s = size
    out = []
    for k in range(1, s):
        out.append((s, k))
        out.extend((k, j) for j in range(1, s + 1) if j != k)
    out.extend((s, j) for j in range(1, s))
    return out


@dataclass(frozen=True)
class RootSchedule:
    """The roots ``alpha_1..alpha_N`` of the parametrization ``t -> prod e_alpha(t)``.

    This is the reduction order reversed, since undoing the reduction of
    ``g`` rebuilds ``g`` from the last step backwards.
    """

    size: int
    positions: tuple

    @classmethod
    def for_size(cls, size):
        if size < 2:
            raise SizeMismatch("size must be at least 2")
        return cls(size, tuple(reversed(reduction_positions(size))))

    def __len__(self):
        return len(self.positions)


def reduce_generic(g):
    """Elementary ops ``o_1..o_N`` with ``g * o_1 * ... * o_N == I``.

    For each row ``k < n+1`` a multiple of the last column is added to column
    ``k`` to make the diagonal entry 1, then the row is cleared; finally the
    last row is cleared.  ``N = size**2 - 1``.
    """
    if not g.is_sl():
        raise NotSL("determinant is not 1")
    ring, s = g.ring, g.size
    ops = []
    cur = g
    step = 0
    for k in range(1, s):
        step += 1
        gkk, gks = cur[k, k], cur[k, s]
        need = ring.one - gkk
        if need.is_zero():
            t = ring.zero
        else:
            try:
                t = need * gks.inverse()
            except NotUnimodular:
                raise NotGenericPosition(step) from None
        op = ElementaryOp(s, k, t)
        cur = apply_right(cur, op)
        ops.append(op)
        for j in range(1, s + 1):
            if j == k:
                continue
            step += 1
            op = ElementaryOp(k, j, -cur[k, j])
            cur = apply_right(cur, op)
            ops.append(op)
    for j in range(1, s):
        step += 1
        op = ElementaryOp(s, j, -cur[s, j])
        cur = apply_right(cur, op)
        ops.append(op)
    if cur != SqMatrix.identity(ring, s):
        raise InternalInvariantViolation("reduction did not reach the identity")
    return ops


def params_to_matrix(schedule, t):
    t = list(t)
    if len(t) != len(schedule):
        raise SizeMismatch(f"expected {len(schedule)} parameters, got {len(t)}")
    ring = t[0].ring
    ops = [ElementaryOp(i, j, x) for (i, j), x in zip(schedule.positions, t)]
    return product_of_ops(ring, schedule.size, ops)


def matrix_to_params(g):
    """Parameters ``t`` with ``params_to_matrix(RootSchedule.for_size(g.size), t) == g``."""
    return [-op.t for op in reversed(reduce_generic(g))]
