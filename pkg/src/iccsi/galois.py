"""Finite-field arithmetic and exact linear algebra over F_q, q = p^e.

Field elements are plain Python ints in ``range(q)``.  An element encodes the
coefficient vector of a residue polynomial in base p, least significant digit
first: the integer ``d0 + d1*p + ... + d_{e-1}*p^(e-1)`` stands for
``d0 + d1*x + ... + d_{e-1}*x^(e-1)`` modulo the field's irreducible modulus.
For prime fields (e = 1) this is ordinary arithmetic mod p.  For p = 2 the
encoding makes addition a bitwise XOR.

Multiplication uses exp/log tables built from a generator of the
multiplicative group, so q is capped at 2**16.  The moduli shipped for the
fields used throughout the package are

    F_4 : x^2 + x + 1
    F_8 : x^3 + x + 1
    F_9 : x^2 + 1
    F_16: x^4 + x + 1

and any other modulus passed in is checked for irreducibility.  When no
modulus is given for an extension field outside the table, the
lexicographically smallest monic irreducible polynomial is used, which keeps
element encodings reproducible across runs.

Matrices are immutable row-major tuples of tuples over a fixed field.  The
solvers are canonical: Gaussian elimination scans columns left to right, and
underdetermined systems are resolved by setting every free variable to zero,
so equal inputs always produce identical outputs.
"""

from __future__ import annotations

import itertools
import math
import operator
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

MAX_FIELD_ORDER = 1 << 16

# Shipped moduli, little-endian coefficient tuples including the leading 1.
_CANONICAL_MODULI = {
    (2, 2): (1, 1, 1),          # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),       # x^3 + x + 1
    (3, 2): (1, 0, 1),          # x^2 + 1
    (2, 4): (1, 1, 0, 0, 1),    # x^4 + x + 1
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _poly_divmod(num: list[int], den: list[int], p: int) -> tuple[list[int], list[int]]:
    """Quotient and remainder of polynomials over F_p, little-endian digit lists."""
    num = list(num)
    dd = len(den) - 1
    inv_lead = pow(den[dd], p - 2, p) if p > 2 else den[dd]
    quot = [0] * max(1, len(num) - dd)
    for k in range(len(num) - 1, dd - 1, -1):
        c = num[k]
        if c == 0:
            continue
        f = (c * inv_lead) % p
        quot[k - dd] = f
        for j in range(dd + 1):
            num[k - dd + j] = (num[k - dd + j] - f * den[j]) % p
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return quot, num


def _poly_is_irreducible(mod: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(mod) - 1
    if deg < 1 or mod[deg] != 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            den = list(tail) + [1]
            _, rem = _poly_divmod(list(mod), den, p)
            if len(rem) == 1 and rem[0] == 0:
                return False
    return True


def _smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    for tail in itertools.product(range(p), repeat=e):
        cand = list(tail) + [1]
        if _poly_is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # unreachable


class Field:
    """Arithmetic in F_q with precomputed multiplication tables.

    Instances are cached by (p, e, modulus); use :func:`field_new`.
    """

    def __init__(self, p: int, e: int, modulus: Sequence[int] | None = None):
        if not _is_prime(p):
            raise ValueError(f"field characteristic {p} is not prime")
        if e < 1:
            raise ValueError(f"field extension degree {e} must be >= 1")
        q = p**e
        if q > MAX_FIELD_ORDER:
            raise ValueError(f"field order {q} exceeds supported maximum {MAX_FIELD_ORDER}")
        if e == 1:
            if modulus is not None and tuple(modulus) not in ((0, 1),):
                raise ValueError("prime fields take no modulus")
            modulus = (0, 1)
        elif modulus is None:
            modulus = _CANONICAL_MODULI.get((p, e)) or _smallest_irreducible(p, e)
        else:
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != e + 1 or modulus[e] != 1:
                raise ValueError(f"modulus must be monic of degree {e}")
            if not _poly_is_irreducible(modulus, p):
                raise ValueError("modulus polynomial is reducible")
        self.p = p
        self.e = e
        self.q = q
        self.modulus: tuple[int, ...] = tuple(modulus)
        self._build_tables()
        if p == 2 and e > 1:
            self.add = operator.xor
            self.sub = operator.xor
            self.neg = lambda a: a
        elif e == 1:
            self.add = lambda a, b: (a + b) % p
            self.sub = lambda a, b: (a - b) % p
            self.neg = lambda a: (-a) % p
        else:
            self.add = self._add_digits
            self.sub = self._sub_digits
            self.neg = self._neg_digits

    def _mul_raw(self, a: int, b: int) -> int:
        """Polynomial product of encoded elements, reduced by the modulus."""
        p, e = self.p, self.e
        if e == 1:
            return (a * b) % p
        da = [(a // p**i) % p for i in range(e)]
        db = [(b // p**i) % p for i in range(e)]
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        prod = [c % p for c in prod]
        _, rem = _poly_divmod(prod, list(self.modulus), p)
        out = 0
        for i, c in enumerate(rem):
            out += c * p**i
        return out

    def _build_tables(self) -> None:
        q = self.q
        # Find a generator of the multiplicative group by order testing.
        gen = None
        for cand in range(1, q):
            seen = 1
            x = cand
            while x != 1:
                x = self._mul_raw(x, cand)
                seen += 1
            if seen == q - 1:
                gen = cand
                break
        assert gen is not None
        exp = [1] * (q - 1)
        log = [0] * q
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self._mul_raw(x, gen)
        self.generator = gen
        self._exp = exp
        self._log = log

    def _add_digits(self, a: int, b: int) -> int:
        p = self.p
        out, shift = 0, 1
        for _ in range(self.e):
            out += ((a + b) % p) * shift
            a //= p
            b //= p
            shift *= p
        return out

    def _sub_digits(self, a: int, b: int) -> int:
        p = self.p
        out, shift = 0, 1
        for _ in range(self.e):
            out += ((a - b) % p) * shift
            a //= p
            b //= p
            shift *= p
        return out

    def _neg_digits(self, a: int) -> int:
        p = self.p
        out, shift = 0, 1
        for _ in range(self.e):
            out += ((-a) % p) * shift
            a //= p
            shift *= p
        return out

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("inverse of 0")
            return 0 if k else 1
        return self._exp[(self._log[a] * k) % (self.q - 1)]

    def elements(self) -> range:
        return range(self.q)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Field)
            and (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))

    def __repr__(self) -> str:
        if self.e == 1:
            return f"Field(GF({self.p}))"
        return f"Field(GF({self.p}^{self.e}), modulus={list(self.modulus)})"


_FIELD_CACHE: dict[tuple, Field] = {}


def field_new(p: int, e: int = 1, modulus: Sequence[int] | None = None) -> Field:
    """Return the field F_{p^e}, cached so repeated calls share tables."""
    key = (p, e, tuple(modulus) if modulus is not None else None)
    f = _FIELD_CACHE.get(key)
    if f is None:
        f = Field(p, e, modulus)
        _FIELD_CACHE[key] = f
    return f


def field_of_order(q: int) -> Field:
    """Return F_q for a prime power q, factoring q as p^e."""
    if q < 2:
        raise ValueError(f"field order must be >= 2, got {q}")
    n = q
    p = 2
    while p * p <= n:
        if n % p == 0:
            break
        p += 1
    else:
        p = n
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    if n != 1:
        raise ValueError(f"{q} is not a prime power")
    return field_new(p, e)


class Matrix:
    """Immutable matrix over a :class:`Field`, rows stored as tuples of ints."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: Field, rows: Iterable[Iterable[int]], ncols: int | None = None):
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if data:
            ncols_seen = len(data[0])
            if any(len(r) != ncols_seen for r in data):
                raise ValueError("ragged rows")
            if ncols is not None and ncols != ncols_seen:
                raise ValueError("ncols does not match row length")
            ncols = ncols_seen
        elif ncols is None:
            ncols = 0
        q = field.q
        for r in data:
            for x in r:
                if not 0 <= x < q:
                    raise ValueError(f"entry {x} outside field of order {q}")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", data)
        object.__setattr__(self, "nrows", len(data))
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Matrix":
        return cls(field, ((0,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, (tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), n)

    @classmethod
    def row_vector(cls, field: Field, entries: Iterable[int]) -> "Matrix":
        return cls(field, (tuple(entries),))

    @classmethod
    def column_vector(cls, field: Field, entries: Iterable[int]) -> "Matrix":
        return cls(field, ((int(x),) for x in entries), 1)

    # -- basic accessors ----------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def row(self, i: int) -> tuple[int, ...]:
        return self.rows[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.rows[ij[0]][ij[1]]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.rows == other.rows
            and self.ncols == other.ncols
        )

    def __hash__(self) -> int:
        return hash((self.field, self.rows, self.ncols))

    def __repr__(self) -> str:
        return f"Matrix({self.nrows}x{self.ncols}, {[list(r) for r in self.rows]})"

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        add = self.field.add
        return Matrix(
            self.field,
            (tuple(add(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)),
            self.ncols,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        sub = self.field.sub
        return Matrix(
            self.field,
            (tuple(sub(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)),
            self.ncols,
        )

    def __neg__(self) -> "Matrix":
        neg = self.field.neg
        return Matrix(self.field, (tuple(neg(a) for a in r) for r in self.rows), self.ncols)

    def __mul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.field != other.field:
            raise ValueError("fields differ")
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} * {other.shape}")
        f = self.field
        add, mul = f.add, f.mul
        bt = tuple(zip(*other.rows)) if other.nrows else ((),) * other.ncols
        out = []
        for ra in self.rows:
            orow = []
            for cb in bt:
                acc = 0
                for a, b in zip(ra, cb):
                    if a and b:
                        acc = add(acc, mul(a, b))
                orow.append(acc)
            out.append(tuple(orow))
        return Matrix(f, out, other.ncols)

    def scale(self, c: int) -> "Matrix":
        mul = self.field.mul
        return Matrix(self.field, (tuple(mul(c, a) for a in r) for r in self.rows), self.ncols)

    def transpose(self) -> "Matrix":
        return Matrix(self.field, zip(*self.rows) if self.nrows else (), self.nrows)

    # -- slicing -------------------------------------------------------

    def take_rows(self, idx: Sequence[int]) -> "Matrix":
        return Matrix(self.field, (self.rows[i] for i in idx), self.ncols)

    def take_cols(self, idx: Sequence[int]) -> "Matrix":
        return Matrix(self.field, (tuple(r[j] for j in idx) for r in self.rows), len(idx))

    def _check_same_shape(self, other: "Matrix") -> None:
        if self.field != other.field:
            raise ValueError("fields differ")
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")


def vstack(*mats: Matrix) -> Matrix:
    field = mats[0].field
    ncols = mats[0].ncols
    rows: list[tuple[int, ...]] = []
    for m in mats:
        if m.field != field or m.ncols != ncols:
            raise ValueError("vstack shape or field mismatch")
        rows.extend(m.rows)
    return Matrix(field, rows, ncols)


def hstack(*mats: Matrix) -> Matrix:
    field = mats[0].field
    nrows = mats[0].nrows
    for m in mats:
        if m.field != field or m.nrows != nrows:
            raise ValueError("hstack shape or field mismatch")
    rows = [sum((m.rows[i] for m in mats), ()) for i in range(nrows)]
    return Matrix(field, rows, sum(m.ncols for m in mats))


@dataclass(frozen=True)
class RrefResult:
    """Reduced row echelon form together with the applied row transform.

    ``transform`` is invertible with ``transform * input == rref``; ``pivots``
    lists the pivot column of each nonzero row in order.
    """

    rref: Matrix
    pivots: tuple[int, ...]
    transform: Matrix

    @property
    def rank(self) -> int:
        return len(self.pivots)


def mat_rref(m: Matrix) -> RrefResult:
    """Canonical reduced row echelon form, scanning columns left to right."""
    f = m.field
    add, mul, inv, neg = f.add, f.mul, f.inv, f.neg
    n, c = m.nrows, m.ncols
    work = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(m.rows)]
    pivots: list[int] = []
    r = 0
    for col in range(c):
        sel = None
        for i in range(r, n):
            if work[i][col]:
                sel = i
                break
        if sel is None:
            continue
        work[r], work[sel] = work[sel], work[r]
        piv = inv(work[r][col])
        if piv != 1:
            work[r] = [mul(piv, x) for x in work[r]]
        for i in range(n):
            if i != r and work[i][col]:
                factor = neg(work[i][col])
                rowr = work[r]
                rowi = work[i]
                for j in range(col, c + n):
                    if rowr[j]:
                        rowi[j] = add(rowi[j], mul(factor, rowr[j]))
        pivots.append(col)
        r += 1
        if r == n:
            break
    red = Matrix(f, (tuple(w[:c]) for w in work), c)
    tr = Matrix(f, (tuple(w[c:]) for w in work), n)
    return RrefResult(red, tuple(pivots), tr)


def mat_rank(m: Matrix) -> int:
    """Rank by plain forward elimination, cheaper than the full RREF."""
    f = m.field
    add, mul, inv, neg = f.add, f.mul, f.inv, f.neg
    work = [list(r) for r in m.rows]
    n, c = m.nrows, m.ncols
    r = 0
    for col in range(c):
        sel = None
        for i in range(r, n):
            if work[i][col]:
                sel = i
                break
        if sel is None:
            continue
        work[r], work[sel] = work[sel], work[r]
        piv = inv(work[r][col])
        if piv != 1:
            work[r] = [mul(piv, x) for x in work[r]]
        rowr = work[r]
        for i in range(r + 1, n):
            if work[i][col]:
                factor = neg(work[i][col])
                rowi = work[i]
                for j in range(col, c):
                    if rowr[j]:
                        rowi[j] = add(rowi[j], mul(factor, rowr[j]))
        r += 1
        if r == n:
            break
    return r


def row_basis(m: Matrix) -> Matrix:
    """Nonzero rows of the RREF: the canonical basis of the row space."""
    res = mat_rref(m)
    return res.rref.take_rows(range(res.rank))


def null_space(m: Matrix) -> Matrix:
    """Canonical right kernel basis, returned as columns of an ncols x k matrix.

    Basis vector for free column j has a 1 in position j, zeros in the other
    free positions, and pivot entries filled in from the RREF.  ``m * result``
    is always the zero matrix and the columns are linearly independent.
    """
    f = m.field
    res = mat_rref(m)
    piv = set(res.pivots)
    free = [j for j in range(m.ncols) if j not in piv]
    neg = f.neg
    cols = []
    for j in free:
        v = [0] * m.ncols
        v[j] = 1
        for i, pc in enumerate(res.pivots):
            v[pc] = neg(res.rref[i, j])
        cols.append(v)
    if not cols:
        return Matrix(f, ((() for _ in range(m.ncols))), 0)
    return Matrix(f, zip(*cols), len(cols))


def solve_left(a: Matrix, b: Matrix) -> Matrix | None:
    """Canonical solution X of X * a == b, or None when no solution exists.

    Free variables are set to zero, so X uses only the pivot rows of ``a``.
    Solves row by row: each row of ``b`` must lie in the row space of ``a``.
    """
    if a.field != b.field or a.ncols != b.ncols:
        raise ValueError("solve_left shape or field mismatch")
    f = a.field
    res = mat_rref(a)
    rk = res.rank
    red = res.rref
    out_rows = []
    for brow in b.rows:
        # Reduce brow against the RREF rows, tracking coefficients.
        vec = list(brow)
        coefs = [0] * rk
        sub, mul = f.sub, f.mul
        for i, pc in enumerate(res.pivots):
            c = vec[pc]
            if c:
                coefs[i] = c
                rr = red.rows[i]
                vec = [sub(x, mul(c, y)) for x, y in zip(vec, rr)]
        if any(vec):
            return None
        # Express through the original rows: coefs row times transform rows.
        add = f.add
        xrow = [0] * a.nrows
        for i, c in enumerate(coefs):
            if c:
                trow = res.transform.rows[i]
                for j, t in enumerate(trow):
                    if t:
                        xrow[j] = add(xrow[j], mul(c, t))
        out_rows.append(tuple(xrow))
    return Matrix(f, out_rows, a.nrows)


def right_inverse(a: Matrix) -> Matrix | None:
    """Canonical B with a * B == identity, or None if a has deficient row rank."""
    sol = solve_left(a.transpose(), Matrix.identity(a.field, a.nrows))
    return sol.transpose() if sol is not None else None


def row_space_contains(a: Matrix, v: Matrix) -> bool:
    """True when every row of v lies in the row space of a."""
    return solve_left(a, v) is not None


# -- counting ---------------------------------------------------------


def gaussian_binomial(s: int, r: int, q: int) -> int:
    """Number of r-dimensional subspaces of F_q^s, exact integer."""
    if r < 0 or s < 0:
        raise ValueError("negative dimension")
    if r > s:
        return 0
    num = 1
    den = 1
    for j in range(r):
        num *= q**s - q**j
        den *= q**r - q**j
    return num // den


def hamming_weight(m: Matrix) -> int:
    """Number of nonzero rows; for column vectors, the usual Hamming weight."""
    return sum(1 for r in m.rows if any(r))


def rank_weight(m: Matrix) -> int:
    return mat_rank(m)


def weight(m: Matrix, metric: str) -> int:
    """Weight of a matrix under ``metric`` in {"hamming", "rank"}."""
    if metric == "hamming":
        return hamming_weight(m)
    if metric == "rank":
        return rank_weight(m)
    raise ValueError(f"unknown metric {metric!r}")


def sphere_vol_hamming(n: int, radius: int, q: int) -> int:
    """Number of vectors in F_q^n within Hamming distance ``radius`` of a point."""
    radius = min(radius, n)
    if radius < 0:
        return 0
    return sum(math.comb(n, j) * (q - 1) ** j for j in range(radius + 1))


def sphere_vol_rank(nrows: int, ncols: int, radius: int, q: int) -> int:
    """Number of nrows x ncols matrices over F_q of rank at most ``radius``.

    Counts rank-r matrices as (choices of column space) x (full-rank maps
    onto it): prod_{j<r} (q^nrows - q^j) * qbinom(ncols, r).
    """
    radius = min(radius, nrows, ncols)
    if radius < 0:
        return 0
    total = 0
    for r in range(radius + 1):
        surj = 1
        for j in range(r):
            surj *= q**nrows - q**j
        total += surj * gaussian_binomial(ncols, r, q)
    return total


# -- enumeration helpers ----------------------------------------------


def iter_vectors(field: Field, n: int) -> Iterator[tuple[int, ...]]:
    """All vectors of F_q^n in odometer order, first coordinate fastest."""
    q = field.q
    v = [0] * n
    while True:
        yield tuple(v)
        i = 0
        while i < n:
            v[i] += 1
            if v[i] < q:
                break
            v[i] = 0
            i += 1
        else:
            return
        if n == 0:
            return


def iter_subspace_bases(field: Field, ambient: int, dim: int) -> Iterator[Matrix]:
    """Canonical RREF bases of every dim-dimensional subspace of F_q^ambient.

    Enumerates pivot column choices lexicographically, then the free entries
    in odometer order, so each subspace appears exactly once.
    """
    if dim == 0:
        yield Matrix(field, (), ambient)
        return
    if dim > ambient:
        return
    q = field.q
    for pivots in itertools.combinations(range(ambient), dim):
        # Free slots: entries (i, j) right of pivot i, excluding pivot columns
        # of later rows (those are forced to 0 by reducedness).
        slots = []
        pivset = set(pivots)
        for i in range(dim):
            for j in range(pivots[i] + 1, ambient):
                if j not in pivset:
                    slots.append((i, j))
        base = [[0] * ambient for _ in range(dim)]
        for i, pc in enumerate(pivots):
            base[i][pc] = 1
        if not slots:
            yield Matrix(field, base, ambient)
            continue
        for vals in iter_vectors(field, len(slots)):
            for (i, j), v in zip(slots, vals):
                base[i][j] = v
            yield Matrix(field, base, ambient)
