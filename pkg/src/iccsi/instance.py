"""Problem instances for index coding with coded side information.

An instance bundles the field, the message shape (n rows of t symbols each),
the sender's row space V_S (d_S x n), and per-user data: a cache matrix V
(d_i x n, the rows whose combinations the user already holds) and a request
row R (1 x n) describing the linear combination the user wants.  A valid
request lies inside the sender space but outside the user's cached space.

V_S and every V are normalized to canonical reduced-echelon bases on
construction, so two instances describing the same spaces compare equal and
rank-deficient inputs are silently deduplicated.

The JSON file format::

    {
      "p": 2, "e": 1,            # field F_{p^e}
      "t": 1,                    # symbols per message row
      "n": 4,
      "sender": [[1,0,0,0], ...],
      "users": [{"V": [[...], ...], "R": [...]}, ...],
      "modulus": [1,1,1]         # optional, little-endian, extension fields
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Iterator, Sequence

from .galois import (
    Field,
    Matrix,
    field_new,
    mat_rank,
    null_space,
    row_basis,
    row_space_contains,
    vstack,
)

# Default cap on elements visited by exhaustive enumerations.
DEFAULT_BUDGET = 1 << 22


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would visit more elements than allowed."""


class InstanceError(ValueError):
    """The instance data violates the format or the validity conditions."""


@dataclass(frozen=True)
class UserSpec:
    """One user's cached space basis V and requested combination R."""

    V: Matrix
    R: Matrix

    @property
    def d(self) -> int:
        return self.V.nrows


@dataclass(frozen=True)
class IccsiInstance:
    field: Field
    t: int
    n: int
    V_S: Matrix
    users: tuple[UserSpec, ...]

    @property
    def m(self) -> int:
        return len(self.users)

    @property
    def d_S(self) -> int:
        return self.V_S.nrows

    @property
    def q(self) -> int:
        return self.field.q

    def d(self, i: int) -> int:
        return self.users[i].d

    def request_matrix(self) -> Matrix:
        """All user requests stacked into an m x n matrix."""
        return vstack(*(u.R for u in self.users))


def make_instance(
    field: Field,
    t: int,
    n: int,
    sender_rows: Iterable[Iterable[int]],
    users: Sequence[tuple[Iterable[Iterable[int]], Iterable[int]]],
) -> IccsiInstance:
    """Build and validate an instance from raw row data.

    ``users`` is a sequence of (V rows, R row) pairs.  Raises
    :class:`InstanceError` with the offending user index on bad data.
    """
    if t < 1:
        raise InstanceError(f"t must be >= 1, got {t}")
    if n < 1:
        raise InstanceError(f"n must be >= 1, got {n}")
    try:
        vs_raw = Matrix(field, sender_rows, n)
    except ValueError as exc:
        raise InstanceError(f"sender matrix: {exc}") from None
    if vs_raw.ncols != n:
        raise InstanceError(f"sender matrix has {vs_raw.ncols} columns, expected {n}")
    V_S = row_basis(vs_raw)
    specs = []
    for i, (v_rows, r_row) in enumerate(users):
        try:
            v_raw = Matrix(field, v_rows, n)
            r = Matrix(field, (r_row,), n)
        except ValueError as exc:
            raise InstanceError(f"user {i}: {exc}") from None
        if v_raw.ncols != n or r.ncols != n:
            raise InstanceError(f"user {i}: row length does not match n={n}")
        V = row_basis(v_raw)
        if r.is_zero():
            raise InstanceError(f"user {i}: request row is zero")
        if not row_space_contains(V_S, r):
            raise InstanceError(f"user {i}: request outside the sender space")
        if row_space_contains(V, r):
            raise InstanceError(f"user {i}: request already in the cached space")
        specs.append(UserSpec(V, r))
    if not specs:
        raise InstanceError("instance needs at least one user")
    return IccsiInstance(field, t, n, V_S, tuple(specs))


def parse_instance(source: str | dict) -> IccsiInstance:
    """Parse an instance from a JSON string or an already-decoded dict."""
    if isinstance(source, str):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"invalid JSON: {exc}") from None
    else:
        doc = source
    if not isinstance(doc, dict):
        raise InstanceError("top-level JSON value must be an object")
    required = {"p", "e", "t", "n", "sender", "users"}
    missing = required - doc.keys()
    if missing:
        raise InstanceError(f"missing keys: {sorted(missing)}")
    try:
        p, e, t, n = (int(doc[k]) for k in ("p", "e", "t", "n"))
    except (TypeError, ValueError):
        raise InstanceError("p, e, t, n must be integers") from None
    modulus = doc.get("modulus")
    try:
        fld = field_new(p, e, modulus)
    except ValueError as exc:
        raise InstanceError(str(exc)) from None
    users_doc = doc["users"]
    if not isinstance(users_doc, list):
        raise InstanceError("users must be a list")
    users = []
    for i, u in enumerate(users_doc):
        if not isinstance(u, dict) or "V" not in u or "R" not in u:
            raise InstanceError(f"user {i}: must be an object with V and R")
        users.append((u["V"], u["R"]))
    return make_instance(fld, t, n, doc["sender"], users)


def load_instance(path: str) -> IccsiInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def serialize_instance(inst: IccsiInstance) -> dict:
    """Dict form of the instance; json.dumps of it parses back to equality."""
    doc = {
        "p": inst.field.p,
        "e": inst.field.e,
        "t": inst.t,
        "n": inst.n,
        "sender": [list(r) for r in inst.V_S.rows],
        "users": [
            {"V": [list(r) for r in u.V.rows], "R": list(u.R.rows[0])} for u in inst.users
        ],
    }
    if inst.field.e > 1:
        doc["modulus"] = list(inst.field.modulus)
    return doc


def save_instance(inst: IccsiInstance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_compact(serialize_instance(inst)))
        fh.write("\n")


def dump_compact(doc: dict) -> str:
    """JSON with one top-level key per line and compact values."""
    parts = [f'"{k}": {json.dumps(v)}' for k, v in doc.items()]
    return "{\n " + ",\n ".join(parts) + "\n}"


def from_icsi(
    n: int,
    demands: Sequence[int],
    side_sets: Sequence[Iterable[int]],
    p: int = 2,
    e: int = 1,
    t: int = 1,
) -> IccsiInstance:
    """Classical index coding instance: uncoded caches and unit demands.

    ``demands[i]`` is the 0-based message index user i wants; ``side_sets[i]``
    the set of message indices it holds.  The sender knows everything.
    """
    if len(demands) != len(side_sets):
        raise InstanceError("demands and side_sets length mismatch")
    fld = field_new(p, e)
    users = []
    for i, (f_i, xs) in enumerate(zip(demands, side_sets)):
        xs = sorted(set(xs))
        if not 0 <= f_i < n:
            raise InstanceError(f"user {i}: demand index {f_i} out of range")
        if any(not 0 <= j < n for j in xs):
            raise InstanceError(f"user {i}: side information index out of range")
        if f_i in xs:
            raise InstanceError(f"user {i}: demand {f_i} already in side information")
        v_rows = [[1 if c == j else 0 for c in range(n)] for j in xs]
        r_row = [1 if c == f_i else 0 for c in range(n)]
        users.append((v_rows, r_row))
    ident = [[1 if c == j else 0 for c in range(n)] for j in range(n)]
    return make_instance(fld, t, n, ident, users)


def intersection_basis(a: Matrix, b: Matrix) -> Matrix:
    """Canonical basis of rowspace(a) meet rowspace(b), one basis row per line.

    Uses the kernel of the stacked matrix: a left-kernel vector (x | y) of
    [a; b] gives x*a = -(y*b), an element of the intersection.
    """
    if a.field != b.field or a.ncols != b.ncols:
        raise ValueError("intersection shape or field mismatch")
    ra = row_basis(a)
    rb = row_basis(b)
    if ra.nrows == 0 or rb.nrows == 0:
        return Matrix(a.field, (), a.ncols)
    stacked = vstack(ra, rb)
    left_kernel = null_space(stacked.transpose())  # columns are (x | y)
    rows = []
    for k in range(left_kernel.ncols):
        coef = left_kernel.col(k)[: ra.nrows]
        vec = Matrix(a.field, (coef,), ra.nrows) * ra
        rows.append(vec.rows[0])
    return row_basis(Matrix(a.field, rows, a.ncols))


def _count_kernel_dim(inst: IccsiInstance, i: int) -> int:
    return inst.n - inst.users[i].d


def confusable_count(inst: IccsiInstance, i: int) -> int:
    """|Z^(i)|: matrices Z with V^(i) Z = 0 and R_i Z != 0, counted exactly."""
    q, t = inst.q, inst.t
    k = _count_kernel_dim(inst, i)
    return q ** (k * t) - q ** ((k - 1) * t)


def iter_confusable(
    inst: IccsiInstance, i: int, budget: int | None = None
) -> Iterator[Matrix]:
    """Yield every confusable matrix Z for user i in a deterministic order.

    Z ranges over n x t matrices with V^(i) Z = 0 and R_i Z != 0.  They are
    generated as K * C where the columns of K form the canonical kernel basis
    of V^(i) and C runs over F_q^{k x t} in odometer order (entry (0, 0)
    fastest, column-major).  Raises :class:`BudgetExceeded` when q^(k t)
    exceeds the budget.
    """
    if budget is None:
        budget = DEFAULT_BUDGET
    u = inst.users[i]
    K = null_space(u.V)  # n x k
    k = K.ncols
    t = inst.t
    q = inst.q
    if q ** (k * t) > budget:
        raise BudgetExceeded(
            f"user {i}: kernel enumeration size {q}^{k * t} exceeds budget {budget}"
        )
    RK = u.R * K  # 1 x k, detects R_i (K C) = 0 cheaply
    f = inst.field
    add, mul = f.add, f.mul
    kcols = [K.col(j) for j in range(k)]
    n = inst.n
    for flat in _odometer(q, k * t):
        # C column-major: column c holds flat[c*k : (c+1)*k]
        rzero = True
        for c in range(t):
            acc = 0
            for j in range(k):
                v = flat[c * k + j]
                if v and RK.rows[0][j]:
                    acc = add(acc, mul(RK.rows[0][j], v))
            if acc:
                rzero = False
                break
        if rzero:
            continue
        rows = [[0] * t for _ in range(n)]
        for c in range(t):
            for j in range(k):
                v = flat[c * k + j]
                if v:
                    col = kcols[j]
                    for r in range(n):
                        if col[r]:
                            rows[r][c] = add(rows[r][c], mul(v, col[r]))
        yield Matrix(f, rows, t)


def sample_confusable(
    inst: IccsiInstance, i: int, count: int, seed: int
) -> Iterator[Matrix]:
    """Yield ``count`` uniform draws from user i's confusable set.

    Each user gets its own deterministic stream derived from (seed, i), so
    per-user checks stay reproducible regardless of evaluation order.
    """
    import numpy as np

    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, i])))
    u = inst.users[i]
    K = null_space(u.V)
    k = K.ncols
    q, t = inst.q, inst.t
    produced = 0
    while produced < count:
        c = rng.integers(0, q, size=(k, t))
        C = Matrix(inst.field, c.tolist(), t)
        if (u.R * K * C).is_zero():
            continue
        produced += 1
        yield K * C


def _odometer(q: int, length: int) -> Iterator[tuple[int, ...]]:
    digits = [0] * length
    while True:
        yield tuple(digits)
        i = 0
        while i < length:
            digits[i] += 1
            if digits[i] < q:
                break
            digits[i] = 0
            i += 1
        else:
            return
        if length == 0:
            return
