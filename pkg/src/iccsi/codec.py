"""Encoder construction and error-correction verification.

An encoding matrix L (N x d_S) turns the sender's coded rows into the N
broadcast rows L V_S X.  Three constructions live here: the coset-derived
encoder of optimal length (the min-rank witness), uniform random search,
and concatenation of a realizing encoder with an outer code of minimum
distance 2 delta + 1.

Error-correction verification follows the confusable-set criterion: L
corrects any error of weight <= delta at every user exactly when each
confusable difference Z maps to weight(L V_S Z) >= 2 delta + 1.  In the
Hamming metric the check reduces to the one-symbol-per-row view of the
instance; in the rank metric it ranges over confusables of rank at least
2 delta + 1, with the message space taken as the full space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .galois import (
    Matrix,
    field_of_order,
    hamming_weight,
    iter_vectors,
    mat_rank,
    rank_weight,
)
from .instance import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    IccsiInstance,
    iter_confusable,
    sample_confusable,
)
from .minrank import min_rank, realizes_ic

HAMMING = "hamming"
RANK = "rank"

_WEIGHT = {HAMMING: hamming_weight, RANK: rank_weight}

DEFAULT_SAMPLES = 100_000


@dataclass(frozen=True)
class EcicCertificate:
    """Outcome of an error-correction check of one encoder.

    ``violations`` holds (user, Z) witnesses with Z confusable for that user
    and weight(L V_S Z) <= 2 delta; scanning a user stops at its first
    witness.  ``trials`` is the number of confusables tested; in sampled
    mode the certificate is evidence, not proof.
    """

    delta: int
    metric: str
    mode: str
    trials: int
    violations: tuple[tuple[int, Matrix], ...]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "metric": self.metric,
            "mode": self.mode,
            "trials": self.trials,
            "violations": [
                [i, [list(r) for r in z.rows]] for i, z in self.violations
            ],
        }


@dataclass(frozen=True)
class EncodingMatrix:
    """An encoder L with its cached broadcast matrix L V_S.

    ``provenance`` records how the encoder was obtained: "coset" (min-rank
    witness), "random", or "concatenated".
    """

    L: Matrix
    lvs: Matrix
    provenance: str
    certificate: EcicCertificate | None = None

    @property
    def N(self) -> int:
        return self.L.nrows


def make_encoder(
    L: Matrix,
    inst: IccsiInstance,
    provenance: str,
    certificate: EcicCertificate | None = None,
) -> EncodingMatrix:
    if L.ncols != inst.d_S:
        raise ValueError(f"L has {L.ncols} columns, expected d_S={inst.d_S}")
    return EncodingMatrix(L, L * inst.V_S, provenance, certificate)


def coset_encoder(inst: IccsiInstance, budget: int | None = None) -> EncodingMatrix:
    """Shortest realizing encoder, derived from the min-rank witness.

    The broadcast rows span the row space of the minimizing A + R, so the
    length equals the min-rank and every user can decode.
    """
    res = min_rank(inst, budget=budget)
    L = res.witness
    assert mat_rank(L) == L.nrows == res.kappa
    assert all(realizes_ic(L, inst))
    return make_encoder(L, inst, "coset")


@dataclass(frozen=True)
class RandomSearchResult:
    encoder: EncodingMatrix | None
    attempts: int

    @property
    def found(self) -> bool:
        return self.encoder is not None


def random_ic_search(
    inst: IccsiInstance,
    N: int,
    delta: int = 0,
    metric: str = HAMMING,
    max_attempts: int = 1000,
    seed: int = 0,
    budget: int | None = None,
    samples: int = DEFAULT_SAMPLES,
) -> RandomSearchResult:
    """Draw uniform N x d_S matrices until one passes, or give up.

    Attempts are sequential on a single seeded stream, so a fixed seed
    reproduces the same encoder.  A length-0 code can never satisfy any
    user, so N <= 0 reports not-found without drawing.
    """
    if N <= 0:
        return RandomSearchResult(None, 0)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed])))
    q, d_S = inst.q, inst.d_S
    for attempt in range(1, max_attempts + 1):
        entries = rng.integers(0, q, size=(N, d_S))
        L = Matrix(inst.field, entries.tolist(), d_S)
        if delta == 0:
            if all(realizes_ic(L, inst)):
                cert = EcicCertificate(0, metric, "exhaustive", 0, ())
                return RandomSearchResult(make_encoder(L, inst, "random", cert), attempt)
        else:
            cert = verify_ecic(
                L, inst, delta, metric, budget=budget, samples=samples, seed=seed
            )
            if cert.passed:
                return RandomSearchResult(make_encoder(L, inst, "random", cert), attempt)
    return RandomSearchResult(None, max_attempts)


def one_symbol_view(inst: IccsiInstance) -> IccsiInstance:
    """The t = 1 instance with the same spaces and requests."""
    if inst.t == 1:
        return inst
    return IccsiInstance(inst.field, 1, inst.n, inst.V_S, inst.users)


def verify_ecic(
    L: Matrix,
    inst: IccsiInstance,
    delta: int,
    metric: str = HAMMING,
    mode: str = "auto",
    budget: int | None = None,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> EcicCertificate:
    """Check that L corrects every error of weight <= delta at every user.

    Hamming checks run on the one-symbol view, which is equivalent for any
    t.  Rank checks keep the instance's t and only confusables of rank at
    least 2 delta + 1 are constrained.  ``mode`` is "exhaustive", "sampled",
    or "auto" (exhaustive per user while the set fits the budget).
    """
    if metric not in _WEIGHT:
        raise ValueError(f"unknown metric {metric!r}")
    if mode not in ("auto", "exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    if budget is None:
        budget = DEFAULT_BUDGET
    if L.ncols != inst.d_S:
        raise ValueError(f"L has {L.ncols} columns, expected d_S={inst.d_S}")
    view = one_symbol_view(inst) if metric == HAMMING else inst
    lvs = L * view.V_S
    need = 2 * delta + 1
    wfun = _WEIGHT[metric]
    violations: list[tuple[int, Matrix]] = []
    trials = 0
    out_mode = "exhaustive"
    for i in range(view.m):
        size = view.q ** ((view.n - view.users[i].d) * view.t)
        sampled = mode == "sampled" or (mode == "auto" and size > budget)
        if mode == "exhaustive" and size > budget:
            raise BudgetExceeded(
                f"user {i}: confusable set size {size} exceeds budget {budget}"
            )
        if sampled:
            out_mode = "sampled"
            gen = sample_confusable(view, i, samples, seed)
        else:
            gen = iter_confusable(view, i, budget=budget)
        for z in gen:
            if metric == RANK and rank_weight(z) < need:
                continue
            trials += 1
            if wfun(lvs * z) < need:
                violations.append((i, z))
                break
    return EcicCertificate(delta, metric, out_mode, trials, tuple(violations))


def min_distance_cols(g: Matrix, budget: int | None = None) -> int:
    """Minimum Hamming weight of g u over nonzero coefficient vectors u.

    The code here is the column span of g, matching the outer-code role in
    concatenation where codewords multiply the inner encoder from the left.
    """
    if budget is None:
        budget = DEFAULT_BUDGET
    f = g.field
    k = g.ncols
    if k == 0:
        raise ValueError("empty generator")
    if f.q**k > budget:
        raise BudgetExceeded(f"codeword enumeration size {f.q}^{k} exceeds budget")
    best = g.nrows + 1
    for coef in iter_vectors(f, k):
        if not any(coef):
            continue
        word = g * Matrix.column_vector(f, coef)
        w = hamming_weight(word)
        if w < best:
            best = w
            if best == 1:
                break
    return best


def concat_kappa_bound(
    inst: IccsiInstance,
    delta: int,
    outer_generator: Matrix,
    budget: int | None = None,
) -> EncodingMatrix:
    """Concatenate the coset encoder with an outer distance-(2 delta + 1) code.

    ``outer_generator`` is N x kappa: its columns span the outer code, one
    column per inner broadcast row.  The product corrects delta errors
    because every nonzero inner output is carried by an outer codeword.
    """
    inner = coset_encoder(inst, budget=budget)
    kappa = inner.N
    g = outer_generator
    if g.field != inst.field:
        raise ValueError("outer generator field mismatch")
    if g.ncols != kappa:
        raise ValueError(
            f"outer generator has {g.ncols} columns, expected the min-rank {kappa}"
        )
    if mat_rank(g) != kappa:
        raise ValueError("outer generator must have full column rank")
    dist = min_distance_cols(g, budget=budget)
    if dist < 2 * delta + 1:
        raise ValueError(f"outer code distance {dist} < {2 * delta + 1}")
    L = g * inner.L
    cert = verify_ecic(L, inst, delta, HAMMING, budget=budget)
    return make_encoder(L, inst, "concatenated", cert)


def extended_rs_generator(q: int, N: int, k: int) -> Matrix:
    """k x N generator evaluating degree-<k polynomials, any k columns free.

    Columns evaluate at the first N - 1 field elements in encoded order,
    then at infinity (leading coefficient); N may reach q + 1.
    """
    f = field_of_order(q)
    if not 1 <= k <= N:
        raise ValueError(f"need 1 <= k <= N, got k={k}, N={N}")
    if N > q + 1:
        raise ValueError(f"length {N} exceeds q + 1 = {q + 1}")
    rows = []
    for r in range(k):
        row = [f.pow(x, r) for x in range(N - 1)]
        row.append(1 if r == k - 1 else 0)
        rows.append(row)
    g = Matrix(f, rows, N)
    if N <= 8:
        assert all(
            mat_rank(g.take_cols(cols)) == k for cols in combinations(range(N), k)
        )
    return g


def encoder_to_dict(enc: EncodingMatrix) -> dict:
    cert = enc.certificate.to_dict() if enc.certificate is not None else None
    return {
        "N": enc.N,
        "L": [list(r) for r in enc.L.rows],
        "provenance": enc.provenance,
        "certificate": cert,
    }


def encoder_to_json(enc: EncodingMatrix) -> str:
    from .instance import dump_compact

    return dump_compact(encoder_to_dict(enc))


def encoder_from_dict(doc: dict, inst: IccsiInstance) -> EncodingMatrix:
    L = Matrix(inst.field, doc["L"], inst.d_S)
    if L.nrows != int(doc["N"]):
        raise ValueError(f"declared N={doc['N']} but L has {L.nrows} rows")
    cert_doc = doc.get("certificate")
    cert = None
    if cert_doc is not None:
        cert = EcicCertificate(
            int(cert_doc["delta"]),
            cert_doc["metric"],
            cert_doc["mode"],
            int(cert_doc["trials"]),
            tuple(
                (int(i), Matrix(inst.field, rows, len(rows[0])))
                for i, rows in cert_doc["violations"]
            ),
        )
    return make_encoder(L, inst, doc.get("provenance", "file"), cert)


def load_encoder(path: str, inst: IccsiInstance) -> EncodingMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return encoder_from_dict(json.load(fh), inst)


def save_encoder(enc: EncodingMatrix, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(encoder_to_json(enc))
        fh.write("\n")
