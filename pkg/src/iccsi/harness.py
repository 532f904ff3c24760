"""Monte-Carlo simulation of noisy broadcasts, end to end.

Each trial draws a uniform message, encodes it, injects an error of exact
weight (Hamming: that many nonzero rows; rank: a product of uniform factors
resampled to exact rank), decodes at every user, and tallies successes,
detected failures, and silently wrong answers.

Every trial derives its own random stream from (seed, trial index), so
reports are bit-identical across runs and independent of evaluation order;
``SimReport.stable_json`` excludes the wall time for that comparison.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

import numpy as np

from .codec import (
    HAMMING,
    RANK,
    EncodingMatrix,
    coset_encoder,
    load_encoder,
    random_ic_search,
    verify_ecic,
)
from .decoders import (
    build_user_decoder,
    rank_trap_decode,
    solve_demand,
    syndrome_decode,
    trap_pad,
)
from .galois import Matrix, hstack, rank_weight
from .instance import IccsiInstance, load_instance


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: what to load, how to corrupt, how much to run.

    ``encoder`` names the source: "coset", "random", or a path to an
    encoder JSON file.  ``error_weight`` is the injected magnitude (nonzero
    rows for Hamming, rank for rank) and may exceed the design ``delta`` to
    measure failure behavior.  ``trap_pad`` is the rank-mode pad size v.
    """

    instance: str
    encoder: str = "coset"
    metric: str = HAMMING
    delta: int = 0
    error_weight: int = 0
    trap_pad: int = 0
    trials: int = 1000
    seed: int = 0
    lvs_shared: bool = True
    guarantee: bool = False

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "encoder": self.encoder,
            "metric": self.metric,
            "delta": self.delta,
            "error_weight": self.error_weight,
            "trap_pad": self.trap_pad,
            "trials": self.trials,
            "seed": self.seed,
            "lvs_shared": self.lvs_shared,
            "guarantee": self.guarantee,
        }


@dataclass(frozen=True)
class UserTally:
    success: int
    detected: int
    undetected: int


@dataclass(frozen=True)
class SimReport:
    config: dict
    trials: int
    users: tuple[UserTally, ...]
    wall_time: float

    def to_dict(self, with_wall_time: bool = True) -> dict:
        users = []
        for u in self.users:
            rate = u.success / self.trials if self.trials else 0.0
            lo, hi = wilson_interval(u.success, self.trials)
            users.append(
                {
                    "success": u.success,
                    "detected": u.detected,
                    "undetected": u.undetected,
                    "rate": rate,
                    "wilson": [lo, hi],
                }
            )
        doc = {"config": self.config, "trials": self.trials, "users": users}
        if with_wall_time:
            doc["wall_time"] = self.wall_time
        return doc

    def stable_json(self) -> str:
        return json.dumps(self.to_dict(with_wall_time=False), sort_keys=True)


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials == 0:
        return (0.0, 1.0)
    p = successes / trials
    zz = z * z
    denom = 1.0 + zz / trials
    center = (p + zz / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + zz / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def resolve_encoder(cfg: SimConfig, inst: IccsiInstance) -> EncodingMatrix:
    """Build or load the encoder a config names."""
    if cfg.encoder == "coset":
        return coset_encoder(inst)
    if cfg.encoder == "random":
        length = coset_encoder(inst).N + 2 * cfg.delta
        res = random_ic_search(
            inst, length, cfg.delta, cfg.metric, max_attempts=1000, seed=cfg.seed
        )
        if not res.found:
            raise ValueError(
                f"random search found no length-{length} encoder in {res.attempts} attempts"
            )
        return res.encoder
    return load_encoder(cfg.encoder, inst)


def run_simulation(
    cfg: SimConfig,
    inst: IccsiInstance | None = None,
    encoder: EncodingMatrix | None = None,
) -> SimReport:
    """Run the configured trials and tally outcomes per user.

    ``inst`` and ``encoder`` may be passed directly to skip file loading.
    With ``guarantee`` set the encoder must verify at the design delta
    before any trial runs.
    """
    t0 = time.perf_counter()
    if cfg.metric not in (HAMMING, RANK):
        raise ValueError(f"unknown metric {cfg.metric!r}")
    if cfg.trials < 1:
        raise ValueError(f"trials must be >= 1, got {cfg.trials}")
    if cfg.error_weight < 0 or cfg.delta < 0 or cfg.trap_pad < 0:
        raise ValueError("delta, error_weight, and trap_pad must be >= 0")
    if inst is None:
        inst = load_instance(cfg.instance)
    enc = encoder if encoder is not None else resolve_encoder(cfg, inst)
    if cfg.guarantee:
        cert = verify_ecic(enc.L, inst, cfg.delta, cfg.metric)
        if not cert.passed:
            raise ValueError(
                f"encoder fails {cfg.metric} verification at delta={cfg.delta}"
            )
    n, t, q, m = inst.n, inst.t, inst.q, inst.m
    requests = [u.R for u in inst.users]
    caches = [u.V for u in inst.users]
    tallies = [[0, 0, 0] for _ in range(m)]
    decoders = None
    if cfg.metric == HAMMING:
        if cfg.error_weight > enc.N:
            raise ValueError("error weight exceeds the code length")
        decoders = [build_user_decoder(inst, enc.L, i) for i in range(m)]
    for trial in range(cfg.trials):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([cfg.seed, trial]))
        )
        X = Matrix(inst.field, rng.integers(0, q, size=(n, t)).tolist(), t)
        wanted = [r * X for r in requests]
        lams = [v * X for v in caches]
        if cfg.metric == HAMMING:
            Y = enc.lvs * X + _hamming_error(rng, inst.field, enc.N, t, cfg.error_weight)
            for i in range(m):
                out = syndrome_decode(decoders[i], Y, lams[i], cfg.delta)
                _tally(tallies[i], out.demand, wanted[i])
        else:
            _rank_trial(cfg, inst, enc, rng, X, lams, wanted, tallies)
    report = SimReport(
        cfg.to_dict(),
        cfg.trials,
        tuple(UserTally(*t3) for t3 in tallies),
        time.perf_counter() - t0,
    )
    for u in report.users:
        assert u.success + u.detected + u.undetected == cfg.trials
    return report


def _tally(row: list[int], demand: Matrix | None, wanted: Matrix) -> None:
    if demand is None:
        row[1] += 1
    elif demand == wanted:
        row[0] += 1
    else:
        row[2] += 1


def _hamming_error(rng, field, N: int, t: int, weight: int) -> Matrix:
    rows = [[0] * t for _ in range(N)]
    if weight:
        support = rng.choice(N, size=weight, replace=False)
        for r in support:
            vec = rng.integers(0, field.q, size=t)
            while not vec.any():
                vec = rng.integers(0, field.q, size=t)
            rows[int(r)] = [int(x) for x in vec]
    return Matrix(field, rows, t)


def _rank_error(rng, field, nrows: int, ncols: int, r: int) -> Matrix:
    if r == 0:
        return Matrix.zeros(field, nrows, ncols)
    while True:
        a = Matrix(field, rng.integers(0, field.q, size=(nrows, r)).tolist(), r)
        b = Matrix(field, rng.integers(0, field.q, size=(r, ncols)).tolist(), ncols)
        w = a * b
        if rank_weight(w) == r:
            return w


def _rank_trial(cfg, inst, enc, rng, X, lams, wanted, tallies) -> None:
    v = cfg.trap_pad
    if cfg.lvs_shared:
        Q = enc.lvs * X
        ell = inst.t
    else:
        Q = hstack(enc.L, enc.lvs * X)
        ell = inst.d_S + inst.t
    P = trap_pad(Q, v)
    W = _rank_error(rng, inst.field, v + enc.N, v + ell, cfg.error_weight)
    tr = rank_trap_decode(P + W, v, enc.N, ell)
    if not tr.ok:
        for row in tallies:
            row[1] += 1
        return
    if cfg.lvs_shared:
        lvs_hat, Y_hat = enc.lvs, tr.Q
    else:
        L_hat = tr.Q.take_cols(range(inst.d_S))
        Y_hat = tr.Q.take_cols(range(inst.d_S, inst.d_S + inst.t))
        lvs_hat = L_hat * inst.V_S
    for i in range(inst.m):
        try:
            dem = solve_demand(inst, i, lvs_hat, Y_hat, lams[i])
        except ValueError:
            tallies[i][1] += 1
            continue
        _tally(tallies[i], dem, wanted[i])
