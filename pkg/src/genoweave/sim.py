"""Seeded experiment harness: construction sweeps and pool error counts.

Every random quantity hangs off the master seed through named derivation:
the construction for (n, delta) uses seed derive(master, "construct", n,
delta); pool i of a cell uses stream (derive(master, "pools", kind, n,
delta), i).  Work is batched across pools purely for vector width, so
failure counts are bit-identical whatever the batch size; the
GENOWEAVE_POOL_BATCH environment variable caps how many pools decode in
lock step at once.

Progress goes to stderr; all data products are returned (or formatted as
CSV) for the caller to write.
"""

from __future__ import annotations

import os
import struct
import sys
import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from .channels import ChannelSpec, apply_channel_pool, delete_pool_coincident
from .polar import PolarCode, design_polar_code
from .weave import decode_pool_batch, weave_encode

__all__ = [
    "STRAND_LENGTH",
    "ExperimentConfig",
    "ExperimentResult",
    "ConstructionPoint",
    "derive_seed",
    "run_construction_sweep",
    "run_pool_experiment",
    "run_quaternary_pool_experiment",
    "replay_pool",
    "equivocation_histogram",
    "semilog_floor",
    "results_to_csv",
    "construction_to_csv",
]

STRAND_LENGTH = 256

_MODE_OF_KIND = {"deletion": "push", "insertion": "pull", "substitution": "fixed"}


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment cell family: a block length crossed with error rates."""

    n: int
    delta_list: tuple[float, ...]
    error_kind: str = "deletion"
    pools: int = 1000
    construction_samples: int = 1000
    master_seed: int = 0
    threshold_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 1 or self.n & (self.n - 1):
            raise ValueError(f"strand count must be a power of two, got {self.n}")
        if self.error_kind not in _MODE_OF_KIND:
            raise ValueError(f"unknown error kind {self.error_kind!r}")
        deltas = tuple(float(d) for d in self.delta_list)
        if not deltas:
            raise ValueError("need at least one error rate")
        for d in deltas:
            if not 0.0 <= d < 0.5:
                raise ValueError(f"error rate must lie in [0, 1/2), got {d}")
        if self.pools < 1:
            raise ValueError(f"pool count must be positive, got {self.pools}")
        if self.construction_samples < 1:
            raise ValueError("construction needs at least one sample")
        if not self.threshold_scale > 0.0:
            raise ValueError("threshold scale must be positive")
        object.__setattr__(self, "delta_list", deltas)

    def threshold(self) -> float:
        return self.threshold_scale / (STRAND_LENGTH * self.n)


@dataclass(frozen=True)
class ExperimentResult:
    """Failure count for one (n, delta) cell."""

    n: int
    delta: float
    error_kind: str
    pools_run: int
    failure_count: int
    code_rate: float
    seed: int
    cell_seed: int
    wall_time: float
    failed_pools: tuple[int, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class ConstructionPoint:
    """Constructed-code summary for one (n, delta)."""

    n: int
    delta: float
    samples: int
    seed: int
    code_rate: float
    k: int
    equivocations: np.ndarray = field(repr=False)


def _float_bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(x)))[0]


def derive_seed(*parts) -> int:
    """Collapse mixed (int, float, str) parts into one reproducible 64-bit seed."""
    ints: list[int] = []
    for p in parts:
        if isinstance(p, str):
            ints.append(zlib.crc32(p.encode()))
        elif isinstance(p, float):
            ints.append(_float_bits(p))
        else:
            ints.append(int(p))
    return int(np.random.SeedSequence(ints).generate_state(1, np.uint64)[0])


def _progress(msg: str) -> None:
    print(f"[genoweave] {msg}", file=sys.stderr, flush=True)


def _construct(config: ExperimentConfig, delta: float) -> PolarCode:
    cseed = derive_seed(config.master_seed, "construct", config.n, delta)
    return design_polar_code(config.n, delta, samples=config.construction_samples,
                             seed=cseed, threshold=config.threshold())


def run_construction_sweep(config: ExperimentConfig) -> list[ConstructionPoint]:
    """Construct a code per delta in the config and report rates."""
    points = []
    for delta in config.delta_list:
        t0 = time.perf_counter()
        code = _construct(config, delta)
        points.append(ConstructionPoint(
            n=config.n, delta=delta, samples=config.construction_samples,
            seed=config.master_seed, code_rate=code.rate, k=code.k,
            equivocations=code.equivocations))
        _progress(f"construct n={config.n} delta={delta:g} samples={config.construction_samples} "
                  f"rate={code.rate:.4f} ({time.perf_counter() - t0:.1f}s)")
    return points


def _pool_batch_size(n: int, width: int, pools: int) -> int:
    env = os.environ.get("GENOWEAVE_POOL_BATCH")
    if env:
        size = int(env)
        if size < 1:
            raise ValueError(f"GENOWEAVE_POOL_BATCH must be positive, got {env}")
        return min(size, pools)
    return max(1, min(pools, (1 << 26) // max(n * width, 1)))


def _generate_pool(rng: np.random.Generator, code: PolarCode, spec: ChannelSpec
                   ) -> tuple[np.ndarray, np.ndarray]:
    info = rng.integers(0, 2, size=(STRAND_LENGTH, code.k), dtype=np.uint8)
    pool = weave_encode(info, code)
    obs, _ = apply_channel_pool(pool.strands, spec, rng)
    return info, obs


def run_pool_experiment(config: ExperimentConfig,
                        codes: dict[float, PolarCode] | None = None
                        ) -> list[ExperimentResult]:
    """Count decoding failures over many independent pools per (n, delta).

    A pool counts as failed when any decoded info bit differs from the
    truth.  Codes are constructed per delta unless supplied in codes.
    """
    results = []
    mode = _MODE_OF_KIND[config.error_kind]
    width = STRAND_LENGTH if mode in ("push", "fixed") else 2 * STRAND_LENGTH
    for delta in config.delta_list:
        code = codes[delta] if codes and delta in codes else _construct(config, delta)
        spec = ChannelSpec(kind=config.error_kind, delta=delta)
        cell_seed = derive_seed(config.master_seed, "pools", config.error_kind,
                                config.n, delta)
        t0 = time.perf_counter()
        failed: list[int] = []
        batch = _pool_batch_size(config.n, width, config.pools)
        for start in range(0, config.pools, batch):
            count = min(batch, config.pools - start)
            obs = np.empty((count, config.n, width), dtype=np.uint8)
            truth = np.empty((count, STRAND_LENGTH, code.k), dtype=np.uint8)
            for b in range(count):
                rng = np.random.default_rng([cell_seed, start + b])
                truth[b], obs[b] = _generate_pool(rng, code, spec)
            res = decode_pool_batch(obs, code, mode, STRAND_LENGTH)
            bad = (res.info_bits != truth).any(axis=(1, 2))
            failed.extend(int(start + i) for i in np.flatnonzero(bad))
            _progress(f"pools n={config.n} delta={delta:g} kind={config.error_kind} "
                      f"{start + count}/{config.pools} failures={len(failed)}")
        results.append(ExperimentResult(
            n=config.n, delta=delta, error_kind=config.error_kind,
            pools_run=config.pools, failure_count=len(failed),
            code_rate=code.rate, seed=config.master_seed, cell_seed=cell_seed,
            wall_time=time.perf_counter() - t0, failed_pools=tuple(failed)))
    return results


def _generate_quaternary_pool(rng: np.random.Generator, code: PolarCode, delta: float
                              ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    info_r = rng.integers(0, 2, size=(STRAND_LENGTH, code.k), dtype=np.uint8)
    info_i = rng.integers(0, 2, size=(STRAND_LENGTH, code.k), dtype=np.uint8)
    pool_r = weave_encode(info_r, code)
    pool_i = weave_encode(info_i, code)
    (obs_r, _), (obs_i, _) = delete_pool_coincident(pool_r.strands, pool_i.strands,
                                                    delta, rng)
    return info_r, info_i, obs_r, obs_i


def run_quaternary_pool_experiment(config: ExperimentConfig,
                                   codes: dict[float, PolarCode] | None = None
                                   ) -> list[ExperimentResult]:
    """Deletion-channel failure counts for quaternary pools.

    Each pool is a pair of binary component pools sharing one deletion
    pattern per strand; the pool fails when either part fails.
    """
    if config.error_kind != "deletion":
        raise ValueError("quaternary pools run on the deletion channel")
    results = []
    width = STRAND_LENGTH
    for delta in config.delta_list:
        code = codes[delta] if codes and delta in codes else _construct(config, delta)
        cell_seed = derive_seed(config.master_seed, "pools", "quaternary",
                                config.n, delta)
        t0 = time.perf_counter()
        failed: list[int] = []
        batch = _pool_batch_size(config.n, width, config.pools)
        for start in range(0, config.pools, batch):
            count = min(batch, config.pools - start)
            obs_r = np.empty((count, config.n, width), dtype=np.uint8)
            obs_i = np.empty((count, config.n, width), dtype=np.uint8)
            truth_r = np.empty((count, STRAND_LENGTH, code.k), dtype=np.uint8)
            truth_i = np.empty((count, STRAND_LENGTH, code.k), dtype=np.uint8)
            for b in range(count):
                rng = np.random.default_rng([cell_seed, start + b])
                truth_r[b], truth_i[b], obs_r[b], obs_i[b] = \
                    _generate_quaternary_pool(rng, code, delta)
            res_r = decode_pool_batch(obs_r, code, "push", STRAND_LENGTH)
            res_i = decode_pool_batch(obs_i, code, "push", STRAND_LENGTH)
            bad = ((res_r.info_bits != truth_r).any(axis=(1, 2))
                   | (res_i.info_bits != truth_i).any(axis=(1, 2)))
            failed.extend(int(start + i) for i in np.flatnonzero(bad))
            _progress(f"pools n={config.n} delta={delta:g} kind=quaternary "
                      f"{start + count}/{config.pools} failures={len(failed)}")
        results.append(ExperimentResult(
            n=config.n, delta=delta, error_kind="deletion",
            pools_run=config.pools, failure_count=len(failed),
            code_rate=code.rate, seed=config.master_seed, cell_seed=cell_seed,
            wall_time=time.perf_counter() - t0, failed_pools=tuple(failed)))
    return results


def replay_pool(code: PolarCode, error_kind: str, delta: float, cell_seed: int,
                pool_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Regenerate one pool by its stream and decode it again.

    Returns (true_info, decoded_info) so callers can re-verify a recorded
    failure against ground truth.
    """
    mode = _MODE_OF_KIND[error_kind]
    rng = np.random.default_rng([cell_seed, pool_index])
    info, obs = _generate_pool(rng, code, ChannelSpec(kind=error_kind, delta=delta))
    res = decode_pool_batch(obs[None, :, :], code, mode, STRAND_LENGTH)
    return info, res.info_bits[0]


# ---------------------------------------------------------------------------
# presentation helpers


def equivocation_histogram(equivocations) -> np.ndarray:
    """Sorted equivocation profile: rows of (rank fraction, equivocation).

    The x coordinate of the r-th smallest value is (r + 1) / n, so a fully
    polarized code shows a long floor near zero and a sharp rise to one.
    """
    eq = np.asarray(equivocations, dtype=np.float64)
    if eq.ndim != 1 or eq.size == 0:
        raise ValueError("equivocations must be a nonempty vector")
    srt = np.sort(eq)
    frac = np.arange(1, eq.size + 1) / eq.size
    return np.column_stack((frac, srt))


def semilog_floor(values, floor: float = 1e-300) -> np.ndarray:
    """Clamp values from below so they survive a log-scale axis."""
    if not floor > 0.0:
        raise ValueError("floor must be positive")
    return np.maximum(np.asarray(values, dtype=np.float64), floor)


def results_to_csv(rows: list[ExperimentResult], master_seed: int) -> str:
    """Failure-count table as CSV text with a seed provenance comment."""
    lines = [f"# seed={master_seed}", "n,delta,error_kind,pools,failures,code_rate,seed"]
    for r in rows:
        lines.append(f"{r.n},{float(r.delta)!r},{r.error_kind},{r.pools_run},"
                     f"{r.failure_count},{float(r.code_rate)!r},{r.seed}")
    return "\n".join(lines) + "\n"


def construction_to_csv(points: list[ConstructionPoint], master_seed: int) -> str:
    """Constructed-rate table as CSV text."""
    lines = [f"# seed={master_seed}", "n,delta,samples,code_rate,k,seed"]
    for p in points:
        lines.append(f"{p.n},{float(p.delta)!r},{p.samples},"
                     f"{float(p.code_rate)!r},{p.k},{p.seed}")
    return "\n".join(lines) + "\n"
