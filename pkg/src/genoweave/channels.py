"""Error channels on strands: substitutions, deletions, insertions.

Strands are uint8 vectors over {0, 1}; the third symbol value ERASURE
marks padding that carries no channel information.  Deletions keep each
symbol independently with probability 1 - delta and close the gaps, so a
shortened strand is erasure-padded back to its nominal length.
Insertions flip one Bernoulli(delta) coin per original symbol and place a
uniform random bit immediately before that symbol, so strands only grow.

Quaternary strands over ACGT split into two binary strands, one per bit
of the letter, and a deletion of a letter deletes the same index from
both parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ERASURE",
    "ChannelSpec",
    "ReceivedStrand",
    "bsc_apply",
    "delete_apply",
    "insert_apply",
    "delete_at",
    "insert_at",
    "llr_of",
    "llr_table",
    "symbols_to_llrs",
    "quaternary_split",
    "quaternary_merge",
    "bsc_pool",
    "delete_pool",
    "insert_pool",
    "delete_pool_coincident",
    "apply_channel_pool",
    "pool_to_text",
    "pool_from_text",
    "dna_pool_to_text",
    "dna_pool_from_text",
]

ERASURE = 2

CHANNEL_KINDS = ("substitution", "deletion", "insertion")


@dataclass(frozen=True)
class ChannelSpec:
    """Which error process acts on strands, and at what per-symbol rate."""

    kind: str
    delta: float

    def __post_init__(self) -> None:
        if self.kind not in CHANNEL_KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}, expected one of {CHANNEL_KINDS}")
        if not 0.0 <= self.delta < 1.0:
            raise ValueError(f"error rate must lie in [0, 1), got {self.delta}")


@dataclass(frozen=True)
class ReceivedStrand:
    """Raw post-channel symbols plus the nominal pre-channel length.

    symbols holds only surviving bits (no erasures); padded() right-pads
    with ERASURE so every strand presents at least original_length symbols
    to the decoder.
    """

    symbols: np.ndarray = field(repr=False)
    original_length: int = 256

    def __post_init__(self) -> None:
        sym = np.asarray(self.symbols, dtype=np.uint8).copy()
        if sym.ndim != 1:
            raise ValueError("symbols must be a vector")
        if sym.size and not np.isin(sym, (0, 1)).all():
            raise ValueError("raw symbols must be binary")
        if self.original_length < 1:
            raise ValueError(f"original length must be positive, got {self.original_length}")
        sym.setflags(write=False)
        object.__setattr__(self, "symbols", sym)

    def __len__(self) -> int:
        return int(self.symbols.size)

    def padded(self, width: int | None = None) -> np.ndarray:
        if width is None:
            width = self.original_length
        out = np.full(max(width, self.symbols.size), ERASURE, dtype=np.uint8)
        out[: self.symbols.size] = self.symbols
        return out


def _check_strand(strand) -> np.ndarray:
    s = np.asarray(strand, dtype=np.uint8)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("strand must be a nonempty vector")
    if not np.isin(s, (0, 1)).all():
        raise ValueError("strand must be binary")
    return s


# ---------------------------------------------------------------------------
# per-strand channels


def bsc_apply(strand, delta: float, rng: np.random.Generator) -> np.ndarray:
    """Flip each bit independently with probability delta."""
    s = _check_strand(strand)
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"crossover must lie in [0, 1), got {delta}")
    flips = rng.random(s.size) < delta
    return s ^ flips.astype(np.uint8)


def delete_apply(strand, delta: float, rng: np.random.Generator) -> ReceivedStrand:
    """Keep each symbol with probability 1 - delta, in order, gaps closed."""
    s = _check_strand(strand)
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"deletion rate must lie in [0, 1), got {delta}")
    keep = rng.random(s.size) >= delta
    return ReceivedStrand(symbols=s[keep], original_length=s.size)


def insert_apply(strand, delta: float, rng: np.random.Generator) -> ReceivedStrand:
    """One Bernoulli(delta) trial per symbol; a uniform bit lands before it."""
    s = _check_strand(strand)
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"insertion rate must lie in [0, 1), got {delta}")
    ins = rng.random(s.size) < delta
    bits = rng.integers(0, 2, size=s.size, dtype=np.uint8)
    shift = np.cumsum(ins)
    out = np.empty(s.size + int(shift[-1]), dtype=np.uint8)
    out[np.arange(s.size) + shift] = s
    out[(np.arange(s.size) + shift - 1)[ins]] = bits[ins]
    return ReceivedStrand(symbols=out, original_length=s.size)


def delete_at(strand, position: int) -> ReceivedStrand:
    """Remove exactly the symbol at the given index (for planted-error tests)."""
    s = _check_strand(strand)
    if not 0 <= position < s.size:
        raise ValueError(f"position {position} out of range for length {s.size}")
    return ReceivedStrand(symbols=np.delete(s, position), original_length=s.size)


def insert_at(strand, position: int, symbol: int) -> ReceivedStrand:
    """Insert one symbol immediately before the given index."""
    s = _check_strand(strand)
    if not 0 <= position <= s.size:
        raise ValueError(f"position {position} out of range for length {s.size}")
    if symbol not in (0, 1):
        raise ValueError(f"inserted symbol must be a bit, got {symbol}")
    return ReceivedStrand(symbols=np.insert(s, position, symbol), original_length=s.size)


# ---------------------------------------------------------------------------
# log-likelihood ratios


def _check_llr_delta(delta_model: float) -> float:
    if not 0.0 < delta_model < 0.5:
        raise ValueError(f"LLR model crossover must lie in (0, 1/2), got {delta_model}")
    return float(delta_model)


def llr_table(delta_model: float) -> np.ndarray:
    """LLRs indexed by symbol value: [LLR(0), LLR(1), LLR(erasure)]."""
    l0 = math.log((1.0 - _check_llr_delta(delta_model)) / delta_model)
    return np.array([l0, -l0, 0.0])


def llr_of(symbol: int, delta_model: float) -> float:
    """Log-likelihood ratio of one observed symbol under a BSC model.

    Positive favors 0; an erasure carries no evidence and maps to 0.
    """
    if symbol not in (0, 1, ERASURE):
        raise ValueError(f"symbol must be 0, 1, or ERASURE, got {symbol}")
    return float(llr_table(delta_model)[symbol])


def symbols_to_llrs(symbols, delta_model: float) -> np.ndarray:
    """Vectorized llr_of over an array of symbols (any shape)."""
    sym = np.asarray(symbols)
    if sym.size and not np.isin(sym, (0, 1, ERASURE)).all():
        raise ValueError("symbols must be 0, 1, or ERASURE")
    return llr_table(delta_model)[sym]


# ---------------------------------------------------------------------------
# quaternary letters

_LETTERS = "ACGT"
# A=(0,0) C=(1,0) G=(0,1) T=(1,1) as (real, imag); real is the low bit
_REAL = {"A": 0, "C": 1, "G": 0, "T": 1}
_IMAG = {"A": 0, "C": 0, "G": 1, "T": 1}


def quaternary_split(strand) -> tuple[np.ndarray, np.ndarray]:
    """Split an ACGT strand into its (real, imag) binary component strands."""
    letters = list(strand)
    bad = [c for c in letters if c not in _REAL]
    if bad:
        raise ValueError(f"strand contains non-ACGT letters: {bad[:5]}")
    real = np.array([_REAL[c] for c in letters], dtype=np.uint8)
    imag = np.array([_IMAG[c] for c in letters], dtype=np.uint8)
    return real, imag


def quaternary_merge(real, imag) -> str:
    """Inverse of quaternary_split."""
    r = _check_strand(real)
    i = _check_strand(imag)
    if r.size != i.size:
        raise ValueError(f"component lengths differ: {r.size} vs {i.size}")
    return "".join(_LETTERS[v] for v in (r + 2 * i))


# ---------------------------------------------------------------------------
# whole-pool channels (vectorized; one RNG draw pattern per pool)


def _check_pool(pool) -> np.ndarray:
    p = np.asarray(pool, dtype=np.uint8)
    if p.ndim != 2:
        raise ValueError("pool must be a (strands, length) matrix")
    if p.size and not np.isin(p, (0, 1)).all():
        raise ValueError("pool must be binary")
    return p


def _compact_rows(values: np.ndarray, present: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Stable left-compaction of the present entries of each row; the rest
    # of the row becomes erasures.
    lengths = present.sum(axis=1)
    order = np.argsort(~present, axis=1, kind="stable")
    gathered = np.take_along_axis(values, order, axis=1)
    width = values.shape[1]
    obs = np.where(np.arange(width) < lengths[:, None], gathered, ERASURE).astype(np.uint8)
    return obs, lengths.astype(np.int64)


def bsc_pool(pool, delta: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Substitution channel on every strand of a pool. Returns (obs, lengths)."""
    p = _check_pool(pool)
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"crossover must lie in [0, 1), got {delta}")
    flips = (rng.random(p.shape) < delta).astype(np.uint8)
    return p ^ flips, np.full(p.shape[0], p.shape[1], dtype=np.int64)


def delete_pool(pool, delta: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Deletion channel on every strand. obs keeps the pool width, erasure-padded."""
    p = _check_pool(pool)
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"deletion rate must lie in [0, 1), got {delta}")
    keep = rng.random(p.shape) >= delta
    return _compact_rows(p, keep)


def insert_pool(pool, delta: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Insertion channel on every strand. obs is twice the pool width."""
    p = _check_pool(pool)
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"insertion rate must lie in [0, 1), got {delta}")
    n, length = p.shape
    ins = rng.random(p.shape) < delta
    bits = rng.integers(0, 2, size=p.shape, dtype=np.uint8)
    values = np.empty((n, 2 * length), dtype=np.uint8)
    present = np.empty((n, 2 * length), dtype=bool)
    values[:, 0::2] = bits
    values[:, 1::2] = p
    present[:, 0::2] = ins
    present[:, 1::2] = True
    return _compact_rows(values, present)


def delete_pool_coincident(real_pool, imag_pool, delta: float, rng: np.random.Generator
                           ) -> tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Delete the same indices from both component pools of a quaternary pool.

    One kept-set per strand is drawn and applied to both parts, because a
    dropped letter takes both of its bits with it.
    """
    r = _check_pool(real_pool)
    i = _check_pool(imag_pool)
    if r.shape != i.shape:
        raise ValueError(f"component pool shapes differ: {r.shape} vs {i.shape}")
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"deletion rate must lie in [0, 1), got {delta}")
    keep = rng.random(r.shape) >= delta
    return _compact_rows(r, keep), _compact_rows(i, keep)


def apply_channel_pool(pool, spec: ChannelSpec, rng: np.random.Generator
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Dispatch on spec.kind. Returns (obs matrix, raw lengths)."""
    if spec.kind == "substitution":
        return bsc_pool(pool, spec.delta, rng)
    if spec.kind == "deletion":
        return delete_pool(pool, spec.delta, rng)
    return insert_pool(pool, spec.delta, rng)


# ---------------------------------------------------------------------------
# text serialization

_BIT_CHARS = {0: "0", 1: "1", ERASURE: "?"}
_CHAR_BITS = {"0": 0, "1": 1, "?": ERASURE}


def pool_to_text(matrix) -> str:
    """One strand per line; symbols as 0, 1, or ? for erasure."""
    m = np.asarray(matrix)
    if m.ndim != 2:
        raise ValueError("expected a (strands, length) matrix")
    if m.size and not np.isin(m, (0, 1, ERASURE)).all():
        raise ValueError("matrix entries must be 0, 1, or ERASURE")
    return "\n".join("".join(_BIT_CHARS[v] for v in row) for row in m) + "\n"


def pool_from_text(text: str) -> np.ndarray:
    """Inverse of pool_to_text; all lines must have equal length."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("no strands found")
    widths = {len(ln) for ln in lines}
    if len(widths) != 1:
        raise ValueError(f"ragged strand lengths: {sorted(widths)}")
    try:
        rows = [[_CHAR_BITS[c] for c in ln] for ln in lines]
    except KeyError as exc:
        raise ValueError(f"invalid symbol {exc.args[0]!r}") from None
    return np.asarray(rows, dtype=np.uint8)


def dna_pool_to_text(strands) -> str:
    """One ACGT strand per line."""
    out = []
    for s in strands:
        if any(c not in _REAL for c in s):
            raise ValueError(f"strand contains non-ACGT letters: {s[:8]!r}")
        out.append(str(s))
    if not out:
        raise ValueError("no strands given")
    return "\n".join(out) + "\n"


def dna_pool_from_text(text: str) -> list[str]:
    """Inverse of dna_pool_to_text."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("no strands found")
    for ln in lines:
        if any(c not in _REAL for c in ln):
            raise ValueError(f"strand contains non-ACGT letters: {ln[:8]!r}")
    return lines
