"""In-house subset of the NIST SP 800-22 statistical tests.

Implements monobit, block frequency, runs, longest run of ones, cumulative
sums (both directions), approximate entropy, serial and the spectral (DFT)
test, following the SP 800-22 reference definitions.  Each test returns a
(statistic, p-value) pair; a stream passes a test when p >= alpha.

The remaining SP 800-22 tests (rank, universal, linear complexity,
template matching, random excursions) carry large constant tables and are
left to external suites; use the exporters to feed them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import erfc, gammaincc, ndtr

from .prbg import BitStream

ALPHA = 0.01

TEST_NAMES = (
    "monobit",
    "block_frequency",
    "runs",
    "longest_run",
    "cusum_forward",
    "cusum_reverse",
    "approximate_entropy",
    "serial",
    "dft",
)

# entries emitted per stream: serial contributes its second p-value too
ENTRY_NAMES = TEST_NAMES[:8] + ("serial_2", "dft")

# structural floors; 10^6-bit streams are the recommended battery size
_MIN_BITS = {
    "monobit": 1,
    "block_frequency": 8,
    "runs": 2,
    "longest_run": 128,
    "cusum_forward": 2,
    "cusum_reverse": 2,
    "approximate_entropy": 8,
    "serial": 8,
    "dft": 8,
}


@dataclass(frozen=True)
class TestOutcome:
    """One test on one stream."""

    test: str
    statistic: float
    p_value: float
    passed: bool


@dataclass(frozen=True)
class ProportionLine:
    """One test aggregated across battery streams."""

    test: str
    passed_count: int
    stream_count: int
    proportion: float
    min_proportion: float
    passed: bool


@dataclass(frozen=True)
class TestReport:
    """Named results of one battery run.

    ``entries`` holds TestOutcome rows for a single stream or
    ProportionLine rows for a multi-stream battery.
    """

    battery: str
    stream_meta: dict
    entries: tuple
    passed: bool
    alpha: float = ALPHA


def _as_bits(bits: BitStream | np.ndarray) -> np.ndarray:
    arr = bits.bits if isinstance(bits, BitStream) else np.asarray(bits, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("bit input must be one-dimensional")
    return arr


def _require(name: str, n: int) -> None:
    need = _MIN_BITS[name]
    if n < need:
        raise ValueError(f"{name} needs at least {need} bits, got {n}")


def monobit(bits) -> tuple[float, float]:
    """Frequency test: |sum of +/-1 bits| / sqrt(n) against erfc."""
    b = _as_bits(bits)
    _require("monobit", b.size)
    s_obs = abs(2 * int(b.sum()) - b.size) / math.sqrt(b.size)
    return s_obs, float(erfc(s_obs / math.sqrt(2.0)))


def block_frequency(bits, block_size: int = 128) -> tuple[float, float]:
    """Ones-proportion chi-square over disjoint blocks of block_size bits."""
    b = _as_bits(bits)
    _require("block_frequency", b.size)
    if block_size < 1 or block_size > b.size:
        raise ValueError(f"block_size must lie in [1, {b.size}], got {block_size}")
    nblocks = b.size // block_size
    pis = b[:nblocks * block_size].reshape(nblocks, block_size).mean(axis=1)
    chi2 = 4.0 * block_size * float(np.sum((pis - 0.5) ** 2))
    return chi2, float(gammaincc(nblocks / 2.0, chi2 / 2.0))


def runs(bits) -> tuple[float, float]:
    """Total number of runs against its normal approximation.

    Returns p = 0 without the runs count when the ones proportion already
    fails the monobit precondition |pi - 1/2| < 2/sqrt(n).
    """
    b = _as_bits(bits)
    _require("runs", b.size)
    n = b.size
    pi = float(b.mean())
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return float("nan"), 0.0
    v = 1 + int(np.count_nonzero(np.diff(b)))
    num = abs(v - 2.0 * n * pi * (1.0 - pi))
    return float(v), float(erfc(num / (2.0 * math.sqrt(2.0 * n) * pi * (1.0 - pi))))


# block size -> (degrees of freedom, run-length class bounds, class probabilities)
_LONGEST_RUN_TABLES = {
    8: (3, (1, 4), (0.2148, 0.3672, 0.2305, 0.1875)),
    128: (5, (4, 9), (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    10000: (6, (10, 16), (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
}


def longest_run(bits) -> tuple[float, float]:
    """Longest run of ones per block, classed against tabulated frequencies.

    The block size follows the SP 800-22 tiers: 8 for short streams, 128
    from 6272 bits, and 10^4 from 750000 bits.
    """
    b = _as_bits(bits)
    _require("longest_run", b.size)
    n = b.size
    block = 8 if n < 6272 else (128 if n < 750000 else 10000)
    dof, (lo, hi), probs = _LONGEST_RUN_TABLES[block]
    nblocks = n // block
    rows = b[:nblocks * block].reshape(nblocks, block)
    longest = np.zeros(nblocks, dtype=np.int64)
    run = np.zeros(nblocks, dtype=np.int64)
    for j in range(block):
        run = (run + 1) * rows[:, j]
        np.maximum(longest, run, out=longest)
    classes = np.clip(longest, lo, hi) - lo
    counts = np.bincount(classes, minlength=len(probs))
    expected = nblocks * np.asarray(probs)
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    return chi2, float(gammaincc(dof / 2.0, chi2 / 2.0))


def _cusum(bits, reverse: bool) -> tuple[float, float]:
    b = _as_bits(bits)
    _require("cusum_forward", b.size)
    x = 2 * b.astype(np.int64) - 1
    if reverse:
        x = x[::-1]
    z = int(np.max(np.abs(np.cumsum(x))))
    n = b.size
    sq = math.sqrt(n)
    # summation bounds truncate toward zero, as in the reference code
    k1 = np.arange(int((-n / z + 1) / 4), int((n / z - 1) / 4) + 1)
    k2 = np.arange(int((-n / z - 3) / 4), int((n / z - 1) / 4) + 1)
    t1 = float(np.sum(ndtr((4 * k1 + 1) * z / sq) - ndtr((4 * k1 - 1) * z / sq)))
    t2 = float(np.sum(ndtr((4 * k2 + 3) * z / sq) - ndtr((4 * k2 + 1) * z / sq)))
    return float(z), 1.0 - t1 + t2


def cusum_forward(bits) -> tuple[float, float]:
    """Maximum absolute partial sum of the +/-1 walk, forward direction."""
    return _cusum(bits, reverse=False)


def cusum_reverse(bits) -> tuple[float, float]:
    """Cumulative sums test over the reversed sequence."""
    return _cusum(bits, reverse=True)


def _pattern_counts(b: np.ndarray, m: int) -> np.ndarray:
    """Counts of the n overlapping m-bit patterns, wrapping around the end."""
    n = b.size
    ext = np.concatenate([b, b[:m - 1]]) if m > 1 else b
    idx = np.zeros(n, dtype=np.int64)
    for j in range(m):
        idx = (idx << 1) | ext[j:j + n]
    return np.bincount(idx, minlength=2 ** m)


def approximate_entropy(bits, m: int = 2) -> tuple[float, float]:
    """ApEn(m) = phi(m) - phi(m+1) over overlapping wrapped patterns."""
    b = _as_bits(bits)
    _require("approximate_entropy", b.size)
    n = b.size
    phi = []
    for mm in (m, m + 1):
        c = _pattern_counts(b, mm) / n
        c = c[c > 0]
        phi.append(float(np.sum(c * np.log(c))))
    apen = phi[0] - phi[1]
    chi2 = 2.0 * n * (math.log(2.0) - apen)
    return apen, float(gammaincc(2 ** (m - 1), chi2 / 2.0))


def _psi_squared(b: np.ndarray, m: int) -> float:
    if m <= 0:
        return 0.0
    c = _pattern_counts(b, m).astype(np.float64)
    return float((2 ** m / b.size) * np.sum(c * c) - b.size)


def serial(bits, m: int = 2) -> tuple[tuple[float, float], tuple[float, float]]:
    """Serial test: first and second differences of psi^2 over pattern sizes.

    Returns ((delta_psi2, p1), (delta2_psi2, p2)); a stream passes when
    both p-values clear alpha.
    """
    b = _as_bits(bits)
    _require("serial", b.size)
    psi_m = _psi_squared(b, m)
    psi_m1 = _psi_squared(b, m - 1)
    psi_m2 = _psi_squared(b, m - 2)
    d1 = psi_m - psi_m1
    d2 = psi_m - 2.0 * psi_m1 + psi_m2
    p1 = float(gammaincc(2 ** (m - 2), d1 / 2.0))
    p2 = float(gammaincc(2 ** (m - 3), d2 / 2.0))
    return (d1, p1), (d2, p2)


def dft(bits) -> tuple[float, float]:
    """Spectral test: count of DFT peaks below the 95% threshold.

    Uses the moduli of the first n/2 transform terms and the corrected
    variance n * 0.95 * 0.05 / 4.
    """
    b = _as_bits(bits)
    _require("dft", b.size)
    n = b.size
    x = 2.0 * b.astype(np.float64) - 1.0
    mods = np.abs(np.fft.rfft(x))[:n // 2]
    threshold = math.sqrt(math.log(1.0 / 0.05) * n)
    n0 = 0.95 * n / 2.0
    n1 = int(np.count_nonzero(mods < threshold))
    d = (n1 - n0) / math.sqrt(n * 0.95 * 0.05 / 4.0)
    return d, float(erfc(abs(d) / math.sqrt(2.0)))


def nist_test(name: str, bits, **params) -> tuple[float, float]:
    """Run one subset test by name; ``serial`` reports its first p-value."""
    if name not in TEST_NAMES:
        raise ValueError(f"unknown test {name!r}; expected one of {', '.join(TEST_NAMES)}")
    if name == "serial":
        return serial(bits, **params)[0]
    func = {
        "monobit": monobit,
        "block_frequency": block_frequency,
        "runs": runs,
        "longest_run": longest_run,
        "cusum_forward": cusum_forward,
        "cusum_reverse": cusum_reverse,
        "approximate_entropy": approximate_entropy,
        "dft": dft,
    }[name]
    return func(bits, **params)


def stream_outcomes(bits, alpha: float = ALPHA) -> list[TestOutcome]:
    """All subset tests on one stream, serial's second p-value as its own row."""
    b = _as_bits(bits)
    rows = []
    for name in TEST_NAMES[:7]:
        stat, p = nist_test(name, b)
        rows.append(TestOutcome(name, stat, p, p >= alpha))
    (d1, p1), (d2, p2) = serial(b)
    rows.append(TestOutcome("serial", d1, p1, p1 >= alpha))
    rows.append(TestOutcome("serial_2", d2, p2, p2 >= alpha))
    stat, p = dft(b)
    rows.append(TestOutcome("dft", stat, p, p >= alpha))
    return rows


def stream_report(bits, alpha: float = ALPHA, meta: dict | None = None) -> TestReport:
    """Single-stream report; passes when every entry clears alpha."""
    b = _as_bits(bits)
    entries = tuple(stream_outcomes(b, alpha))
    stream_meta = {"length": int(b.size)}
    if isinstance(bits, BitStream):
        stream_meta["key_fingerprint"] = bits.key_fingerprint
    if meta:
        stream_meta.update(meta)
    return TestReport(battery="nist-subset", stream_meta=stream_meta,
                      entries=entries, passed=all(e.passed for e in entries),
                      alpha=alpha)


def min_proportion(streams: int, p_hat: float = 1.0 - ALPHA) -> float:
    """Smallest acceptable pass proportion: p - 3 sqrt(p (1-p) / m)."""
    return p_hat - 3.0 * math.sqrt(p_hat * (1.0 - p_hat) / streams)


def nist_battery(streams: Sequence[BitStream | np.ndarray],
                 alpha: float = ALPHA) -> TestReport:
    """Run every subset test on every stream and aggregate pass proportions.

    Parameters
    ----------
    streams : sequence of BitStream or 0/1 arrays
        Typically disjoint segments of one long generator run.
    alpha : float
        Per-test significance level.

    Returns
    -------
    TestReport
        One ProportionLine per test entry; the battery passes when every
        proportion reaches the minimum-proportion bound for the stream
        count.
    """
    if not streams:
        raise ValueError("battery needs at least one stream")
    per_test: dict[str, list[bool]] = {name: [] for name in ENTRY_NAMES}
    for s in streams:
        for row in stream_outcomes(s, alpha):
            per_test[row.test].append(row.passed)
    m = len(streams)
    bound = min_proportion(m)
    lines = tuple(
        ProportionLine(test=name, passed_count=sum(flags), stream_count=m,
                       proportion=sum(flags) / m, min_proportion=bound,
                       passed=sum(flags) / m >= bound)
        for name, flags in per_test.items()
    )
    meta = {"streams": m, "bits_per_stream": int(_as_bits(streams[0]).size)}
    fps = {s.key_fingerprint.split(":")[0] for s in streams if isinstance(s, BitStream)}
    if len(fps) == 1:
        meta["key_fingerprint"] = fps.pop()
    return TestReport(battery="nist-subset", stream_meta=meta, entries=lines,
                      passed=all(line.passed for line in lines), alpha=alpha)
