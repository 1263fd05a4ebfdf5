"""Monotonicity, repetition, anticipation, and emission-rate metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .corpus_io import Alignment, SentencePair

TAU_UNITS = ("links", "tokens")


class UndefinedMetricError(ValueError):
    """The metric is undefined on this input (too few or degenerate data)."""


def _observations(alignment: Alignment, unit: str) -> list[tuple]:
    if unit == "links":
        return list(alignment.links)
    if unit == "tokens":
        by_tgt: dict[int, list[int]] = {}
        for s, t in alignment.links:
            by_tgt.setdefault(t, []).append(s)
        return [
            (Fraction(sum(srcs), len(srcs)), t) for t, srcs in sorted(by_tgt.items())
        ]
    raise ValueError(f"unknown tau unit: {unit!r}")


def kendall_tau(alignment: Alignment, unit: str = "links") -> float:
    """Tie-corrected (tau-b) rank correlation of alignment links.

    With ``unit="links"`` every link is one observation; with
    ``unit="tokens"`` each aligned target position contributes one
    observation whose source value is the mean of its linked positions.
    """
    obs = _observations(alignment, unit)
    m = len(obs)
    if m < 2:
        raise UndefinedMetricError("kendall tau needs at least 2 observations")
    concordant = discordant = ties_src = ties_tgt = 0
    for i in range(m):
        s_i, t_i = obs[i]
        for j in range(i + 1, m):
            s_j, t_j = obs[j]
            ds = (s_i > s_j) - (s_i < s_j)
            dt = (t_i > t_j) - (t_i < t_j)
            if ds == 0:
                ties_src += 1
            if dt == 0:
                ties_tgt += 1
            if ds and dt:
                if ds == dt:
                    concordant += 1
                else:
                    discordant += 1
    n0 = m * (m - 1) // 2
    denom = math.sqrt((n0 - ties_src) * (n0 - ties_tgt))
    if denom == 0:
        raise UndefinedMetricError("kendall tau undefined: one side is constant")
    return (concordant - discordant) / denom


def _average_ranks(values: Sequence) -> list[Fraction]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [Fraction(0)] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = Fraction(i + j + 2, 2)  # ranks are 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman_rho(alignment: Alignment) -> float:
    """Rank correlation of target position vs mean linked source position."""
    by_tgt: dict[int, list[int]] = {}
    for s, t in alignment.links:
        by_tgt.setdefault(t, []).append(s)
    if len(by_tgt) < 2:
        raise UndefinedMetricError("spearman rho needs at least 2 aligned target positions")
    targets = sorted(by_tgt)
    values = [Fraction(sum(by_tgt[t]), len(by_tgt[t])) for t in targets]
    x = [float(r) for r in _average_ranks(targets)]
    y = [float(r) for r in _average_ranks(values)]
    mx = sum(x) / len(x)
    my = sum(y) / len(y)
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y))
    var_x = sum((a - mx) ** 2 for a in x)
    var_y = sum((b - my) ** 2 for b in y)
    if var_x == 0 or var_y == 0:
        raise UndefinedMetricError("spearman rho undefined: all values identical")
    return cov / math.sqrt(var_x * var_y)


def seq_rep_n(tokens: Sequence[str], n: int) -> float:
    """1 minus the distinct-to-total n-gram ratio."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    total = len(tokens) - n + 1
    if total < 1:
        raise UndefinedMetricError(f"sequence of {len(tokens)} tokens has no {n}-grams")
    distinct = len({tuple(tokens[i : i + n]) for i in range(total)})
    return 1.0 - distinct / total


def k_anticipation_rate(alignment: Alignment, k: int, catchup: float | None = None) -> float:
    """Fraction of target tokens aligned beyond the wait-k read horizon.

    At output step t the reader has seen min(src_len, k + t - 1) source
    tokens, or min(src_len, k + floor((t - 1) / er)) under a catchup
    emission rate er. Expects a vacancy-filled alignment.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if catchup is not None and catchup <= 0:
        raise ValueError(f"emission rate must be > 0, got {catchup}")
    max_src: dict[int, int] = {}
    for s, t in alignment.links:
        if s > max_src.get(t, 0):
            max_src[t] = s
    anticipated = 0
    for t in range(1, alignment.tgt_len + 1):
        if catchup is None:
            read = min(alignment.src_len, k + t - 1)
        else:
            read = min(alignment.src_len, k + math.floor((t - 1) / catchup))
        if max_src.get(t, 0) > read:
            anticipated += 1
    return anticipated / alignment.tgt_len


def emission_rate(pairs: Iterable[SentencePair]) -> float:
    """Target-to-source token count ratio over a corpus."""
    src_total = tgt_total = 0
    for pair in pairs:
        src_total += len(pair.source)
        tgt_total += len(pair.target)
    if src_total == 0:
        raise ValueError("emission rate undefined on an empty corpus")
    return tgt_total / src_total


@dataclass
class BucketStats:
    band: tuple[int, int]
    count: int = 0
    tau_sum: float = 0.0
    tau_defined: int = 0
    rho_sum: float = 0.0
    rho_defined: int = 0

    def to_dict(self) -> dict:
        return {
            "band": list(self.band),
            "count": self.count,
            "tau_mean": self.tau_sum / self.tau_defined if self.tau_defined else None,
            "tau_defined": self.tau_defined,
            "rho_mean": self.rho_sum / self.rho_defined if self.rho_defined else None,
            "rho_defined": self.rho_defined,
        }


@dataclass
class MonotonicityReport:
    tau_unit: str
    bucket_width: int
    taus: list[float | None] = field(default_factory=list)
    rhos: list[float | None] = field(default_factory=list)
    buckets: dict[int, BucketStats] = field(default_factory=dict)

    @property
    def sentences(self) -> int:
        return len(self.taus)

    def add_sentence(self, src_len: int, tau: float | None, rho: float | None) -> None:
        self.taus.append(tau)
        self.rhos.append(rho)
        band_index = (src_len - 1) // self.bucket_width
        bucket = self.buckets.get(band_index)
        if bucket is None:
            band = (band_index * self.bucket_width + 1, (band_index + 1) * self.bucket_width)
            bucket = self.buckets[band_index] = BucketStats(band=band)
        bucket.count += 1
        if tau is not None:
            bucket.tau_sum += tau
            bucket.tau_defined += 1
        if rho is not None:
            bucket.rho_sum += rho
            bucket.rho_defined += 1

    def to_dict(self) -> dict:
        tau_vals = [v for v in self.taus if v is not None]
        rho_vals = [v for v in self.rhos if v is not None]
        return {
            "sentences": self.sentences,
            "tau_unit": self.tau_unit,
            "bucket_width": self.bucket_width,
            "tau": {
                "mean": sum(tau_vals) / len(tau_vals) if tau_vals else None,
                "defined": len(tau_vals),
                "undefined": self.sentences - len(tau_vals),
            },
            "rho": {
                "mean": sum(rho_vals) / len(rho_vals) if rho_vals else None,
                "defined": len(rho_vals),
                "undefined": self.sentences - len(rho_vals),
            },
            "buckets": [self.buckets[b].to_dict() for b in sorted(self.buckets)],
            "per_sentence": {"tau": self.taus, "rho": self.rhos},
        }


def monotonicity_report(
    alignments: Iterable[Alignment],
    bucket_width: int = 10,
    tau_unit: str = "links",
) -> MonotonicityReport:
    """Per-sentence tau/rho where defined, with unweighted corpus and
    source-length-bucket means. Undefined sentences are counted and
    excluded from the means."""
    if bucket_width < 1:
        raise ValueError(f"bucket width must be >= 1, got {bucket_width}")
    report = MonotonicityReport(tau_unit=tau_unit, bucket_width=bucket_width)
    for alignment in alignments:
        try:
            tau = kendall_tau(alignment, unit=tau_unit)
        except UndefinedMetricError:
            tau = None
        try:
            rho = spearman_rho(alignment)
        except UndefinedMetricError:
            rho = None
        report.add_sentence(alignment.src_len, tau, rho)
    return report
