"""Bin-probability estimation from the time series, and spectral expectations.

Three routes produce a distribution over the M bin centers:

* :func:`exact_bins` — quadrature of the filters at the true eigenvalues
  (the oracle; needs the ground-truth spectrum),
* :func:`truncated_bins` — the truncated Fourier form applied to the exact
  signal (isolates the truncation error),
* :func:`estimate_bins` — the same linear form applied to a measured or
  noisy signal; this is the estimator proper:

      q_j = eps/(2*pi) + sqrt(2/pi) * Re( sum_{k=1}^{N-1} F_j(k) * conj(g_k) )

Estimated values are reported raw: entries may dip slightly negative and the
sum may drift from one. No clamping or renormalization is applied, so the L1
guarantees against the exact distribution hold for the estimator as defined;
any projection onto the simplex would be a separate post-processing choice.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .filterbank import SQRT_2PI, FilterBank, bin_centers, evaluate_filter
from .signal import TimeSeries, generate_clean
from .spectrum import Spectrum

MAX_MOMENT_ORDER = 64


class BinKind(Enum):
    EXACT_P = "exact_p"
    TRUNCATED_P = "truncated_p"
    ESTIMATED_Q = "estimated_q"


@dataclass(frozen=True)
class BinDistribution:
    """Real vector over the M bin centers ``-1/2 + j*eps``."""

    values: np.ndarray
    eps: float
    kind: BinKind

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("values must be a 1-d real array")
        if self.kind is BinKind.EXACT_P:
            if np.any(v < -1e-12) or np.any(v > 1.0 + 1e-12):
                raise ValueError("exact bin probabilities must lie in [0, 1]")
            if abs(v.sum() - 1.0) > 1e-9:
                raise ValueError("exact bin probabilities must sum to 1 within 1e-9")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def centers(self) -> np.ndarray:
        return bin_centers(self.eps)

    def to_dict(self) -> dict:
        return {"eps": self.eps, "kind": self.kind.value, "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "BinDistribution":
        return cls(
            values=np.asarray(data["values"], dtype=float),
            eps=float(data["eps"]),
            kind=BinKind(data["kind"]),
        )


def exact_bins(spec: Spectrum, eps: float) -> BinDistribution:
    """Oracle bin probabilities ``p_j = sum_{lambda in bin j} f_j(lambda) * w``.

    Each eigenvalue contributes to at most the two bins whose supports contain
    it, and those contributions sum to its full weight, so the result is a
    probability vector.
    """
    centers = bin_centers(eps)
    m = centers.size
    p = np.zeros(m)
    for lam, w in zip(spec.lambdas, spec.weights):
        j0 = math.floor((lam + 0.5) / eps)
        for j in range(max(0, j0 - 1), min(m, j0 + 2)):
            if abs(lam - centers[j]) < eps:
                p[j] += w * evaluate_filter(j, float(lam), eps)
    return BinDistribution(values=p, eps=eps, kind=BinKind.EXACT_P)


def _bins_from_values(values: np.ndarray, bank: FilterBank) -> np.ndarray:
    """Shared linear form: coefficient row 0 plus twice the real part of the
    positive-k sum (the negative-k half follows from conjugate symmetry)."""
    n = bank.n_trunc
    head = bank.coeffs[:, 0].real / SQRT_2PI
    tail = math.sqrt(2.0 / math.pi) * np.real(bank.coeffs[:, 1:] @ np.conj(values[1:n]))
    return head + tail


def truncated_bins(spec: Spectrum, bank: FilterBank) -> BinDistribution:
    """Bin probabilities from the truncated Fourier form of the filters,
    applied to the exact signal of ``spec``."""
    g = generate_clean(spec, bank.n_trunc)
    return BinDistribution(
        values=_bins_from_values(g.values, bank), eps=bank.eps, kind=BinKind.TRUNCATED_P
    )


def estimate_bins(ts: TimeSeries, bank: FilterBank) -> BinDistribution:
    """The time-series estimator: the truncated linear form applied to the
    first ``bank.n_trunc`` entries of a (possibly noisy) signal."""
    if ts.n_len < bank.n_trunc:
        raise ValueError(
            f"signal has {ts.n_len} entries but the filter bank needs {bank.n_trunc}"
        )
    return BinDistribution(
        values=_bins_from_values(ts.values, bank), eps=bank.eps, kind=BinKind.ESTIMATED_Q
    )


def estimate_moment(dist: BinDistribution, s: int) -> float:
    """Spectral moment of the binned distribution:
    ``sum_j values[j] * (-1/2 + j*eps)**s``."""
    if not 0 <= s <= MAX_MOMENT_ORDER:
        raise ValueError(f"moment order s must lie in [0, {MAX_MOMENT_ORDER}]")
    return float(np.sum(dist.values * dist.centers**s))


def expectation_from_function(dist: BinDistribution, t_values) -> float:
    """Expectation ``sum_j values[j] * T(center_j)`` for a caller-supplied
    tabulation of T on the bin centers."""
    t = np.asarray(t_values, dtype=float)
    if t.shape != dist.values.shape:
        raise ValueError(f"t_values must have length {dist.values.size}, got {t.size}")
    return float(np.dot(dist.values, t))


def moment_error_bound(eps: float, t_max: float, t_prime_max: float) -> float:
    """A priori error bound ``eps * (t_max + t_prime_max)`` for expectations of
    a differentiable T, with the caller supplying the sup norms of T and T'
    over ``|x| <= 1/2``."""
    if t_max < 0 or t_prime_max < 0:
        raise ValueError("sup norms must be non-negative")
    return eps * (t_max + t_prime_max)


def rescale_physical(moment: float, s: int, h_norm: float) -> float:
    """Undo the normalization to a dimensionless operator: multiply an order-s
    moment by ``(2 * h_norm)**s`` where ``h_norm`` is the physical energy scale."""
    if s < 0:
        raise ValueError("moment order s must be non-negative")
    if not h_norm > 0:
        raise ValueError("h_norm must be positive")
    return moment * (2.0 * h_norm) ** s


def write_bins_csv(dist: BinDistribution, path) -> None:
    """CSV export with columns ``j, lambda_tilde, value``."""
    centers = dist.centers
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["j", "lambda_tilde", "value"])
        for j, (c, v) in enumerate(zip(centers, dist.values)):
            writer.writerow([j, format(c, ".17g"), format(v, ".17g")])
