"""Time-series generation: clean signals, analytic noise, and shot sampling.

The signal at integer time ``k`` is ``g_k = sum_d w_d * exp(-i * lambda_d * k)``,
the expectation of the evolution operator on the given spectrum. Estimators
consume negative indices through the identity ``g_{-k} = conj(g_k)``, which is
exact for this model. ``g_0`` is pinned to 1 rather than sampled.

All stochastic operations are pure functions of their seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .spectrum import Spectrum

CLEAN = "clean"
ADDITIVE_NOISE = "additive_noise"
SHOT_SAMPLED = "shot_sampled"


@dataclass(frozen=True)
class Provenance:
    """How a time series was produced; part of the experiment record."""

    kind: str
    eps_prime: float | None = None
    seed: int | None = None
    shots_per_point: int | None = None

    @classmethod
    def clean(cls) -> "Provenance":
        return cls(kind=CLEAN)

    @classmethod
    def additive_noise(cls, eps_prime: float, seed: int) -> "Provenance":
        return cls(kind=ADDITIVE_NOISE, eps_prime=float(eps_prime), seed=int(seed))

    @classmethod
    def shot_sampled(cls, shots_per_point: int, seed: int) -> "Provenance":
        return cls(kind=SHOT_SAMPLED, shots_per_point=int(shots_per_point), seed=int(seed))

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.eps_prime is not None:
            out["eps_prime"] = self.eps_prime
        if self.seed is not None:
            out["seed"] = self.seed
        if self.shots_per_point is not None:
            out["shots_per_point"] = self.shots_per_point
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Provenance":
        return cls(
            kind=data["kind"],
            eps_prime=data.get("eps_prime"),
            seed=data.get("seed"),
            shots_per_point=data.get("shots_per_point"),
        )


@dataclass(frozen=True)
class TimeSeries:
    """Complex signal values at integer times ``k = 0 .. n_len - 1``.

    ``values[0]`` must be exactly ``1 + 0j``; constructors of derived series
    re-pin it instead of sampling a known value. Immutable once built.
    """

    values: np.ndarray
    provenance: Provenance

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("values must be a non-empty 1-d complex array")
        if v[0] != 1.0 + 0.0j:
            raise ValueError("values[0] must equal 1 exactly")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_len(self) -> int:
        return self.values.size

    def to_dict(self) -> dict:
        return {
            "n_len": self.n_len,
            "provenance": self.provenance.to_dict(),
            "values_re": self.values.real.tolist(),
            "values_im": self.values.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TimeSeries":
        values = np.asarray(data["values_re"], dtype=float) + 1j * np.asarray(
            data["values_im"], dtype=float
        )
        return cls(values=values, provenance=Provenance.from_dict(data["provenance"]))


def generate_clean(spec: Spectrum, n_len: int) -> TimeSeries:
    """Exact signal ``g_k = sum_d w_d * exp(-i * lambda_d * k)`` for ``k < n_len``."""
    if n_len < 1:
        raise ValueError("n_len must be a positive integer")
    k = np.arange(n_len)
    values = np.exp(-1j * np.outer(k, spec.lambdas)) @ spec.weights.astype(complex)
    values[0] = 1.0  # sum of weights, pinned exactly
    return TimeSeries(values=values, provenance=Provenance.clean())


def add_noise(ts: TimeSeries, eps_prime: float, seed: int) -> TimeSeries:
    """Perturb each ``k >= 1`` entry by an i.i.d. complex number with magnitude
    uniform on ``[0, eps_prime]`` and phase uniform on ``[0, 2*pi]``.

    Magnitudes are drawn first, then phases, from one ``default_rng(seed)``
    stream, so results are bit-reproducible for a fixed seed.
    """
    if eps_prime < 0:
        raise ValueError("eps_prime must be non-negative")
    if ts.provenance.kind != CLEAN:
        raise ValueError("add_noise expects a clean input series")
    rng = np.random.default_rng(seed)
    n = ts.n_len
    magnitude = rng.uniform(0.0, eps_prime, n - 1)
    phase = rng.uniform(0.0, 2.0 * math.pi, n - 1)
    values = np.array(ts.values)
    values[1:] = values[1:] + magnitude * np.exp(1j * phase)
    values[0] = 1.0
    return TimeSeries(values=values, provenance=Provenance.additive_noise(eps_prime, seed))


def sample_shots(spec: Spectrum, n_len: int, shots_per_point: int, seed: int) -> TimeSeries:
    """Simulate per-quadrature +/-1 measurements of the exact signal.

    For each ``k >= 1`` the real quadrature is the mean of ``shots_per_point``
    outcomes with ``P(+1) = (1 + Re g_k) / 2`` and the imaginary quadrature the
    mean of an independent batch with ``P(+1) = (1 + Im g_k) / 2``. Real draws
    for all k happen before imaginary draws.
    """
    if n_len < 1:
        raise ValueError("n_len must be a positive integer")
    if shots_per_point < 1:
        raise ValueError("shots_per_point must be a positive integer")
    rng = np.random.default_rng(seed)
    g = generate_clean(spec, n_len).values
    p_re = np.clip((1.0 + g.real[1:]) / 2.0, 0.0, 1.0)
    p_im = np.clip((1.0 + g.imag[1:]) / 2.0, 0.0, 1.0)
    hits_re = rng.binomial(shots_per_point, p_re)
    hits_im = rng.binomial(shots_per_point, p_im)
    values = np.empty(n_len, dtype=complex)
    values[0] = 1.0
    values[1:] = (2.0 * hits_re / shots_per_point - 1.0) + 1j * (
        2.0 * hits_im / shots_per_point - 1.0
    )
    return TimeSeries(values=values, provenance=Provenance.shot_sampled(shots_per_point, seed))


def hoeffding_shots(n_len: int, eps_prime: float, confidence: float) -> int:
    """Number of +/-1 samples sufficient to estimate all ``n_len`` signal
    entries within ``eps_prime`` at overall confidence ``confidence``:
    ``ceil((2*n_len/eps_prime**2) * ln(2*n_len/(1-confidence)))``.
    """
    if n_len < 1:
        raise ValueError("n_len must be a positive integer")
    if eps_prime <= 0:
        raise ValueError("eps_prime must be positive")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie strictly between 0 and 1")
    return math.ceil((2.0 * n_len / eps_prime**2) * math.log(2.0 * n_len / (1.0 - confidence)))


def write_timeseries_csv(ts: TimeSeries, path) -> None:
    """CSV export with columns ``k, re, im`` (deterministic formatting)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "re", "im"])
        for k, v in enumerate(ts.values):
            writer.writerow([k, format(v.real, ".17g"), format(v.imag, ".17g")])
