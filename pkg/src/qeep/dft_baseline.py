"""Plain DFT baseline, used to demonstrate spectral leakage on off-grid tones."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DftResult:
    """Unitary DFT output sorted by the frequency axis ``(-pi, pi]``."""

    coefficients: np.ndarray
    frequency_grid: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        f = np.asarray(self.frequency_grid, dtype=float)
        if c.shape != f.shape or c.ndim != 1:
            raise ValueError("coefficients and frequency_grid must be equal-length vectors")
        c.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "frequency_grid", f)


def dft(signal) -> DftResult:
    """Unitary DFT with forward kernel ``exp(-2*pi*i*k*m/M)`` and ``1/sqrt(M)``
    normalization.

    Bin ``m`` maps to ``lambda' = 2*pi*m/M`` wrapped into ``(-pi, pi]``; output
    is sorted by ``lambda'``. A pure tone ``exp(-i*lambda*k)`` with on-grid
    ``lambda`` lands entirely on the bin at ``-lambda`` (wrapped); off-grid
    tones leak into every bin.
    """
    values = np.asarray(signal, dtype=complex)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("signal must be a non-empty 1-d array")
    m = values.size
    coeffs = np.fft.fft(values) / math.sqrt(m)
    grid = 2.0 * math.pi * np.arange(m) / m
    grid = np.where(grid > math.pi, grid - 2.0 * math.pi, grid)
    order = np.argsort(grid)
    return DftResult(coefficients=coeffs[order], frequency_grid=grid[order])


def write_dft_csv(result: DftResult, path) -> None:
    """CSV export with columns ``lambda_prime, re, im``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda_prime", "re", "im"])
        for f, c in zip(result.frequency_grid, result.coefficients):
            writer.writerow([format(f, ".17g"), format(c.real, ".17g"), format(c.imag, ".17g")])
