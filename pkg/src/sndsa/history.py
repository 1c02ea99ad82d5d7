"""Convergence records for source iteration runs."""

import io
from dataclasses import dataclass, field

import numpy as np


@dataclass
class IterationHistory:
    """Per-iteration convergence data.

    error_inf[j] is the max-norm change between successive angular flux
    iterates (or the distance to a supplied reference solution), residual_inf
    the max-norm transport residual of iterate j, cumulative_sweeps the total
    number of single-direction sweeps performed up to and including step j.
    """

    errors: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    cumulative_sweeps: list = field(default_factory=list)
    diverged: bool = False
    converged: bool = False

    @property
    def n_iterations(self) -> int:
        return len(self.errors)

    def record(self, error: float, residual: float, sweeps: int) -> None:
        self.errors.append(float(error))
        self.residuals.append(float(residual))
        self.cumulative_sweeps.append(int(sweeps))

    def check_divergence(self, window: int = 5, factor: float = 10.0) -> bool:
        """Flag growth by factor over window iterations, or non-finite error."""
        err = self.errors
        if err and not np.isfinite(err[-1]):
            self.diverged = True
        elif len(err) > window and err[-1] > factor * err[-1 - window]:
            self.diverged = True
        return self.diverged

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("iter,error_inf,residual_inf,cumulative_sweeps,diverged\n")
        flag = "true" if self.diverged else "false"
        for j, (e, r, s) in enumerate(
                zip(self.errors, self.residuals, self.cumulative_sweeps), start=1):
            buf.write("%d,%.16e,%.16e,%d,%s\n" % (j, e, r, s, flag))
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_csv())
