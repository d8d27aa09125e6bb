"""Scikit-learn style front end to the ensemble simulator."""

from __future__ import annotations

from typing import Iterable

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import DomainError
from .ensemble import (DeltaB1, EchoTrace, EnsembleSpec, GaussianB1, GaussianLine,
                       LorentzianLine, TabulatedLine, build_ensemble, echo_amplitude,
                       simulate_echo)
from .pulses import DT

_LINES = {"gaussian": GaussianLine, "lorentzian": LorentzianLine}


class EchoSimulator(BaseEstimator):
    """Predict echo amplitudes of pulse sequences on a spin ensemble.

    ``fit`` discretizes the ensemble.  Pass ``X`` as an ``(n, 2)`` array of
    ``(detuning, weight)`` rows to use a tabulated line instead of the
    parametric ``lineshape``.  ``predict`` maps a list of sequences (or
    compiled waveforms) to their echo amplitudes.

    Parameters
    ----------
    lineshape : {"gaussian", "lorentzian"}
    linewidth : float
        Line FWHM in MHz.
    n_packets : int
        Detuning grid size.
    b1_sd : float
        Relative standard deviation of the drive strength; 0 disables it.
    resonator : ResonatorFilter or None
        Applied to each compiled waveform before simulation.
    """

    def __init__(self, lineshape="gaussian", linewidth=9.35, n_packets=2001, b1_sd=0.0,
                 n_b1=21, t1=1e6, t2=200.0, driven_relaxation=True, sampling="quadrature",
                 seed=0, mode="magnitude", dt=DT, resonator=None):
        self.lineshape = lineshape
        self.linewidth = linewidth
        self.n_packets = n_packets
        self.b1_sd = b1_sd
        self.n_b1 = n_b1
        self.t1 = t1
        self.t2 = t2
        self.driven_relaxation = driven_relaxation
        self.sampling = sampling
        self.seed = seed
        self.mode = mode
        self.dt = dt
        self.resonator = resonator

    def fit(self, X=None, y=None):
        if X is not None:
            table = np.asarray(X, dtype=float)
            if table.ndim != 2 or table.shape[1] != 2:
                raise DomainError("X must be an (n, 2) array of (detuning, weight)")
            line = TabulatedLine(tuple(table[:, 0]), tuple(table[:, 1]))
        elif self.lineshape in _LINES:
            line = _LINES[self.lineshape](self.linewidth)
        else:
            raise DomainError(f"unknown lineshape {self.lineshape!r}")
        b1 = GaussianB1(self.b1_sd, self.n_b1) if self.b1_sd > 0 else DeltaB1()
        self.spec_ = EnsembleSpec(line, self.n_packets, b1, self.t1, self.t2, self.sampling,
                                  self.seed, self.driven_relaxation)
        self.ensemble_ = build_ensemble(self.spec_)
        if self.resonator is not None and not hasattr(self.resonator, "model_"):
            self.resonator.fit()
        return self

    def _filter_kwargs(self):
        r = self.resonator
        if r is None or not r.enabled:
            return {}
        return {"resonator": r.model_, "carrier_offset": r.carrier_offset}

    def predict(self, X: Iterable) -> np.ndarray:
        check_is_fitted(self, "ensemble_")
        return np.array([echo_amplitude(seq, self.ensemble_, dt=self.dt, mode=self.mode,
                                        **self._filter_kwargs()) for seq in X])

    def simulate(self, seq) -> EchoTrace:
        """Full :class:`EchoTrace` for one sequence."""
        check_is_fitted(self, "ensemble_")
        return simulate_echo(seq, self.ensemble_, dt=self.dt, mode=self.mode,
                             **self._filter_kwargs())
