"""MDLAC correlation objectives mapping a damage vector to objective values.

Two objectives are used for the beam benchmark: negated MDLAC of the natural
frequency changes and negated MDLAC of one mode-shape change.  Both lie in
[-1, 0] and are minimized.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import beam
from .beam import BeamModel
from .errors import InvalidInputError


@dataclass(frozen=True, eq=False)
class Measurement:
    """Measured eigenvalue changes and one mode-shape change.

    ``delta_lambda`` holds the first q eigenvalue changes (healthy minus
    damaged), ``delta_phi`` the change of mode ``mode_index`` (1-based)
    restricted to the measured DOFs.
    """

    delta_lambda: np.ndarray
    delta_phi: np.ndarray
    mode_index: int = 2

    def __post_init__(self):
        dl = np.asarray(self.delta_lambda, dtype=float)
        dp = np.asarray(self.delta_phi, dtype=float)
        if dl.ndim != 1 or dl.size < 1:
            raise InvalidInputError("delta_lambda must be a non-empty 1-D vector")
        if dp.ndim != 1 or dp.size < 1:
            raise InvalidInputError("delta_phi must be a non-empty 1-D vector")
        if self.mode_index < 1:
            raise InvalidInputError(f"mode_index must be >= 1, got {self.mode_index}")
        if not np.any(dl) and not np.any(dp):
            raise InvalidInputError(
                "measurement rejected: both change vectors are identically zero")
        dl.setflags(write=False)
        dp.setflags(write=False)
        object.__setattr__(self, "delta_lambda", dl)
        object.__setattr__(self, "delta_phi", dp)

    @property
    def q(self) -> int:
        return self.delta_lambda.size


def mdlac(measured, predicted) -> float:
    """Squared normalized inner product of two change vectors, in [0, 1].

    Returns 0 by convention when the predicted change is the zero vector
    (the healthy hypothesis must never look perfect against a real change).
    """
    measured = np.asarray(measured, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if measured.shape != predicted.shape:
        raise InvalidInputError(
            f"vector length mismatch: {measured.shape} vs {predicted.shape}")
    if not np.any(measured):
        raise InvalidInputError("measured change vector is identically zero")
    if not np.any(predicted):
        return 0.0
    # pre-scale by the largest magnitudes so near-subnormal or huge inputs
    # cannot underflow/overflow the Gram products
    measured = measured / np.abs(measured).max()
    predicted = predicted / np.abs(predicted).max()
    value = np.dot(measured, predicted) ** 2 / (
        np.dot(measured, measured) * np.dot(predicted, predicted))
    return float(min(value, 1.0))


@dataclass
class Evaluator:
    """Callable mapping a damage vector to the two-objective MDLAC vector.

    A single modal solve per call covers both the frequency and the
    mode-shape prediction.  ``prediction="sensitivity"`` replaces the exact
    frequency-change re-solve with the first-order map S @ alpha.
    """

    model: BeamModel
    measurement: Measurement
    prediction: str = "exact"
    _sensitivity: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.prediction not in ("exact", "sensitivity"):
            raise InvalidInputError(
                f"prediction mode must be 'exact' or 'sensitivity', got {self.prediction!r}")
        if self.prediction == "sensitivity":
            self._sensitivity = beam.sensitivity_matrix(self.model, self.measurement.q).matrix
        # warm the baseline caches so concurrent calls only read them
        beam.healthy_modal(self.model, self._n_modes)

    @property
    def _n_modes(self) -> int:
        return max(self.measurement.q, self.measurement.mode_index)

    def __call__(self, alpha) -> np.ndarray:
        meas = self.measurement
        q, j = meas.q, meas.mode_index
        healthy = beam.healthy_modal(self.model, self._n_modes)
        damaged = beam.solve_modal(self.model, alpha, self._n_modes)
        if self._sensitivity is not None:
            delta_lambda = self._sensitivity @ np.asarray(alpha, dtype=float)
        else:
            delta_lambda = healthy.eigenvalues[:q] - damaged.eigenvalues[:q]
        phi_h = healthy.mode_shapes[:, j - 1]
        phi_d = damaged.mode_shapes[:, j - 1]
        if np.dot(phi_d, phi_h) < 0.0:
            phi_d = -phi_d
        delta_phi = (phi_h - phi_d)[beam.TRANSLATIONAL_DOFS]
        return -np.array([mdlac(meas.delta_lambda, delta_lambda),
                          mdlac(meas.delta_phi, delta_phi)])


def evaluate(alpha, measurement: Measurement, model: BeamModel,
             prediction: str = "exact") -> np.ndarray:
    """Objective vector (f1, f2) = (-MDLAC_freq, -MDLAC_mode) at ``alpha``."""
    return Evaluator(model, measurement, prediction)(alpha)
