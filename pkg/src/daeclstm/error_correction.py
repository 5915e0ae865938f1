"""Residual forecaster: a plain LSTM trained on another model's errors.

The residual series holds truth minus prediction at every position the
attention model can predict; a second LSTM then forecasts the next
residual so it can be added back onto the primary forecast.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from .attention import DaLstmModel, da_forward_batch
from .data import as_values, min_series_length
from .errors import DimensionError, DomainError
from .lstm import (
    LstmParams,
    OutputHead,
    lstm_loss_and_grads,
    lstm_predict,
    lstm_predict_batch,
)
from .numerics import GradientBundle


@dataclass
class EcLstmModel:
    """Plain LSTM plus last-state read-out, applied to residual windows."""

    lstm: LstmParams
    head: OutputHead

    def __post_init__(self):
        if self.lstm.input_size != 1:
            raise DimensionError("EcLstmModel: LSTM input size must be 1")
        if self.head.w.shape != (self.lstm.hidden_size,):
            raise DimensionError(
                f"EcLstmModel: head reads width {self.head.w.shape[0]}, "
                f"expected {self.lstm.hidden_size}"
            )

    @property
    def hidden_size(self) -> int:
        return self.lstm.hidden_size

    @classmethod
    def init(cls, hidden_size: int, rng: np.random.Generator) -> "EcLstmModel":
        return cls(LstmParams.init(1, hidden_size, rng), OutputHead.init(hidden_size, rng))

    def param_dict(self, prefix: str = "") -> dict[str, np.ndarray]:
        return self.lstm.param_dict(prefix + "lstm.") | self.head.param_dict(prefix + "head.")

    def copy(self) -> "EcLstmModel":
        return EcLstmModel(self.lstm.copy(), self.head.copy())


@dataclass
class ErrorSeries:
    """Residuals truth - prediction, aligned to source-series indices.

    Entry k is the residual at series position first_index + k; origin
    identifies the exact model parameters that produced the predictions.
    """

    e: np.ndarray
    origin: str
    first_index: int

    def __len__(self) -> int:
        return self.e.size


def model_fingerprint(model) -> str:
    """Content hash over a model's named parameter arrays."""
    digest = hashlib.sha256()
    for name, arr in sorted(model.param_dict().items()):
        digest.update(name.encode())
        digest.update(str(arr.shape).encode())
        digest.update(np.ascontiguousarray(arr, dtype=np.float64).tobytes())
    return "sha256:" + digest.hexdigest()


def build_error_series(da: DaLstmModel, series, window_len: int) -> ErrorSeries:
    """Residual at every position the model can predict from full history.

    Position u gets truth[u] minus the prediction from the window ending at
    u - 1 (plus its two lead-in points), so the first covered position is
    window_len + 2.
    """
    v = as_values(series)
    need = min_series_length(window_len)
    if v.size < need:
        raise DomainError(
            f"series of length {v.size} is too short to build residuals for "
            f"window_len {window_len}; need at least {need}"
        )
    first = window_len + 2
    targets = np.arange(first, v.size)
    starts = targets - window_len
    windows = v[starts[:, None] + np.arange(window_len)]
    leads = v[starts[:, None] + np.array([-2, -1])]
    preds = da_forward_batch(da, leads, windows)
    return ErrorSeries(v[first:] - preds, model_fingerprint(da), first)


def ec_forward(m: EcLstmModel, error_window) -> float:
    """Next-residual prediction; identical mechanics to lstm_predict."""
    return lstm_predict(m.lstm, m.head, error_window)


def ec_forward_batch(m: EcLstmModel, error_windows: np.ndarray) -> np.ndarray:
    return lstm_predict_batch(m.lstm, m.head, error_windows)


def ec_loss_and_grads(
    m: EcLstmModel, error_window, target: float
) -> tuple[float, GradientBundle]:
    """Squared error of the residual prediction and its gradient."""
    return lstm_loss_and_grads(m.lstm, m.head, error_window, target)
