"""Difference-attention forecaster.

The model runs an LSTM over the input window, augments each hidden state
with a two-entry difference feature (squared first differences of the two
points preceding that step), scores every augmented step with an additive
attention network, and reads the prediction off the attention-weighted sum
of the augmented states instead of the last hidden state alone.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .lstm import (
    LstmParams,
    OutputHead,
    _check_finite,
    lstm_bptt,
    lstm_forward,
    lstm_forward_batch,
    lstm_trace,
)
from .numerics import GradientBundle, softmax


@dataclass
class AttentionParams:
    """Additive scoring network: score(x) = v . tanh(W x + b)."""

    W: np.ndarray  # (A, H+2)
    v: np.ndarray  # (A,)
    b: np.ndarray  # (A,)

    def __post_init__(self):
        A = self.v.shape[0]
        if self.W.ndim != 2 or self.W.shape[0] != A or self.b.shape != (A,):
            raise DimensionError(
                f"AttentionParams: inconsistent shapes W{self.W.shape}, "
                f"v{self.v.shape}, b{self.b.shape}"
            )
        for name in ("W", "v", "b"):
            _check_finite(f"attn.{name}", getattr(self, name))

    @property
    def width(self) -> int:
        return self.v.shape[0]

    @property
    def feature_len(self) -> int:
        return self.W.shape[1]

    @classmethod
    def init(cls, hidden_size: int, width: int, rng: np.random.Generator) -> "AttentionParams":
        feat = hidden_size + 2
        w_lim = 1.0 / np.sqrt(feat)
        v_lim = 1.0 / np.sqrt(width)
        return cls(
            rng.uniform(-w_lim, w_lim, (width, feat)),
            rng.uniform(-v_lim, v_lim, width),
            np.zeros(width),
        )

    def param_dict(self, prefix: str = "") -> dict[str, np.ndarray]:
        return {prefix + "W": self.W, prefix + "v": self.v, prefix + "b": self.b}

    def copy(self) -> "AttentionParams":
        return AttentionParams(self.W.copy(), self.v.copy(), self.b.copy())


@dataclass
class DaLstmModel:
    """LSTM + difference features + attention + read-out over the context."""

    lstm: LstmParams
    attn: AttentionParams
    head: OutputHead

    def __post_init__(self):
        feat = self.lstm.hidden_size + 2
        if self.lstm.input_size != 1:
            raise DimensionError("DaLstmModel: LSTM input size must be 1")
        if self.attn.feature_len != feat:
            raise DimensionError(
                f"DaLstmModel: attention reads width {self.attn.feature_len}, "
                f"expected {feat}"
            )
        if self.head.w.shape != (feat,):
            raise DimensionError(
                f"DaLstmModel: head reads width {self.head.w.shape[0]}, expected {feat}"
            )

    @property
    def hidden_size(self) -> int:
        return self.lstm.hidden_size

    @classmethod
    def init(
        cls,
        hidden_size: int,
        rng: np.random.Generator,
        attention_size: int | None = None,
    ) -> "DaLstmModel":
        width = attention_size if attention_size is not None else hidden_size
        return cls(
            LstmParams.init(1, hidden_size, rng),
            AttentionParams.init(hidden_size, width, rng),
            OutputHead.init(hidden_size + 2, rng),
        )

    def param_dict(self, prefix: str = "") -> dict[str, np.ndarray]:
        return (
            self.lstm.param_dict(prefix + "lstm.")
            | self.attn.param_dict(prefix + "attn.")
            | self.head.param_dict(prefix + "head.")
        )

    def copy(self) -> "DaLstmModel":
        return DaLstmModel(self.lstm.copy(), self.attn.copy(), self.head.copy())


def difference_features(lead_in, window) -> np.ndarray:
    """Per-step squared first differences, shape (len(window), 2).

    Row k is ((x[k-1]-x[k-2])^2, (x[k]-x[k-1])^2) over the extended sequence
    [lead_in, window], so the first two rows draw on the lead-in points.
    """
    lead = np.asarray(lead_in, dtype=np.float64)
    win = np.asarray(window, dtype=np.float64)
    if lead.shape != (2,):
        raise DomainError(
            f"difference_features: lead-in must hold exactly 2 values, got {lead.shape}"
        )
    if win.size == 0:
        raise DomainError("difference_features: empty window")
    ext = np.concatenate([lead, win])
    d = np.diff(ext)
    return np.stack([d[:-1] ** 2, d[1:] ** 2], axis=1)


def concat_hidden(h: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Augmented state [d; h]: difference feature first, hidden state after."""
    return np.concatenate([d, h])


def attention_weights(attn: AttentionParams, hts) -> np.ndarray:
    """Softmax-normalized importance of each augmented step."""
    H = np.atleast_2d(np.asarray(hts, dtype=np.float64))
    if H.shape[0] == 0:
        raise DomainError("attention_weights: empty step sequence")
    if H.shape[1] != attn.feature_len:
        raise DimensionError(
            f"attention_weights: steps have width {H.shape[1]}, "
            f"attention expects {attn.feature_len}"
        )
    scores = np.tanh(H @ attn.W.T + attn.b) @ attn.v
    return softmax(scores)


def context_vector(weights: np.ndarray, hts) -> np.ndarray:
    """Weighted sum of the augmented steps."""
    H = np.atleast_2d(np.asarray(hts, dtype=np.float64))
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (H.shape[0],):
        raise DimensionError(
            f"context_vector: {w.shape[0]} weights for {H.shape[0]} steps"
        )
    return w @ H


def da_forward(m: DaLstmModel, lead_in, window) -> float:
    """One prediction: LSTM, difference features, attention, read-out."""
    states = lstm_forward(m.lstm, window)
    feats = difference_features(lead_in, window)
    hts = np.stack([concat_hidden(st.h, d) for st, d in zip(states, feats)])
    alpha = attention_weights(m.attn, hts)
    theta = context_vector(alpha, hts)
    return float(m.head.w @ theta + m.head.b[0])


def da_loss_and_grads(
    m: DaLstmModel, lead_in, window, target: float
) -> tuple[float, GradientBundle]:
    """Squared error of da_forward and its gradient for every parameter."""
    tr = lstm_trace(m.lstm, window)
    feats = difference_features(lead_in, window)
    hts = np.concatenate([feats, tr.H], axis=1)  # (T, H+2)
    U = hts @ m.attn.W.T + m.attn.b  # (T, A)
    TU = np.tanh(U)
    scores = TU @ m.attn.v
    alpha = softmax(scores)
    theta = alpha @ hts
    pred = float(m.head.w @ theta + m.head.b[0])

    err = target - pred
    d_pred = -2.0 * err
    d_theta = d_pred * m.head.w
    d_alpha = hts @ d_theta
    d_hts = np.outer(alpha, d_theta)
    d_scores = alpha * (d_alpha - alpha @ d_alpha)
    d_U = d_scores[:, None] * (m.attn.v * (1.0 - TU * TU))
    d_hts += d_U @ m.attn.W
    lstm_grads, _ = lstm_bptt(m.lstm, tr, d_hts[:, 2:])

    grads: GradientBundle = {f"lstm.{k}": v for k, v in lstm_grads.items()}
    grads["attn.W"] = d_U.T @ hts
    grads["attn.v"] = TU.T @ d_scores
    grads["attn.b"] = d_U.sum(axis=0)
    grads["head.w"] = d_pred * theta
    grads["head.b"] = np.array([d_pred])
    return err * err, grads


def da_forward_batch(m: DaLstmModel, lead_ins: np.ndarray, windows: np.ndarray) -> np.ndarray:
    """Predictions for many (lead_in, window) pairs; shapes (N, 2), (N, T)."""
    hs = lstm_forward_batch(m.lstm, windows[:, :, None])  # (N, T, H)
    ext = np.concatenate([lead_ins, windows], axis=1)
    d = np.diff(ext, axis=1)
    feats = np.stack([d[:, :-1] ** 2, d[:, 1:] ** 2], axis=2)  # (N, T, 2)
    hts = np.concatenate([feats, hs], axis=2)  # (N, T, H+2)
    scores = np.tanh(hts @ m.attn.W.T + m.attn.b) @ m.attn.v  # (N, T)
    e = np.exp(scores - scores.max(axis=1, keepdims=True))
    alpha = e / e.sum(axis=1, keepdims=True)
    theta = np.einsum("nt,ntj->nj", alpha, hts)
    return theta @ m.head.w + m.head.b[0]
