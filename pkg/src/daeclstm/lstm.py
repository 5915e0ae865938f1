"""Standard LSTM cell, sequence models, and their backpropagation.

The cell follows the usual gate equations with the bias inside each
activation and the recurrent input concatenated as ``[h_prev, x]``:

    f = sigmoid(W_f [h, x] + b_f)        forget gate
    i = sigmoid(W_i [h, x] + b_i)        input gate
    g = tanh(W_c [h, x] + b_c)           candidate cell value
    C' = f * C + i * g
    o = sigmoid(W_o [h, x] + b_o)        output gate
    h' = o * tanh(C')

Three evaluation paths share these equations: the step-by-step public
functions (:func:`lstm_cell_step`, :func:`lstm_forward`), a fused
per-window trace used for training (:func:`lstm_trace` / :func:`lstm_bptt`),
and a batched forward over many windows for fast evaluation
(:func:`lstm_forward_batch`).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .numerics import GradientBundle, affine, sigmoid, tanh_act


def _check_finite(name: str, arr: np.ndarray) -> None:
    if not np.isfinite(arr).all():
        raise DomainError(f"{name} contains non-finite entries")


@dataclass
class LstmParams:
    """Gate weight matrices of shape (H, H+D) and bias vectors of length H."""

    W_f: np.ndarray
    W_i: np.ndarray
    W_c: np.ndarray
    W_o: np.ndarray
    b_f: np.ndarray
    b_i: np.ndarray
    b_c: np.ndarray
    b_o: np.ndarray

    def __post_init__(self):
        shape = self.W_f.shape
        H = shape[0]
        if shape[1] <= H:
            raise DimensionError(
                f"LstmParams: weight matrices must be H x (H+D), got {shape}"
            )
        for name in ("W_f", "W_i", "W_c", "W_o"):
            w = getattr(self, name)
            if w.shape != shape:
                raise DimensionError(
                    f"LstmParams: {name} has shape {w.shape}, expected {shape}"
                )
            _check_finite(name, w)
        for name in ("b_f", "b_i", "b_c", "b_o"):
            b = getattr(self, name)
            if b.shape != (H,):
                raise DimensionError(
                    f"LstmParams: {name} has shape {b.shape}, expected ({H},)"
                )
            _check_finite(name, b)

    @property
    def hidden_size(self) -> int:
        return self.W_f.shape[0]

    @property
    def input_size(self) -> int:
        return self.W_f.shape[1] - self.W_f.shape[0]

    @classmethod
    def init(cls, input_size: int, hidden_size: int, rng: np.random.Generator) -> "LstmParams":
        """Fan-in uniform weights in [-1/sqrt(H+D), 1/sqrt(H+D)], zero biases."""
        H, D = hidden_size, input_size
        lim = 1.0 / np.sqrt(H + D)
        mats = [rng.uniform(-lim, lim, (H, H + D)) for _ in range(4)]
        zeros = [np.zeros(H) for _ in range(4)]
        return cls(*mats, *zeros)

    def param_dict(self, prefix: str = "") -> dict[str, np.ndarray]:
        """Live (non-copied) named views of every parameter array."""
        return {
            prefix + name: getattr(self, name)
            for name in ("W_f", "W_i", "W_c", "W_o", "b_f", "b_i", "b_c", "b_o")
        }

    def copy(self) -> "LstmParams":
        return LstmParams(*(getattr(self, n).copy() for n in
                            ("W_f", "W_i", "W_c", "W_o", "b_f", "b_i", "b_c", "b_o")))


@dataclass
class LstmState:
    """Hidden state h and cell state C, both of length H."""

    h: np.ndarray
    C: np.ndarray

    @classmethod
    def zeros(cls, hidden_size: int) -> "LstmState":
        return cls(np.zeros(hidden_size), np.zeros(hidden_size))


@dataclass
class OutputHead:
    """Scalar affine read-out: prediction = w . features + b."""

    w: np.ndarray
    b: np.ndarray  # shape (1,) so optimizer updates can happen in place

    def __post_init__(self):
        self.b = np.atleast_1d(np.asarray(self.b, dtype=np.float64))
        _check_finite("head.w", self.w)
        _check_finite("head.b", self.b)

    @classmethod
    def init(cls, feature_len: int, rng: np.random.Generator) -> "OutputHead":
        lim = 1.0 / np.sqrt(feature_len)
        return cls(rng.uniform(-lim, lim, feature_len), np.zeros(1))

    def param_dict(self, prefix: str = "") -> dict[str, np.ndarray]:
        return {prefix + "w": self.w, prefix + "b": self.b}

    def copy(self) -> "OutputHead":
        return OutputHead(self.w.copy(), self.b.copy())


def lstm_cell_step(p: LstmParams, s: LstmState, x: np.ndarray) -> LstmState:
    """One cell update consuming input vector x of length D."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.shape != (p.input_size,):
        raise DimensionError(
            f"lstm_cell_step: input has shape {x.shape}, expected ({p.input_size},)"
        )
    if s.h.shape != (p.hidden_size,) or s.C.shape != (p.hidden_size,):
        raise DimensionError(
            f"lstm_cell_step: state shapes {s.h.shape}/{s.C.shape} do not match "
            f"hidden size {p.hidden_size}"
        )
    z = np.concatenate([s.h, x])
    f = sigmoid(affine(p.W_f, z, p.b_f))
    i = sigmoid(affine(p.W_i, z, p.b_i))
    g = tanh_act(affine(p.W_c, z, p.b_c))
    C = f * s.C + i * g
    o = sigmoid(affine(p.W_o, z, p.b_o))
    h = o * np.tanh(C)
    return LstmState(h, C)


def _as_input_matrix(xs, input_size: int) -> np.ndarray:
    """Coerce a window (scalars or vectors) to a (T, D) float64 array."""
    arr = np.asarray(xs, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] != input_size:
        raise DimensionError(
            f"input sequence has shape {np.shape(xs)}, expected (T, {input_size})"
        )
    return arr


def lstm_forward(p: LstmParams, xs, s0: LstmState | None = None) -> list[LstmState]:
    """States after each input; element k is the state after xs[0..k]."""
    X = _as_input_matrix(xs, p.input_size)
    if X.shape[0] == 0:
        raise DomainError("lstm_forward: empty input sequence")
    s = s0 if s0 is not None else LstmState.zeros(p.hidden_size)
    states = []
    for t in range(X.shape[0]):
        s = lstm_cell_step(p, s, X[t])
        states.append(s)
    return states


def lstm_predict(p: LstmParams, head: OutputHead, window) -> float:
    """Affine read-out of the last hidden state after consuming the window."""
    states = lstm_forward(p, window)
    return float(head.w @ states[-1].h + head.b[0])


def stacked_lstm_predict(layers: list[LstmParams], head: OutputHead, window) -> float:
    """Each layer consumes the full hidden sequence of the layer below."""
    _check_layer_chain(layers)
    seq = _as_input_matrix(window, layers[0].input_size)
    if seq.shape[0] == 0:
        raise DomainError("stacked_lstm_predict: empty window")
    for layer in layers:
        states = lstm_forward(layer, seq)
        seq = np.stack([st.h for st in states])
    return float(head.w @ seq[-1] + head.b[0])


def _check_layer_chain(layers: list[LstmParams]) -> None:
    if not layers:
        raise DomainError("stacked model needs at least one layer")
    for k in range(1, len(layers)):
        if layers[k].input_size != layers[k - 1].hidden_size:
            raise DimensionError(
                f"layer {k} expects input size {layers[k].input_size} but layer "
                f"{k - 1} has hidden size {layers[k - 1].hidden_size}"
            )


# ---------------------------------------------------------------------------
# Fused per-window trace + backpropagation through time (training path).
# Gate rows are packed [f, i, o, g] so one sigmoid call covers the first 3H.
# ---------------------------------------------------------------------------


class LstmTrace:
    """All intermediate values of one forward pass, for the backward pass."""

    __slots__ = ("Z", "F", "I", "O", "G", "C", "TC", "H")

    def __init__(self, Z, F, I, O, G, C, TC, H):
        self.Z = Z    # (T, H+D) concatenated [h_prev, x] per step
        self.F = F    # gate activations, each (T, H)
        self.I = I
        self.O = O
        self.G = G
        self.C = C    # cell states (T, H)
        self.TC = TC  # tanh(C) (T, H)
        self.H = H    # hidden states (T, H)


def _fused_weights(p: LstmParams) -> tuple[np.ndarray, np.ndarray]:
    W4 = np.concatenate([p.W_f, p.W_i, p.W_o, p.W_c], axis=0)
    b4 = np.concatenate([p.b_f, p.b_i, p.b_o, p.b_c])
    return W4, b4


def lstm_trace(p: LstmParams, xs) -> LstmTrace:
    """Forward pass over one window, caching everything lstm_bptt needs."""
    X = _as_input_matrix(xs, p.input_size)
    T = X.shape[0]
    if T == 0:
        raise DomainError("lstm_trace: empty input sequence")
    H = p.hidden_size
    W4, b4 = _fused_weights(p)
    Z = np.empty((T, H + p.input_size))
    F = np.empty((T, H))
    I = np.empty((T, H))
    O = np.empty((T, H))
    G = np.empty((T, H))
    C = np.empty((T, H))
    TC = np.empty((T, H))
    Hs = np.empty((T, H))
    h = np.zeros(H)
    c = np.zeros(H)
    for t in range(T):
        z = Z[t]
        z[:H] = h
        z[H:] = X[t]
        a = W4 @ z + b4
        sig = sigmoid(a[: 3 * H])
        f = sig[:H]
        i = sig[H : 2 * H]
        o = sig[2 * H :]
        g = np.tanh(a[3 * H :])
        c = f * c + i * g
        tc = np.tanh(c)
        h = o * tc
        F[t] = f
        I[t] = i
        O[t] = o
        G[t] = g
        C[t] = c
        TC[t] = tc
        Hs[t] = h
    return LstmTrace(Z, F, I, O, G, C, TC, Hs)


def lstm_bptt(
    p: LstmParams, trace: LstmTrace, d_h: np.ndarray
) -> tuple[GradientBundle, np.ndarray]:
    """Backpropagate per-step hidden-state gradients d_h of shape (T, H).

    Returns unprefixed parameter gradients and the gradient with respect to
    every input vector, shape (T, D).
    """
    T, H = trace.H.shape
    D = trace.Z.shape[1] - H
    W4, _ = _fused_weights(p)
    dW4 = np.zeros_like(W4)
    db4 = np.zeros(4 * H)
    dX = np.empty((T, D))
    da = np.empty(4 * H)
    dh = np.zeros(H)
    dc = np.zeros(H)
    for t in range(T - 1, -1, -1):
        dh = dh + d_h[t]
        f = trace.F[t]
        i = trace.I[t]
        o = trace.O[t]
        g = trace.G[t]
        tc = trace.TC[t]
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc * tc)
        c_prev = trace.C[t - 1] if t > 0 else np.zeros(H)
        da[:H] = (dc * c_prev) * f * (1.0 - f)
        da[H : 2 * H] = (dc * g) * i * (1.0 - i)
        da[2 * H : 3 * H] = do * o * (1.0 - o)
        da[3 * H :] = (dc * i) * (1.0 - g * g)
        dc = dc * f
        dW4 += np.outer(da, trace.Z[t])
        db4 += da
        dz = W4.T @ da
        dh = dz[:H]
        dX[t] = dz[H:]
    grads = {
        "W_f": dW4[:H],
        "W_i": dW4[H : 2 * H],
        "W_o": dW4[2 * H : 3 * H],
        "W_c": dW4[3 * H :],
        "b_f": db4[:H],
        "b_i": db4[H : 2 * H],
        "b_o": db4[2 * H : 3 * H],
        "b_c": db4[3 * H :],
    }
    return grads, dX


def lstm_loss_and_grads(
    p: LstmParams, head: OutputHead, window, target: float
) -> tuple[float, GradientBundle]:
    """Squared error of the last-state prediction and its full gradient."""
    tr = lstm_trace(p, window)
    pred = float(head.w @ tr.H[-1] + head.b[0])
    err = target - pred
    d_pred = -2.0 * err
    d_h = np.zeros_like(tr.H)
    d_h[-1] = d_pred * head.w
    lstm_grads, _ = lstm_bptt(p, tr, d_h)
    grads = {f"lstm.{k}": v for k, v in lstm_grads.items()}
    grads["head.w"] = d_pred * tr.H[-1]
    grads["head.b"] = np.array([d_pred])
    return err * err, grads


def stacked_loss_and_grads(
    layers: list[LstmParams], head: OutputHead, window, target: float
) -> tuple[float, GradientBundle]:
    """Squared-error loss and gradients for the stacked model."""
    _check_layer_chain(layers)
    traces = []
    seq = _as_input_matrix(window, layers[0].input_size)
    for layer in layers:
        tr = lstm_trace(layer, seq)
        traces.append(tr)
        seq = tr.H
    pred = float(head.w @ seq[-1] + head.b[0])
    err = target - pred
    d_pred = -2.0 * err
    grads: GradientBundle = {
        "head.w": d_pred * seq[-1],
        "head.b": np.array([d_pred]),
    }
    d_h = np.zeros_like(seq)
    d_h[-1] = d_pred * head.w
    for k in range(len(layers) - 1, -1, -1):
        layer_grads, d_h = lstm_bptt(layers[k], traces[k], d_h)
        for name, g in layer_grads.items():
            grads[f"layers.{k}.{name}"] = g
    return err * err, grads


# ---------------------------------------------------------------------------
# Batched forward over many windows at once (evaluation path).
# ---------------------------------------------------------------------------


def lstm_forward_batch(p: LstmParams, X: np.ndarray) -> np.ndarray:
    """Hidden states for a batch of windows; X is (N, T, D), result (N, T, H)."""
    N, T, D = X.shape
    if D != p.input_size:
        raise DimensionError(
            f"lstm_forward_batch: input size {D} does not match model {p.input_size}"
        )
    H = p.hidden_size
    W4, b4 = _fused_weights(p)
    Wh = W4[:, :H].T.copy()
    Wx = W4[:, H:].T.copy()
    h = np.zeros((N, H))
    c = np.zeros((N, H))
    out = np.empty((N, T, H))
    for t in range(T):
        a = h @ Wh + X[:, t] @ Wx + b4
        sig = sigmoid(a[:, : 3 * H])
        f = sig[:, :H]
        i = sig[:, H : 2 * H]
        o = sig[:, 2 * H :]
        g = np.tanh(a[:, 3 * H :])
        c = f * c + i * g
        h = o * np.tanh(c)
        out[:, t] = h
    return out


def lstm_predict_batch(p: LstmParams, head: OutputHead, windows: np.ndarray) -> np.ndarray:
    """Predictions for a batch of scalar windows, shape (N, T) -> (N,)."""
    hs = lstm_forward_batch(p, windows[:, :, None])
    return hs[:, -1] @ head.w + head.b[0]


def stacked_lstm_predict_batch(
    layers: list[LstmParams], head: OutputHead, windows: np.ndarray
) -> np.ndarray:
    _check_layer_chain(layers)
    seq = windows[:, :, None]
    for layer in layers:
        seq = lstm_forward_batch(layer, seq)
    return seq[:, -1] @ head.w + head.b[0]
