"""Series generation, CSV ingestion, scaling, and window construction.

Synthetic generators stand in for telemetry-like signals: each kind mixes a
smooth component with abrupt changes (level shifts, slope breaks, or resets)
plus optional Gaussian noise, and records what it did in the series metadata.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError, ParseError

SYNTHETIC_KINDS = ("jump-sine", "piecewise-ramp", "noisy-sawtooth")


@dataclass
class TimeSeries:
    """Uniformly sampled scalar observations."""

    values: np.ndarray
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.size < 1:
            raise DomainError(f"TimeSeries needs a nonempty 1-d value array, got shape {self.values.shape}")
        if not np.isfinite(self.values).all():
            raise DomainError(f"TimeSeries {self.name!r} contains non-finite values")

    def __len__(self) -> int:
        return self.values.size


@dataclass
class WindowSample:
    """One supervised example: lead-in pair, input window, next-value target."""

    lead_in: np.ndarray  # the 2 observations preceding the window
    input: np.ndarray    # window_len observations
    target: float
    index: int           # position of the target in the source series


@dataclass
class ScalerParams:
    """Min-max range fitted on the training portion of a series."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)) or self.hi <= self.lo:
            raise DomainError(f"ScalerParams: degenerate range [{self.lo}, {self.hi}]")


def as_values(series) -> np.ndarray:
    """Accept a TimeSeries or any array-like of scalars."""
    if isinstance(series, TimeSeries):
        return series.values
    return np.asarray(series, dtype=np.float64)


# ---------------------------------------------------------------------------
# Synthetic generators. Event positions use evenly spaced anchors with seeded
# jitter so every portion of the series (including a chronological test
# split) contains events.
# ---------------------------------------------------------------------------


def _event_positions(length: int, count: int, rng: np.random.Generator) -> list[int]:
    spacing = length / (count + 1)
    positions = []
    for j in range(count):
        anchor = (j + 1) * spacing
        idx = int(round(anchor + rng.uniform(-0.2, 0.2) * spacing))
        positions.append(min(max(idx, 1), length - 1))
    return positions


def _gen_jump_sine(
    length: int,
    seed: int,
    num_jumps: int = 6,
    jump_scale: float = 1.0,
    noise_sigma: float = 0.0,
    period: float = 100.0,
    amplitude: float = 1.0,
    base: float = 10.0,
) -> TimeSeries:
    rng = np.random.default_rng(seed)
    t = np.arange(length)
    wave = amplitude * np.sin(2.0 * np.pi * t / period)
    level = np.zeros(length)
    jumps = []
    for idx in _event_positions(length, num_jumps, rng):
        mag = float(rng.uniform(0.5, 1.5) * jump_scale * rng.choice([-1.0, 1.0]))
        level[idx:] += mag
        jumps.append({"index": idx, "magnitude": mag})
    noise = rng.normal(0.0, noise_sigma, length) if noise_sigma > 0 else np.zeros(length)
    meta = {
        "kind": "jump-sine",
        "length": length,
        "seed": seed,
        "num_jumps": num_jumps,
        "jump_scale": jump_scale,
        "noise_sigma": noise_sigma,
        "period": period,
        "amplitude": amplitude,
        "base": base,
        "jumps": jumps,
    }
    return TimeSeries(base + wave + level + noise, f"jump-sine-{seed}", meta)


def _gen_piecewise_ramp(
    length: int,
    seed: int,
    num_segments: int = 5,
    slope_scale: float = 0.02,
    noise_sigma: float = 0.0,
    base: float = 10.0,
) -> TimeSeries:
    if num_segments < 1:
        raise ConfigError(f"piecewise-ramp needs at least 1 segment, got {num_segments}")
    rng = np.random.default_rng(seed)
    breaks = _event_positions(length, num_segments - 1, rng)
    slopes = rng.uniform(-slope_scale, slope_scale, num_segments)
    inc = np.empty(max(length - 1, 0))
    bounds = [0] + sorted(breaks) + [length]
    for k in range(num_segments):
        inc[bounds[k] : min(bounds[k + 1], length - 1)] = slopes[k]
    values = base + np.concatenate([[0.0], np.cumsum(inc)])
    noise = rng.normal(0.0, noise_sigma, length) if noise_sigma > 0 else 0.0
    meta = {
        "kind": "piecewise-ramp",
        "length": length,
        "seed": seed,
        "num_segments": num_segments,
        "slope_scale": slope_scale,
        "noise_sigma": noise_sigma,
        "base": base,
        "breakpoints": sorted(breaks),
        "slopes": slopes.tolist(),
    }
    return TimeSeries(values + noise, f"piecewise-ramp-{seed}", meta)


def _gen_noisy_sawtooth(
    length: int,
    seed: int,
    period: float = 80.0,
    amplitude: float = 2.0,
    noise_sigma: float = 0.1,
    base: float = 10.0,
) -> TimeSeries:
    rng = np.random.default_rng(seed)
    t = np.arange(length)
    ramp = amplitude * ((t % period) / period)
    noise = rng.normal(0.0, noise_sigma, length) if noise_sigma > 0 else np.zeros(length)
    meta = {
        "kind": "noisy-sawtooth",
        "length": length,
        "seed": seed,
        "period": period,
        "amplitude": amplitude,
        "noise_sigma": noise_sigma,
        "base": base,
    }
    return TimeSeries(base + ramp + noise, f"noisy-sawtooth-{seed}", meta)


_GENERATORS = {
    "jump-sine": _gen_jump_sine,
    "piecewise-ramp": _gen_piecewise_ramp,
    "noisy-sawtooth": _gen_noisy_sawtooth,
}


def generate_synthetic(kind: str, length: int, seed: int, **knobs) -> TimeSeries:
    """Deterministic synthetic series of the given kind."""
    if kind not in _GENERATORS:
        raise ConfigError(
            f"unknown synthetic kind {kind!r}; choose one of {', '.join(SYNTHETIC_KINDS)}"
        )
    if length < 1:
        raise ConfigError(f"series length must be >= 1, got {length}")
    try:
        return _GENERATORS[kind](length, seed, **knobs)
    except TypeError as exc:
        raise ConfigError(f"bad knobs for {kind}: {exc}") from None


# ---------------------------------------------------------------------------
# CSV ingestion: one observation per row, optional header; multi-column
# files must name a "value" column in the header.
# ---------------------------------------------------------------------------


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def load_csv(path) -> TimeSeries:
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh), start=1) if row]
    if not rows:
        raise DomainError(f"{path}: empty file")
    first = rows[0][1]
    has_header = not all(_is_number(cell) for cell in first)
    col = 0
    if has_header:
        names = [c.strip().lower() for c in first]
        if "value" in names:
            col = names.index("value")
        elif len(names) > 1:
            raise ParseError(f"{path}: multi-column file has no 'value' column in header")
        rows = rows[1:]
    elif len(first) > 1:
        raise ParseError(f"{path}: multi-column file needs a header naming a 'value' column")
    if not rows:
        raise DomainError(f"{path}: no data rows")
    values = np.empty(len(rows))
    for k, (lineno, row) in enumerate(rows):
        cell = row[col] if col < len(row) else ""
        try:
            values[k] = float(cell)
        except ValueError:
            raise ParseError(f"{path}: line {lineno}: cannot parse {cell!r} as a number") from None
    return TimeSeries(values, path.stem)


# ---------------------------------------------------------------------------
# Scaling and windowing.
# ---------------------------------------------------------------------------


def fit_scaler(train) -> ScalerParams:
    """Min-max parameters from the training values only."""
    v = as_values(train)
    lo, hi = float(v.min()), float(v.max())
    if hi <= lo:
        raise DomainError("fit_scaler: training values are constant (degenerate range)")
    return ScalerParams(lo, hi)


def apply_scaler(sp: ScalerParams, values):
    return (np.asarray(values, dtype=np.float64) - sp.lo) / (sp.hi - sp.lo)


def invert_scaler(sp: ScalerParams, values):
    return np.asarray(values, dtype=np.float64) * (sp.hi - sp.lo) + sp.lo


def min_series_length(window_len: int) -> int:
    """2 lead-in points + the window + 1 target."""
    return window_len + 3


def make_windows(series, window_len: int) -> list[WindowSample]:
    """Every stride-1 sample with a full lead-in, window, and target."""
    if window_len < 1:
        raise ConfigError(f"window_len must be >= 1, got {window_len}")
    v = as_values(series)
    need = min_series_length(window_len)
    if v.size < need:
        raise DomainError(
            f"series of length {v.size} is too short for window_len {window_len}; "
            f"need at least {need}"
        )
    samples = []
    for start in range(2, v.size - window_len):
        target_idx = start + window_len
        samples.append(
            WindowSample(
                lead_in=v[start - 2 : start].copy(),
                input=v[start : start + window_len].copy(),
                target=float(v[target_idx]),
                index=target_idx,
            )
        )
    return samples


def train_test_split(samples: list, fraction: float) -> tuple[list, list]:
    """Chronological split: first floor(fraction * N) samples train."""
    if not 0.0 < fraction < 1.0:
        raise ConfigError(f"split fraction must be in (0, 1), got {fraction}")
    n_train = int(np.floor(fraction * len(samples)))
    return samples[:n_train], samples[n_train:]
