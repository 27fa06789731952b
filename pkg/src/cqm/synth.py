"""Synthetic sessions and planted-weight labeled datasets.

Sessions are random walks over discrete quality levels: at every segment the
level stays put with probability `stickiness`, jumps to a uniformly drawn
level with probability `jump` (0 by default), and otherwise moves to a
neighbouring level (up or down with equal odds; at the lowest and highest
level the only neighbour takes the whole move probability).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InvalidSpec
from .predictor import DEFAULT_WEIGHTS, CqmWeights, predict_curve
from .trace import DEFAULT_SCALE, LabeledDataset, LabeledSequence, QualityScale, SessionTrace
from .wqm import WindowQualityModel

DEFAULT_LENGTHS = (60, 120, 180, 240, 300, 360)


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int = 0
    n_sessions: int = 12
    length_s: Union[int, Tuple[int, int]] = 360
    levels: int = 9
    level_qualities: Optional[Tuple[float, ...]] = None
    stickiness: float = 0.7
    jump: float = 0.0
    initial_level: Optional[int] = None
    scale: QualityScale = DEFAULT_SCALE

    def __post_init__(self):
        if self.levels < 2:
            raise InvalidSpec("need at least 2 quality levels")
        if self.n_sessions < 1:
            raise InvalidSpec("n_sessions must be >= 1")
        if not 0.0 <= self.stickiness <= 1.0:
            raise InvalidSpec("stickiness must lie in [0, 1]")
        if not 0.0 <= self.jump <= 1.0 - self.stickiness + 1e-12:
            raise InvalidSpec("jump must lie in [0, 1 - stickiness]")
        lo, hi = self.length_range
        if lo < 1 or hi < lo:
            raise InvalidSpec(f"invalid session length {self.length_s!r}")
        lq = self.qualities
        if len(lq) != self.levels:
            raise InvalidSpec(f"expected {self.levels} level qualities, got {len(lq)}")
        if any(b <= a for a, b in zip(lq, lq[1:])):
            raise InvalidSpec("level qualities must be strictly increasing")
        if not all(self.scale.contains(x) for x in lq):
            raise InvalidSpec("level qualities must lie within the scale")
        if self.initial_level is not None and not 0 <= self.initial_level < self.levels:
            raise InvalidSpec("initial_level out of range")

    @property
    def qualities(self) -> Tuple[float, ...]:
        if self.level_qualities is not None:
            return tuple(float(x) for x in self.level_qualities)
        return tuple(np.linspace(self.scale.lo, self.scale.hi, self.levels).tolist())

    @property
    def length_range(self) -> Tuple[int, int]:
        if isinstance(self.length_s, (tuple, list)):
            return int(self.length_s[0]), int(self.length_s[1])
        return int(self.length_s), int(self.length_s)


def transition_matrix(spec: GeneratorSpec) -> np.ndarray:
    L, s, j = spec.levels, spec.stickiness, spec.jump
    move = max(0.0, 1.0 - s - j)
    P = np.full((L, L), j / L)
    for i in range(L):
        P[i, i] += s
        if i == 0:
            P[i, 1] += move
        elif i == L - 1:
            P[i, L - 2] += move
        else:
            P[i, i - 1] += move / 2
            P[i, i + 1] += move / 2
    return P


def session_rng(spec: GeneratorSpec, session: int, stream: int = 0) -> np.random.Generator:
    # per-session streams keep results independent of generation order
    return np.random.default_rng([spec.seed, session, stream])


def generate_levels(spec: GeneratorSpec, session: int = 0) -> np.ndarray:
    rng = session_rng(spec, session)
    lo, hi = spec.length_range
    n = int(rng.integers(lo, hi + 1))
    level = spec.initial_level if spec.initial_level is not None else int(rng.integers(spec.levels))
    u = rng.random(n)
    jumps = rng.integers(spec.levels, size=n)
    out = np.empty(n, dtype=int)
    s, sj = spec.stickiness, spec.stickiness + spec.jump
    half = sj + (1 - sj) / 2
    top = spec.levels - 1
    for t in range(n):
        out[t] = level
        x = u[t]
        if x < s:
            continue
        if x < sj:
            level = int(jumps[t])
        elif level == 0:
            level = 1
        elif level == top:
            level = top - 1
        else:
            level += -1 if x < half else 1
    return out


def generate_trace(spec: GeneratorSpec, session: int = 0) -> SessionTrace:
    """One synthetic session of 1 s segments; deterministic in (seed, session)."""
    lq = spec.qualities
    levels = generate_levels(spec, session)
    return SessionTrace.from_qualities([lq[i] for i in levels], 1.0, spec.scale)


def generate_traces(spec: GeneratorSpec):
    return [generate_trace(spec, i) for i in range(spec.n_sessions)]


def generate_labeled_dataset(spec: GeneratorSpec, weights: CqmWeights = DEFAULT_WEIGHTS,
                             wqm: Optional[WindowQualityModel] = None,
                             noise_sigma: float = 0.0,
                             lengths_s: Sequence[int] = DEFAULT_LENGTHS) -> LabeledDataset:
    """Prefixes of synthetic sessions labeled with the planted model plus noise.

    Each session contributes one item per entry of `lengths_s` that fits in
    it. Labels are ``clip(cqm(prefix) + N(0, noise_sigma))``.
    """
    if noise_sigma < 0:
        raise InvalidSpec("noise_sigma must be >= 0")
    items = []
    for i in range(spec.n_sessions):
        trace = generate_trace(spec, i)
        curve = predict_curve(trace, weights, wqm)
        rng = session_rng(spec, i, 1)
        for length in lengths_s:
            if length > trace.duration_s:
                continue
            mos = curve.at(length)
            if noise_sigma > 0:
                mos += rng.normal(0.0, noise_sigma)
            items.append(LabeledSequence(trace, float(length), spec.scale.clamp(mos),
                                         source=f"session_{i:03d}"))
    if not items:
        raise InvalidSpec("no prefix length fits in the generated sessions")
    return LabeledDataset(items)
