"""Square M-QAM alphabets with per-axis PAM decomposition and Gray labels.

A square M-QAM constellation factors into two independent sqrt(M)-PAM axes.
Points live on the odd-integer grid ``{+-1, +-3, ...} * scale``; the
unnormalized variant (``scale = 1``) is the grid the coding-gain analysis
works on, the normalized variant (average symbol energy 1) is what the BER
simulation transmits.

Gray labelling convention (pinned for reproducibility; any fixed Gray map
gives the same BER statistics):

* each axis carries a binary-reflected Gray code assigned to the levels in
  ascending order, so for 4 levels: -3 -> 00, -1 -> 01, +1 -> 11, +3 -> 10;
* the most-significant half of a symbol's bits labels the real axis, the
  least-significant half the imaginary axis;
* point index ``i`` encodes the level pair as
  ``i = re_level_index * sqrt(M) + im_level_index`` with levels ascending.
"""

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, UnsupportedOrder

SUPPORTED_ORDERS = (4, 16, 64)


def _gray_sequence(nbits: int) -> np.ndarray:
    """Binary-reflected Gray code as integers, in counting order."""
    n = 1 << nbits
    return np.arange(n) ^ (np.arange(n) >> 1)


@dataclass(frozen=True)
class PamAxis:
    """One real axis of a square QAM constellation.

    ``levels`` are strictly increasing, ``labels[i]`` is the Gray label of
    ``levels[i]`` and ``inverse[label]`` recovers the level index.
    """

    levels: np.ndarray
    labels: np.ndarray
    inverse: np.ndarray
    scale: float

    @property
    def bits(self) -> int:
        return int(np.log2(len(self.levels)))


@dataclass(frozen=True)
class Constellation:
    """Square M-QAM alphabet with Gray bit labels.

    ``points[i]`` is the complex symbol with index ``i`` and ``labels[i]``
    its integer Gray label (``bits_per_symbol`` wide, real-axis bits in the
    most-significant half).
    """

    m: int
    points: np.ndarray
    labels: np.ndarray
    scale: float
    axis: PamAxis

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.m))

    @property
    def levels_per_axis(self) -> int:
        return int(round(np.sqrt(self.m)))

    def label_bits(self, index: int) -> str:
        """Bit-string Gray label of a point, MSB first."""
        return format(int(self.labels[index]), f"0{self.bits_per_symbol}b")


def make_qam(m: int, normalized: bool = False) -> Constellation:
    """Build a square M-QAM constellation.

    Parameters
    ----------
    m : int
        Constellation order, one of 4, 16, 64.
    normalized : bool
        If True, scale the odd-integer grid so the average symbol energy is
        exactly 1 (QPSK: 1/sqrt(2), 16-QAM: 1/sqrt(10), 64-QAM: 1/sqrt(42));
        if False leave the grid unnormalized (scale 1).
    """
    if m not in SUPPORTED_ORDERS:
        raise UnsupportedOrder(f"order {m} not in {SUPPORTED_ORDERS}")
    side = int(round(np.sqrt(m)))
    raw = np.arange(-(side - 1), side, 2, dtype=np.float64)
    # Average energy of the raw grid is 2*(m-1)/3.
    scale = 1.0 / np.sqrt(2.0 * (m - 1) / 3.0) if normalized else 1.0
    levels = raw * scale
    axis_labels = _gray_sequence(int(np.log2(side)))
    inverse = np.empty(side, dtype=np.int64)
    inverse[axis_labels] = np.arange(side)
    axis = PamAxis(levels=levels, labels=axis_labels.astype(np.int64),
                   inverse=inverse, scale=scale)

    re_idx, im_idx = np.divmod(np.arange(m), side)
    points = levels[re_idx] + 1j * levels[im_idx]
    labels = (axis_labels[re_idx] << axis.bits) | axis_labels[im_idx]
    return Constellation(m=m, points=points, labels=labels.astype(np.int64),
                         scale=scale, axis=axis)


def hard_decision(x: float, axis: PamAxis) -> float:
    """Nearest PAM level to ``x``; exact midpoints resolve to the lower level.

    The tie rule is a measure-zero event under continuous noise and exists
    only so results are bit-reproducible.
    """
    return float(axis.levels[hard_decision_index(x, axis)])


def hard_decision_index(x: float, axis: PamAxis) -> int:
    """Index of the nearest PAM level (tie toward the lower level)."""
    step = 2.0 * axis.scale
    k = int(np.ceil((x - axis.levels[0]) / step - 0.5))
    return min(max(k, 0), len(axis.levels) - 1)


def bits_to_indices(bits: np.ndarray, cons: Constellation) -> np.ndarray:
    """Map a bit sequence to constellation point indices (Gray demap)."""
    bits = np.asarray(bits, dtype=np.int64).ravel()
    bps = cons.bits_per_symbol
    if bits.size % bps:
        raise LengthMismatch(
            f"bit count {bits.size} not divisible by {bps} bits/symbol")
    groups = bits.reshape(-1, bps)
    weights = 1 << np.arange(bps - 1, -1, -1, dtype=np.int64)
    labels = groups @ weights
    half = bps // 2
    re_lab, im_lab = labels >> half, labels & ((1 << half) - 1)
    return cons.axis.inverse[re_lab] * cons.levels_per_axis + cons.axis.inverse[im_lab]


def indices_to_bits(indices: np.ndarray, cons: Constellation) -> np.ndarray:
    """Gray labels of the given point indices, flattened MSB-first."""
    labels = cons.labels[np.asarray(indices, dtype=np.int64).ravel()]
    bps = cons.bits_per_symbol
    shifts = np.arange(bps - 1, -1, -1, dtype=np.int64)
    return ((labels[:, None] >> shifts) & 1).astype(np.int64).ravel()


def bits_to_symbols(bits: np.ndarray, cons: Constellation) -> np.ndarray:
    """Gray-map a bit sequence onto complex constellation symbols."""
    return cons.points[bits_to_indices(bits, cons)]


def symbols_to_bits(symbols: np.ndarray, cons: Constellation) -> np.ndarray:
    """Slice symbols to the nearest point per axis and emit their Gray bits."""
    symbols = np.asarray(symbols, dtype=np.complex128).ravel()
    side = cons.levels_per_axis
    idx = np.empty(symbols.size, dtype=np.int64)
    for i, s in enumerate(symbols):
        re_i = hard_decision_index(s.real, cons.axis)
        im_i = hard_decision_index(s.imag, cons.axis)
        idx[i] = re_i * side + im_i
    return indices_to_bits(idx, cons)
