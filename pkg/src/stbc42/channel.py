"""Quasi-static i.i.d. Rayleigh MIMO channel, AWGN and the equivalent
real-valued channel.

SNR convention (the CSV files carry it verbatim): ``snr_db`` is
``10*log10(Es_rx / N0)`` where ``Es_rx`` is the average received signal
energy per receive antenna per channel use.  With a unit-energy
constellation and unit-variance fading each codeword entry has unit average
energy, so ``Es_rx = N_t`` analytically and ``N0 = N_t * 10^(-snr_db/10)``.
All codes are compared under the identical convention, which makes the
relative curve ordering convention-invariant.
"""

from dataclasses import dataclass, field

import numpy as np

from .codes import CodeDescriptor
from .linalg import realify_matrix

SNR_CONVENTION = "snr_db=10log10(Es_rx/N0);Es_rx=Nt;unit-energy-constellation"


@dataclass
class RngStream:
    """Reproducible random stream: same (seed, stream) -> same sequence.

    ``stream`` may be a single id or a tuple of ids; workers use their
    worker index (and the sweep its point index) so draws never overlap.
    """

    seed: int
    stream: tuple[int, ...] = ()
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if isinstance(self.stream, int):
            object.__setattr__(self, "stream", (self.stream,))
        ss = np.random.SeedSequence(self.seed, spawn_key=tuple(self.stream))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def substream(self, *ids: int) -> "RngStream":
        """Independent child stream addressed by additional ids."""
        return RngStream(self.seed, tuple(self.stream) + tuple(ids))


@dataclass
class ChannelRealization:
    """One quasi-static channel draw plus the noise variance per complex
    entry (``E|w|^2 = n0``)."""

    h: np.ndarray
    n0: float = 0.0


def noise_variance(snr_db: float, n_t: int = 4) -> float:
    """N0 for the documented SNR convention (Es_rx = N_t)."""
    return n_t * 10.0 ** (-snr_db / 10.0)


def draw_channel(rng: RngStream, n_r: int, n_t: int,
                 n0: float = 0.0) -> ChannelRealization:
    """One i.i.d. Rayleigh flat-fading draw, entries CN(0, 1).

    The draw is quasi-static: it is meant to stay constant over exactly one
    codeword (T channel uses) and be independent across codewords.
    """
    g = rng.generator
    h = (g.standard_normal((n_r, n_t)) + 1j * g.standard_normal((n_r, n_t)))
    return ChannelRealization(h=h / np.sqrt(2.0), n0=float(n0))


def transmit(x: np.ndarray, ch: ChannelRealization, rng: RngStream) -> np.ndarray:
    """Received signal ``Y = H X + W`` with W entries i.i.d. CN(0, n0)."""
    x = np.asarray(x, dtype=np.complex128)
    y = ch.h @ x
    if ch.n0 > 0.0:
        g = rng.generator
        w = (g.standard_normal(y.shape) + 1j * g.standard_normal(y.shape))
        y = y + w * np.sqrt(ch.n0 / 2.0)
    return y


def equivalent_channel(ch: ChannelRealization, code: CodeDescriptor) -> np.ndarray:
    """Equivalent real channel ``H_eq = (I_T (x) realify(H)) G``.

    For any symbol vector and noiseless transmission,
    ``tilde_vec(vec_stack(H X)) == H_eq @ tilde_vec(s)`` holds exactly.
    Shape: (2*N_r*T, 2*kappa); 16x16 for the 4x2 system.
    """
    hc = realify_matrix(ch.h)                      # (2Nr, 2Nt)
    g = code.generator                             # (2NtT, 2kappa)
    two_nt = 2 * code.n_t
    out = np.empty((hc.shape[0] * code.t, g.shape[1]))
    for t in range(code.t):
        out[hc.shape[0] * t: hc.shape[0] * (t + 1), :] = (
            hc @ g[two_nt * t: two_nt * (t + 1), :])
    return out
