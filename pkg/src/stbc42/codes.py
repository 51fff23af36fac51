"""Linear-dispersion codeword constructions for the 4x2 system.

Both codes map kappa = 8 complex symbols onto a 4x4 codeword (4 transmit
antennas, 4 channel uses, space-time rate 2) by mixing four Alamouti blocks
``X_A..X_D`` built from the symbol pairs (s1,s2), (s3,s4), (s5,s6), (s7,s8)
with a rotation angle rho:

* ``djabba``   pairs (A,C) and (B,D) across the block quadrants;
* ``proposed`` pairs (A,B) and (C,D), which makes the first eight columns of
  the equivalent real channel pairwise orthogonal except for the (j, j+4)
  couplings the conditional decoder exploits.

The code is transmitted without extra power scaling: cos^2 + sin^2 = 1
already makes ||X||_F^2 = 2 * sum_j |s_j|^2 hold exactly, and keeping the
raw grid keeps coding-gain values on the unnormalized scale.
"""

from dataclasses import dataclass

import numpy as np

from .errors import UnknownCode
from .linalg import tilde_vec, vec_stack

N_T = 4      # transmit antennas
T_USES = 4   # channel uses per codeword
KAPPA = 8    # complex symbols per codeword

#: rotation maximizing the coding gain of the proposed code (from the
#: Golden ratio phi = (1+sqrt(5))/2; it gives sin*cos = 1/sqrt(5))
GOLDEN_RHO = float(np.arctan((1.0 + np.sqrt(5.0)) / 2.0))

#: best known rotation for the DjABBA baseline
DJABBA_RHO = float(np.arccos(0.8881))

CODE_NAMES = ("proposed", "djabba")


def alamouti_block(s_a: complex, s_b: complex) -> np.ndarray:
    """2x2 Alamouti block ``[[s_a, s_b], [-s_b*, s_a*]]``.

    Its Gram matrix is ``(|s_a|^2 + |s_b|^2) * I_2`` exactly.
    """
    return np.array([[s_a, s_b], [-np.conj(s_b), np.conj(s_a)]],
                    dtype=np.complex128)


def _blocks(s: np.ndarray) -> tuple[np.ndarray, ...]:
    s = np.asarray(s, dtype=np.complex128).ravel()
    if s.size != KAPPA:
        raise ValueError(f"expected {KAPPA} symbols, got {s.size}")
    return tuple(alamouti_block(s[2 * i], s[2 * i + 1]) for i in range(4))


def proposed_codeword(s: np.ndarray, rho: float = GOLDEN_RHO) -> np.ndarray:
    """4x4 codeword pairing the Alamouti blocks as (A,B) and (C,D)."""
    xa, xb, xc, xd = _blocks(s)
    c, sn = np.cos(rho), np.sin(rho)
    return np.block([
        [c * xa + sn * xb, c * xc + sn * xd],
        [1j * (sn * xc - c * xd), sn * xa - c * xb],
    ])


def djabba_codeword(s: np.ndarray, rho: float = DJABBA_RHO) -> np.ndarray:
    """4x4 DjABBA codeword pairing the Alamouti blocks as (A,C) and (B,D)."""
    xa, xb, xc, xd = _blocks(s)
    c, sn = np.cos(rho), np.sin(rho)
    return np.block([
        [c * xa + sn * xc, c * xb + sn * xd],
        [1j * (sn * xb - c * xd), sn * xa - c * xc],
    ])


_BUILDERS = {"proposed": proposed_codeword, "djabba": djabba_codeword}
_DEFAULT_RHO = {"proposed": GOLDEN_RHO, "djabba": DJABBA_RHO}


def weight_matrices(code: str, rho: float) -> np.ndarray:
    """The 2*kappa complex weight matrices of a code, shape (16, 4, 4).

    Derived by probing the codeword builder with unit symbol vectors (one
    source of truth for the entry layout): entry ``2j`` is the contribution
    of ``Re(s_{j+1})`` and entry ``2j+1`` that of ``Im(s_{j+1})``, matching
    the interleaved order of ``tilde_vec``.
    """
    if code not in _BUILDERS:
        raise UnknownCode(f"unknown code {code!r}, expected one of {CODE_NAMES}")
    build = _BUILDERS[code]
    weights = np.empty((2 * KAPPA, N_T, T_USES), dtype=np.complex128)
    for j in range(KAPPA):
        e = np.zeros(KAPPA, dtype=np.complex128)
        e[j] = 1.0
        weights[2 * j] = build(e, rho)
        e[j] = 1j
        weights[2 * j + 1] = build(e, rho)
    return weights


def generator_matrix(code: str, rho: float) -> np.ndarray:
    """Real generator matrix, shape (2*N_T*T, 2*kappa) = (32, 16).

    Column ``j`` is ``tilde_vec(vec_stack(A_j))``, so
    ``tilde_vec(vec_stack(X)) = G @ tilde_vec(s)`` for every symbol vector.
    """
    weights = weight_matrices(code, rho)
    g = np.empty((2 * N_T * T_USES, 2 * KAPPA))
    for j, a in enumerate(weights):
        g[:, j] = tilde_vec(vec_stack(a))
    return g


@dataclass(frozen=True)
class CodeDescriptor:
    """Static description of one space-time block code at a fixed rotation."""

    name: str
    n_t: int
    t: int
    kappa: int
    rho: float
    weights: np.ndarray    # (2*kappa, n_t, t) complex
    generator: np.ndarray  # (2*n_t*t, 2*kappa) real

    def codeword(self, s: np.ndarray) -> np.ndarray:
        """Codeword matrix for a symbol vector (direct builder)."""
        return _BUILDERS[self.name](s, self.rho)


def get_code(name: str, rho: float | None = None) -> CodeDescriptor:
    """Code descriptor by name with its default (or an explicit) rotation."""
    if name not in _BUILDERS:
        raise UnknownCode(f"unknown code {name!r}, expected one of {CODE_NAMES}")
    rho = _DEFAULT_RHO[name] if rho is None else float(rho)
    return CodeDescriptor(
        name=name, n_t=N_T, t=T_USES, kappa=KAPPA, rho=rho,
        weights=weight_matrices(name, rho),
        generator=generator_matrix(name, rho),
    )
