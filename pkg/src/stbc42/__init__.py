"""Fast-decodable full-rate 4x2 space-time block code laboratory.

Codeword construction (proposed + DjABBA baseline), real-valued equivalent
channel, QR-based ML / sphere / conditional fast decoding, exhaustive
coding-gain analysis and Monte Carlo BER simulation.

Hot kernels run numba-compiled; set ``STBC42_BACKEND=numpy`` to force the
pure-numpy fallback.
"""

from .channel import (ChannelRealization, RngStream, SNR_CONVENTION,
                      draw_channel, equivalent_channel, noise_variance,
                      transmit)
from .codes import (CODE_NAMES, CodeDescriptor, DJABBA_RHO, GOLDEN_RHO,
                    alamouti_block, djabba_codeword, generator_matrix,
                    get_code, proposed_codeword, weight_matrices)
from .constellation import (Constellation, PamAxis, bits_to_symbols,
                            hard_decision, make_qam, symbols_to_bits)
from .decoder import (DecodeResult, DecoderWorkspace, ml_exhaustive, ml_fast,
                      ml_fast_anyconstellation, ml_sphere, prepare)
from .errors import (BudgetExceeded, LengthMismatch, RankDeficient,
                     Stbc42Error, StructureViolation, UnknownCode,
                     UnsupportedOrder)
from .kernels import ACTIVE_BACKEND
from .linalg import (QrFactorization, det_complex, kron, qr_decompose,
                     realify, realify_matrix, tilde_vec, vec_stack)

__version__ = "0.1.0"

__all__ = [
    "ACTIVE_BACKEND", "BudgetExceeded", "CODE_NAMES", "ChannelRealization",
    "CodeDescriptor", "Constellation", "DJABBA_RHO", "DecodeResult",
    "DecoderWorkspace", "GOLDEN_RHO", "LengthMismatch", "PamAxis",
    "QrFactorization", "RankDeficient", "RngStream", "SNR_CONVENTION",
    "Stbc42Error", "StructureViolation", "UnknownCode", "UnsupportedOrder",
    "alamouti_block", "bits_to_symbols", "det_complex", "djabba_codeword",
    "draw_channel", "equivalent_channel", "generator_matrix", "get_code",
    "hard_decision", "kron", "make_qam", "ml_exhaustive", "ml_fast",
    "ml_fast_anyconstellation", "ml_sphere", "noise_variance", "prepare",
    "proposed_codeword", "qr_decompose", "realify", "realify_matrix",
    "symbols_to_bits", "tilde_vec", "transmit", "vec_stack",
    "weight_matrices",
]
