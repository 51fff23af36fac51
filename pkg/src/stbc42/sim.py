"""Monte Carlo BER engine.

Protocol per SNR point: draw bits -> Gray-map to symbols -> build codeword
-> quasi-static Rayleigh draw -> transmit at the N0 given by the SNR
convention -> ML-decode -> count bit errors; repeat until ``min_bit_errors``
have been seen or ``max_frames`` frames are spent (the stop condition is
checked at batch granularity).

Randomness: worker ``w`` of point ``p`` owns the stream ``(seed, (p, w))``
and draws, per batch, bits first, then the channel (real then imaginary
part), then the noise.  Draws never depend on the decoder, so runs that
share a seed see bit-identical frames — the basis of the end-to-end decoder
equivalence check.  Rank-deficient channel draws (a measure-zero event) are
replaced by fresh draws from the same stream and counted separately.

Results are deterministic for a fixed (seed, workers); with ``workers=1``
the emitted CSV is byte-identical across runs except for the wall_seconds
column.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .channel import RngStream, SNR_CONVENTION, noise_variance
from .codes import get_code
from .constellation import Constellation, bits_to_indices, make_qam
from .decoder import DEFAULT_EXHAUSTIVE_BUDGET
from .errors import BudgetExceeded, StructureViolation

_DECODER_IDS = {"exhaustive": 0, "sphere": 1, "fast": 2, "fast_any": 3}

CSV_HEADER = ("code,decoder,constellation,snr_db,frames,bits,bit_errors,"
              "ber,wall_seconds,mean_leaf_visits,seed,snr_convention")


@dataclass
class SimConfig:
    """One Monte Carlo experiment: code, decoder, constellation, SNR grid."""

    code: str
    decoder: str
    m: int
    snr_points_db: list
    max_frames: int = 1_000_000
    min_bit_errors: int = 200
    seed: int = 0
    workers: int = 1
    batch_frames: int = 512

    def validate(self) -> None:
        if self.decoder not in _DECODER_IDS:
            raise ValueError(f"unknown decoder {self.decoder!r}")
        snrs = list(self.snr_points_db)
        if not snrs:
            raise ValueError("snr_points_db must be nonempty")
        if any(b >= a for a, b in zip(snrs[1:], snrs)):
            raise ValueError("snr_points_db must be strictly increasing")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.workers < 1 or self.batch_frames < 1:
            raise ValueError("workers and batch_frames must be >= 1")
        if self.decoder in ("fast", "fast_any") and self.code != "proposed":
            raise StructureViolation(
                f"the {self.decoder} decoder needs the proposed code's "
                f"column structure; {self.code} does not have it")
        if self.decoder == "exhaustive" and self.m ** 8 > DEFAULT_EXHAUSTIVE_BUDGET:
            raise BudgetExceeded(
                f"exhaustive decoding of {self.m}-QAM needs {self.m ** 8:.2e} "
                f"candidates per frame; use the fast decoder")


@dataclass
class BerRecord:
    """One (SNR point, code, decoder) row of a Monte Carlo run."""

    code: str
    decoder: str
    constellation: int
    snr_db: float
    frames: int
    bits: int
    bit_errors: int
    ber: float
    wall_seconds: float
    mean_leaf_visits: float
    seed: int
    discarded_frames: int = 0

    def csv_row(self) -> str:
        return (f"{self.code},{self.decoder},{self.constellation},"
                f"{self.snr_db!r},{self.frames},{self.bits},{self.bit_errors},"
                f"{self.ber!r},{self.wall_seconds!r},{self.mean_leaf_visits!r},"
                f"{self.seed},{SNR_CONVENTION}")


@dataclass
class _Tables:
    """Precomputed per-experiment arrays handed to the batch kernel."""

    generator: np.ndarray
    levels: np.ndarray
    labels: np.ndarray
    bits_per_frame: int
    cons: Constellation = field(repr=False)


def _tables(cfg: SimConfig) -> _Tables:
    code = get_code(cfg.code)
    cons = make_qam(cfg.m, normalized=True)
    return _Tables(
        generator=np.ascontiguousarray(code.generator),
        levels=np.ascontiguousarray(cons.axis.levels),
        labels=np.ascontiguousarray(cons.labels),
        bits_per_frame=8 * cons.bits_per_symbol,
        cons=cons,
    )


def _draw_frames(stream: RngStream, n: int, tab: _Tables, n0: float):
    """One batch of frame randomness in the pinned draw order."""
    g = stream.generator
    bits = g.integers(0, 2, size=(n, tab.bits_per_frame))
    sidx = bits_to_indices(bits.ravel(), tab.cons).reshape(n, 8)
    h_re = g.standard_normal((n, 2, 4)) / np.sqrt(2.0)
    h_im = g.standard_normal((n, 2, 4)) / np.sqrt(2.0)
    wt = g.standard_normal((n, 16)) * np.sqrt(n0 / 2.0)
    hc = np.empty((n, 4, 8))
    hc[:, 0::2, 0::2] = h_re
    hc[:, 0::2, 1::2] = -h_im
    hc[:, 1::2, 0::2] = h_im
    hc[:, 1::2, 1::2] = h_re
    return hc, wt, sidx


def _worker_batch(stream: RngStream, n: int, tab: _Tables, n0: float,
                  decoder_id: int):
    """Run n valid frames, redrawing any rank-deficient channel draws."""
    hc, wt, sidx = _draw_frames(stream, n, tab, n0)
    errors = 0
    leaves = 0
    discarded = 0
    while True:
        biterr, lv, ok = kernels.ber_batch(
            hc, wt, sidx, tab.generator, tab.levels, tab.labels, decoder_id)
        errors += int(biterr[ok].sum())
        leaves += int(lv[ok].sum())
        bad = int((~ok).sum())
        if bad == 0:
            break
        discarded += bad
        hc, wt, sidx = _draw_frames(stream, bad, tab, n0)
    return errors, leaves, discarded


def run_point(cfg: SimConfig, snr_db: float, point_index: int = 0) -> BerRecord:
    """Monte Carlo BER at one SNR point.

    Deterministic for fixed (seed, workers); ``point_index`` keys this
    point's random streams inside a sweep.
    """
    cfg.validate()
    tab = _tables(cfg)
    n0 = noise_variance(snr_db)
    decoder_id = _DECODER_IDS[cfg.decoder]
    streams = [RngStream(cfg.seed, (point_index, w)) for w in range(cfg.workers)]

    start = time.perf_counter()
    frames = 0
    errors = 0
    leaves = 0
    discarded = 0
    pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        while frames < cfg.max_frames and errors < cfg.min_bit_errors:
            remaining = cfg.max_frames - frames
            want = min(remaining, cfg.batch_frames * cfg.workers)
            shares = [want // cfg.workers + (1 if w < want % cfg.workers else 0)
                      for w in range(cfg.workers)]
            jobs = [(streams[w], shares[w]) for w in range(cfg.workers) if shares[w]]
            if pool is None:
                results = [_worker_batch(s, n, tab, n0, decoder_id)
                           for s, n in jobs]
            else:
                results = list(pool.map(
                    lambda sn: _worker_batch(sn[0], sn[1], tab, n0, decoder_id),
                    jobs))
            for e, l, d in results:
                errors += e
                leaves += l
                discarded += d
            frames += want
    finally:
        if pool is not None:
            pool.shutdown()

    bits = frames * tab.bits_per_frame
    return BerRecord(
        code=cfg.code, decoder=cfg.decoder, constellation=cfg.m,
        snr_db=float(snr_db), frames=frames, bits=bits, bit_errors=errors,
        ber=errors / bits if bits else 0.0,
        wall_seconds=time.perf_counter() - start,
        mean_leaf_visits=leaves / frames if frames else 0.0,
        seed=cfg.seed, discarded_frames=discarded,
    )


def run_sweep(cfg: SimConfig, csv_path=None) -> list:
    """One BerRecord per SNR point, optionally persisted as CSV."""
    cfg.validate()
    records = [run_point(cfg, snr, point_index=i)
               for i, snr in enumerate(cfg.snr_points_db)]
    if csv_path is not None:
        write_ber_csv(records, csv_path)
    return records


def write_ber_csv(records: list, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(rec.csv_row() + "\n")


def config_for_decoder(cfg: SimConfig, decoder: str) -> SimConfig:
    """Same experiment with a different decoder (shared randomness)."""
    return replace(cfg, decoder=decoder)
