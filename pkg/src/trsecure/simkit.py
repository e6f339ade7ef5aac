"""Monte Carlo BER / SINR / secrecy-rate sweeps.

Realization ``r`` owns ``RngStream(master_seed, r)``; its code, channels,
bits, AN and noise come from fixed substreams, so every sweep cell at the
same realization reuses the same draws (common random numbers) and results
do not depend on how realizations are spread over worker processes.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .model import (
    SUB_AN,
    SUB_BITS,
    SUB_CHANNEL_BOB,
    SUB_CHANNEL_EVE,
    SUB_COIN,
    SUB_NOISE_BOB,
    SUB_NOISE_EVE,
    ChannelRealization,
    RngStream,
    SpreadingCode,
    SymbolBlock,
    SystemParams,
    ebn0_to_noise_variance,
    gen_rayleigh_channel,
    gen_spreading_code,
    qam4_demodulate,
    qam4_modulate,
)
from .waveform import (
    EVE_ZF_FLOOR,
    assemble_tx,
    despread,
    eve_coupling,
    focusing_gain,
    precode,
    receive_bob,
    receive_eve,
    spread,
    synth_an,
    unit_noise,
)

log = logging.getLogger(__name__)

DEFAULT_BORS = (2, 4, 8)


@dataclass(frozen=True)
class SimConfig:
    params: SystemParams = field(default_factory=SystemParams)
    n_channel_realizations: int = 100
    n_blocks_per_realization: int = 300
    master_seed: int = 0
    ebn0_db: float = 20.0
    alphas: tuple[float, ...] = tuple(k / 20 for k in range(21))
    ebn0_grid: tuple[float, ...] = tuple(float(x) for x in range(0, 21, 2))
    bors: tuple[int, ...] = DEFAULT_BORS
    # None -> 1/U for every BOR in a multi-BOR sweep
    sigma2_an: float | None = None
    ber_ebn0_db: float = 15.0
    snr_alphas: tuple[float, ...] = (1.0, 0.95, 0.8, 0.5, 0.2, 0.01)
    alpha_opt_step: float = 0.02

    def __post_init__(self):
        if self.n_channel_realizations < 1 or self.n_blocks_per_realization < 1:
            raise ValueError("realization and block counts must be positive")
        if any(not 0.0 <= a <= 1.0 for a in (*self.alphas, *self.snr_alphas)):
            raise ValueError("alpha grid must lie in [0, 1]")
        if any(not math.isfinite(e) for e in (self.ebn0_db, self.ber_ebn0_db, *self.ebn0_grid)):
            raise ValueError("Eb/N0 values must be finite")
        if not 0.0 < self.alpha_opt_step <= 1.0:
            raise ValueError("alpha_opt_step must lie in (0, 1]")

    def alpha_opt_grid(self) -> list[float]:
        n = int(round(1.0 / self.alpha_opt_step))
        return [round(k / n, 12) for k in range(n + 1)]

    def params_for(self, bor: int, alpha: float | None = None, ebn0_db: float | None = None) -> SystemParams:
        p = self.params
        sigma2 = ebn0_to_noise_variance(self.ebn0_db if ebn0_db is None else ebn0_db)
        return SystemParams.from_bor(
            p.q_subcarriers, bor,
            alpha=p.alpha if alpha is None else alpha,
            sigma2_vb=sigma2, sigma2_ve=sigma2,
            sigma2_an=self.sigma2_an, bessel_terms=p.bessel_terms,
        )


@dataclass(frozen=True)
class PerRealizationStats:
    k_n: np.ndarray
    z_n: np.ndarray
    an_interference_power: np.ndarray  # |A1,n|^2 per block, (B, N)
    useful_power: np.ndarray  # |A2,n|^2, (N,)
    eve_singular: np.ndarray  # |Z_n|/U below the ZF floor, (N,)


@dataclass(frozen=True)
class LinkOutcome:
    bob_bits: np.ndarray
    eve_bits: np.ndarray
    stats: PerRealizationStats
    bob_coin_symbols: int
    eve_coin_symbols: int


@dataclass
class SweepResult:
    bor: int
    alpha: float
    ebn0_db: float
    bits: int = 0
    bob_errors: int = 0
    eve_errors: int = 0
    eve_skipped: int = 0
    bob_ber: float = math.nan
    eve_ber: float = math.nan
    bob_ber_ci: float = math.nan
    eve_ber_ci: float = math.nan
    sinr_bob_emp: float = math.nan
    sinr_eve_emp: float = math.nan
    sinr_eve_emp_ci: float = math.nan
    sr_emp: float = math.nan
    sr_emp_clamped: float = math.nan
    sr_emp_ci: float = math.nan
    sr_bound: float = math.nan
    sinr_bob_bound: float = math.nan
    sinr_eve_bound: float = math.nan


@dataclass
class _Draws:
    code: SpreadingCode
    h_b: ChannelRealization
    h_e: ChannelRealization
    block: SymbolBlock
    w: np.ndarray
    stream: RngStream
    # same draws apply_channel_awgn would take from the noise substreams
    noise_b: np.ndarray = None
    noise_e: np.ndarray = None

    def __post_init__(self):
        shape = (*np.shape(self.block.symbols)[:-1], self.code.signs.size)
        self.noise_b = unit_noise(shape, self.stream.generator(SUB_NOISE_BOB))
        self.noise_e = unit_noise(shape, self.stream.generator(SUB_NOISE_EVE))


def draw_realization(params: SystemParams, stream: RngStream, n_blocks: int) -> _Draws:
    code = gen_spreading_code(params, stream)
    h_b = gen_rayleigh_channel(params.q_subcarriers, stream, substream=SUB_CHANNEL_BOB)
    h_e = gen_rayleigh_channel(params.q_subcarriers, stream, substream=SUB_CHANNEL_EVE)
    bits = stream.generator(SUB_BITS).integers(0, 2, size=(n_blocks, 2 * params.n_symbols))
    block = qam4_modulate(bits)
    w = synth_an(code, h_b, params, stream.generator(SUB_AN), size=n_blocks).w
    return _Draws(code, h_b, h_e, block, w, stream)


def _decide(rx_eq: np.ndarray, singular: np.ndarray, coins: np.ndarray) -> tuple[np.ndarray, int]:
    bits = qam4_demodulate(np.where(singular, 0.0, rx_eq))
    if not np.any(singular):
        return bits, 0
    mask = np.repeat(singular, 2, axis=-1)
    return np.where(mask, coins, bits), int(singular.sum())


def _run_link(params: SystemParams, d: _Draws, w: np.ndarray) -> LinkOutcome:
    alpha = params.alpha
    x_tr = assemble_tx(alpha, precode(d.h_b, spread(d.code, d.block.symbols)), w)
    rx_b = d.h_b.gains * x_tr.samples + np.sqrt(params.sigma2_vb / 2.0) * d.noise_b
    rx_e = d.h_e.gains * x_tr.samples + np.sqrt(params.sigma2_ve / 2.0) * d.noise_e
    ob = receive_bob(d.code, d.h_b, rx_b, alpha, on_singular="mask")
    oe = receive_eve(d.code, d.h_b, d.h_e, rx_e, alpha, on_singular="mask")

    coins = d.stream.generator(SUB_COIN).integers(0, 2, size=(2,) + d.block.bits.shape, dtype=np.int8)
    bob_bits, bob_coin = _decide(ob.equalized, ob.singular, coins[0])
    eve_bits, eve_coin = _decide(oe.equalized, oe.singular, coins[1])

    z = eve_coupling(d.code, d.h_b, d.h_e)
    stats = PerRealizationStats(
        k_n=focusing_gain(d.code, d.h_b),
        z_n=z,
        an_interference_power=(1.0 - alpha) * np.abs(despread(d.code, d.h_e.gains * w)) ** 2,
        useful_power=alpha * np.abs(z / d.code.bor) ** 2,
        eve_singular=np.abs(z) / d.code.bor < EVE_ZF_FLOOR,
    )
    return LinkOutcome(bob_bits, eve_bits, stats, bob_coin, eve_coin)


def simulate_link_once(
    params: SystemParams,
    code: SpreadingCode,
    h_b: ChannelRealization,
    h_e: ChannelRealization,
    block: SymbolBlock,
    rng: RngStream,
) -> LinkOutcome:
    """Modulated block(s) through TR precoding, AN, both links and ZF receivers.

    ``block.symbols`` may be (N,) or a stack (B, N); AN is redrawn for every
    block.  Singular ZF symbols are replaced by coin-flip bits.
    """
    symbols = np.asarray(block.symbols)
    n_blocks = None if symbols.ndim == 1 else symbols.shape[0]
    w = synth_an(code, h_b, params, rng.generator(SUB_AN), size=n_blocks).w
    return _run_link(params, _Draws(code, h_b, h_e, block, w, rng), w)


def empirical_sinrs(stats: PerRealizationStats, params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Genie per-symbol SINRs.

    Bob: alpha K_n^2 / sigma2_vb.  Eve, per block: |A2,n|^2 /
    (sigma2_ve + |A1,n|^2), nan on symbols with a singular Eve equalizer.
    """
    gamma_b = params.alpha * stats.k_n**2 / params.sigma2_vb
    gamma_e = stats.useful_power / (params.sigma2_ve + stats.an_interference_power)
    gamma_e = np.where(stats.eve_singular, np.nan, gamma_e)
    return gamma_b, gamma_e


# per-realization tally layout
_T_BITS, _T_BOB_ERR, _T_EVE_ERR, _T_SKIP, _T_GB, _T_GE, _T_SR, _T_SRC = range(8)


def _realization_task(args) -> np.ndarray:
    """Tally every cell of one realization; rows follow ``cells`` order."""
    base, cells, seed, r, n_blocks = args
    stream = RngStream(seed, r)
    d = draw_realization(base, stream, n_blocks)
    out = np.zeros((len(cells), 8))
    for k, (alpha, sigma2) in enumerate(cells):
        p = base.with_alpha(alpha).with_noise(sigma2)
        res = _run_link(p, d, d.w)
        gb, ge = empirical_sinrs(res.stats, p)
        gb = np.broadcast_to(gb, ge.shape)
        ok = ~np.isnan(ge)
        diff = np.log2(1.0 + gb[ok]) - np.log2(1.0 + ge[ok])
        out[k] = (
            d.block.bits.size,
            np.count_nonzero(res.bob_bits != d.block.bits),
            np.count_nonzero(res.eve_bits != d.block.bits),
            ge.size - np.count_nonzero(ok),
            gb[ok].mean() if ok.any() else math.nan,
            ge[ok].mean() if ok.any() else math.nan,
            diff.mean() if ok.any() else math.nan,
            np.maximum(diff, 0.0).mean() if ok.any() else math.nan,
        )
    return out


def run_cells(
    base: SystemParams,
    cells: list[tuple[float, float]],
    n_realizations: int,
    n_blocks: int,
    seed: int,
    workers: int = 1,
) -> np.ndarray:
    """Tallies of shape (n_realizations, len(cells), 8), realization-ordered."""
    tasks = [(base, cells, seed, r, n_blocks) for r in range(n_realizations)]
    if workers <= 1:
        parts = [_realization_task(t) for t in tasks]
    else:
        chunk = max(1, n_realizations // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_realization_task, tasks, chunksize=chunk))
    return np.stack(parts)


def _se(x: np.ndarray) -> float:
    x = x[~np.isnan(x)]
    if x.size < 2:
        return math.nan
    return float(np.std(x, ddof=1) / math.sqrt(x.size))


def _summarize(row: SweepResult, tally: np.ndarray) -> SweepResult:
    """Fill a row from a (R, 8) tally; ``*_ci`` columns are 2-sigma half-widths."""
    bits = int(tally[:, _T_BITS].sum())
    row.bits = bits
    row.bob_errors = int(tally[:, _T_BOB_ERR].sum())
    row.eve_errors = int(tally[:, _T_EVE_ERR].sum())
    row.eve_skipped = int(tally[:, _T_SKIP].sum())
    row.bob_ber = row.bob_errors / bits
    row.eve_ber = row.eve_errors / bits
    row.bob_ber_ci = 2.0 * math.sqrt(row.bob_ber * (1 - row.bob_ber) / bits)
    row.eve_ber_ci = 2.0 * math.sqrt(row.eve_ber * (1 - row.eve_ber) / bits)
    # blocks and symbols per realization are equal, so the mean of
    # realization means is the overall mean
    row.sinr_bob_emp = float(np.nanmean(tally[:, _T_GB]))
    row.sinr_eve_emp = float(np.nanmean(tally[:, _T_GE]))
    row.sinr_eve_emp_ci = 2.0 * _se(tally[:, _T_GE])
    row.sr_emp = float(np.nanmean(tally[:, _T_SR]))
    row.sr_emp_clamped = float(np.nanmean(tally[:, _T_SRC]))
    row.sr_emp_ci = 2.0 * _se(tally[:, _T_SR])
    return row


def _attach_bounds(row: SweepResult, params: SystemParams) -> SweepResult:
    b = analytic.BoundInputs.from_params(params)
    row.sinr_bob_bound = analytic.sinr_bob_bound(b)
    row.sinr_eve_bound = analytic.sinr_eve_bound(b)
    try:
        row.sr_bound = analytic.secrecy_rate_bound(b)
    except analytic.NonPositiveArgument:
        row.sr_bound = math.nan
    return row


def _sweep(cfg: SimConfig, bor: int, grid: list[tuple[float, float]], workers: int) -> list[SweepResult]:
    """Run (alpha, ebn0_db) cells for one BOR."""
    base = cfg.params_for(bor)
    cells = [(a, ebn0_to_noise_variance(e)) for a, e in grid]
    tallies = run_cells(
        base, cells, cfg.n_channel_realizations, cfg.n_blocks_per_realization,
        cfg.master_seed, workers,
    )
    rows = []
    for k, (a, e) in enumerate(grid):
        row = _summarize(SweepResult(bor, float(a), float(e)), tallies[:, k, :])
        rows.append(_attach_bounds(row, cfg.params_for(bor, a, e)))
        if row.eve_skipped:
            log.info("bor=%d alpha=%g: %d singular Eve symbols", bor, a, row.eve_skipped)
    return rows


def sweep_ber_vs_ebn0(cfg: SimConfig, alphas=None, workers: int = 1) -> list[SweepResult]:
    """BER against Eb/N0 for several power splits at the configured BOR."""
    alphas = cfg.snr_alphas if alphas is None else alphas
    grid = [(a, e) for e in cfg.ebn0_grid for a in alphas]
    return _sweep(cfg, cfg.params.bor, grid, workers)


def sweep_ber_vs_alpha(cfg: SimConfig, ebn0_db: float | None = None, workers: int = 1) -> list[SweepResult]:
    ebn0_db = cfg.ber_ebn0_db if ebn0_db is None else ebn0_db
    rows = []
    for bor in cfg.bors:
        rows += _sweep(cfg, bor, [(a, ebn0_db) for a in cfg.alphas], workers)
    return rows


def sweep_sr_vs_alpha(cfg: SimConfig, workers: int = 1) -> list[SweepResult]:
    rows = []
    for bor in cfg.bors:
        rows += _sweep(cfg, bor, [(a, cfg.ebn0_db) for a in cfg.alphas], workers)
    return rows


@dataclass(frozen=True)
class AlphaOptResult:
    bor: int
    ebn0_db: float
    alpha_opt: float
    sr_bound_at_opt: float
    sr_emp_at_opt: float
    alpha_star_emp: float
    sr_max_emp: float


def empirical_alpha_opt(cfg: SimConfig, alpha_grid=None, workers: int = 1) -> list[AlphaOptResult]:
    """Grid argmax of the empirical secrecy rate next to the analytic optimum, per BOR."""
    grid = cfg.alpha_opt_grid() if alpha_grid is None else list(alpha_grid)
    out = []
    for bor in cfg.bors:
        b = analytic.BoundInputs.from_params(cfg.params_for(bor))
        a_opt = analytic.alpha_opt(b)
        try:
            sr_opt = analytic.secrecy_rate_bound(b.at(a_opt))
        except analytic.NonPositiveArgument:
            sr_opt = math.nan
        rows = _sweep(cfg, bor, [(a, cfg.ebn0_db) for a in grid + [a_opt]], workers)
        emp = np.array([r.sr_emp for r in rows[:-1]])
        k = int(np.nanargmax(emp))
        out.append(AlphaOptResult(bor, cfg.ebn0_db, a_opt, sr_opt, rows[-1].sr_emp, float(grid[k]), float(emp[k])))
    return out
