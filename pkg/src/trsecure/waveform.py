"""Frequency-domain transmit/receive chain with null-space artificial noise.

All operations act on the last axis, so a stack of OFDM blocks of shape
``(B, Q)`` is processed in one call.  Subcarrier ``n + i*N`` carries copy
``i`` of symbol ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    SUB_AN,
    AnVector,
    ChannelRealization,
    ParameterError,
    RngStream,
    SpreadingCode,
    SystemParams,
    as_generator,
)

PIVOT_FLOOR = 1e-6
EVE_ZF_FLOOR = 1e-9
BOB_ZF_FLOOR = 1e-12


class DimensionError(ValueError):
    pass


class DegenerateChannel(ArithmeticError):
    """Every candidate pivot of an AN group sits below the floor."""


class SingularEqualizer(ArithmeticError):
    """ZF coefficient is zero or below the floor."""


@dataclass(frozen=True)
class TxFrame:
    samples: np.ndarray


@dataclass(frozen=True)
class RxObservation:
    despread: np.ndarray
    equalized: np.ndarray
    # symbols whose ZF coefficient fell below the floor (equalized is nan there)
    singular: np.ndarray


def _groups(x: np.ndarray, n_symbols: int) -> np.ndarray:
    """View (..., Q) as (..., U, N): axis -2 walks the U copies of a symbol."""
    return x.reshape(*x.shape[:-1], -1, n_symbols)


def _check_len(x: np.ndarray, q: int, what: str):
    if x.shape[-1] != q:
        raise DimensionError(f"{what}: expected last axis {q}, got {x.shape[-1]}")


def spread(code: SpreadingCode, symbols) -> np.ndarray:
    x = np.asarray(symbols, dtype=complex)
    _check_len(x, code.n_symbols, "spread")
    u = code.bor
    tiled = np.concatenate([x] * u, axis=-1)
    return tiled * code.signs / np.sqrt(u)


def despread(code: SpreadingCode, y) -> np.ndarray:
    y = np.asarray(y, dtype=complex)
    _check_len(y, code.signs.size, "despread")
    return _groups(y * code.signs, code.n_symbols).sum(axis=-2) / np.sqrt(code.bor)


def precode(h_b: ChannelRealization, xs) -> np.ndarray:
    """Time-reversal precoding: multiply by the conjugate Bob response."""
    xs = np.asarray(xs, dtype=complex)
    _check_len(xs, h_b.gains.size, "precode")
    return np.conj(h_b.gains) * xs


def focusing_gain(code: SpreadingCode, h_b: ChannelRealization) -> np.ndarray:
    """K_n: mean of |H_B|^2 over the U subcarriers carrying symbol n."""
    return _groups(np.abs(h_b.gains) ** 2, code.n_symbols).mean(axis=-2)


def eve_coupling(code: SpreadingCode, h_b: ChannelRealization, h_e: ChannelRealization) -> np.ndarray:
    """Z_n: sum over the copies of symbol n of H_E * conj(H_B)."""
    prod = code.signs**2 * h_e.gains * np.conj(h_b.gains)
    return _groups(prod, code.n_symbols).sum(axis=-2)


def synth_an(
    code: SpreadingCode,
    h_b: ChannelRealization,
    params: SystemParams,
    rng: RngStream | np.random.Generator,
    size: int | None = None,
) -> AnVector:
    """Artificial noise in the null space of ``S^H H_B``.

    In each group of U subcarriers, U-1 entries are drawn CN(0, 1) and the
    remaining one is solved so that the group's signed, channel-weighted sum
    vanishes.  The solved entry is the last copy unless its gain is below
    ``PIVOT_FLOOR``, in which case the strongest copy of the group is used.
    Each block is finally rescaled so its mean-square per element equals
    ``params.sigma2_an`` exactly.

    ``size`` stacks that many independent blocks along a leading axis.
    """
    u, n = code.bor, code.n_symbols
    if u < 2:
        raise ParameterError("AN synthesis needs bor >= 2")
    q = code.signs.size
    _check_len(h_b.gains, q, "synth_an")
    gen = as_generator(rng, SUB_AN)
    shape = (q,) if size is None else (size, q)
    w = (gen.standard_normal(shape) + 1j * gen.standard_normal(shape)) / np.sqrt(2.0)

    coef = _groups(code.signs * h_b.gains, n)  # (U, N)
    mag = np.abs(coef)
    pivots = np.full(n, u - 1)
    weak = mag[u - 1] < PIVOT_FLOOR
    if np.any(weak):
        strongest = np.argmax(mag, axis=0)
        if np.any(mag[strongest, np.arange(n)][weak] < PIVOT_FLOOR):
            raise DegenerateChannel("all candidate pivots below floor")
        pivots = np.where(weak, strongest, pivots)

    wg = _groups(w, n)  # view into w
    cols = np.arange(n)
    wg[..., pivots, cols] = 0.0
    partial = (coef * wg).sum(axis=-2)
    wg[..., pivots, cols] = -partial / coef[pivots, cols]

    ms = np.mean(np.abs(w) ** 2, axis=-1, keepdims=True)
    w *= np.sqrt(params.sigma2_an / ms)
    return AnVector(w, pivots)


def null_space_residual(code: SpreadingCode, h_b: ChannelRealization, an: AnVector) -> float:
    """max |S^H H_B W| over all symbols (and blocks)."""
    return float(np.max(np.abs(despread(code, h_b.gains * an.w))))


def assemble_tx(alpha: float, precoded, w: AnVector | np.ndarray) -> TxFrame:
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha={alpha} outside [0, 1]")
    w = w.w if isinstance(w, AnVector) else np.asarray(w)
    return TxFrame(np.sqrt(alpha) * np.asarray(precoded) + np.sqrt(1.0 - alpha) * w)


def apply_channel_awgn(
    h: ChannelRealization,
    tx: TxFrame | np.ndarray,
    sigma2: float,
    rng: RngStream | np.random.Generator,
    substream: int = 0,
) -> np.ndarray:
    """``h * tx + v`` with v circular complex Gaussian of per-element variance sigma2."""
    if sigma2 < 0:
        raise ValueError("sigma2 must be >= 0")
    x = tx.samples if isinstance(tx, TxFrame) else np.asarray(tx)
    _check_len(x, h.gains.size, "apply_channel_awgn")
    out = h.gains * x
    if sigma2 > 0:
        out = out + np.sqrt(sigma2 / 2.0) * unit_noise(x.shape, as_generator(rng, substream))
    return out


def unit_noise(shape, gen: np.random.Generator) -> np.ndarray:
    """Complex Gaussian with unit variance per real dimension."""
    return gen.standard_normal(shape) + 1j * gen.standard_normal(shape)


def _zero_force(despread_y: np.ndarray, coeff: np.ndarray, floor: float, on_singular: str) -> RxObservation:
    singular = np.abs(coeff) < floor
    if np.any(singular) and on_singular == "raise":
        raise SingularEqualizer(f"{int(singular.sum())} ZF coefficient(s) below {floor:g}")
    safe = np.where(singular, 1.0, coeff)
    eq = despread_y / safe
    eq = np.where(singular, np.nan, eq)
    return RxObservation(despread_y, eq, np.broadcast_to(singular, eq.shape))


def receive_bob(
    code: SpreadingCode, h_b: ChannelRealization, rx, alpha: float, on_singular: str = "raise"
) -> RxObservation:
    """Despread then divide symbol n by sqrt(alpha) * K_n.

    ``on_singular="mask"`` returns nan for singular symbols instead of raising.
    """
    y = despread(code, rx)
    coeff = np.sqrt(alpha) * focusing_gain(code, h_b)
    return _zero_force(y, coeff, BOB_ZF_FLOOR, on_singular)


def receive_eve(
    code: SpreadingCode,
    h_b: ChannelRealization,
    h_e: ChannelRealization,
    rx,
    alpha: float,
    on_singular: str = "raise",
) -> RxObservation:
    """Despread then divide symbol n by sqrt(alpha) * Z_n / U."""
    y = despread(code, rx)
    coeff = np.sqrt(alpha) * eve_coupling(code, h_b, h_e) / code.bor
    return _zero_force(y, coeff, EVE_ZF_FLOOR, on_singular)
