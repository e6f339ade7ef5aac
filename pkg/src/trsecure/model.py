"""Domain types, seeded random streams and 4-QAM mapping.

Gray map (normative, so CSV outputs stay comparable)::

    (b0, b1) -> ((1 - 2*b0) + 1j*(1 - 2*b1)) / sqrt(2)

Hard decisions are quadrant decisions; a coordinate that is exactly zero
decodes as bit 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

# Substream keys inside one RngStream.  Every random draw of a simulation
# is tied to (master_seed, stream_id, substream); batched draws are laid out
# row-major so row b always belongs to OFDM block b.
SUB_CODE = 0
SUB_CHANNEL_BOB = 1
SUB_CHANNEL_EVE = 2
SUB_BITS = 3
SUB_AN = 4
SUB_NOISE_BOB = 5
SUB_NOISE_EVE = 6
SUB_COIN = 7

_SQRT2 = np.sqrt(2.0)


class ParameterError(ValueError):
    """Raised for system parameters outside their valid domain."""


@dataclass(frozen=True)
class SystemParams:
    q_subcarriers: int = 256
    n_symbols: int = 64
    bor: int = 4
    alpha: float = 0.5
    sigma2_vb: float = 0.005
    sigma2_ve: float = 0.005
    sigma2_an: float | None = None
    bessel_terms: int = 20
    mod_order: int = 4

    def __post_init__(self):
        for name in ("q_subcarriers", "n_symbols", "bor", "bessel_terms"):
            if int(getattr(self, name)) < 1:
                raise ParameterError(f"{name} must be a positive integer")
        if self.q_subcarriers != self.n_symbols * self.bor:
            raise ParameterError(
                f"q_subcarriers={self.q_subcarriers} != n_symbols*bor="
                f"{self.n_symbols * self.bor}"
            )
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError(f"alpha={self.alpha} outside [0, 1]")
        if self.sigma2_vb <= 0 or self.sigma2_ve <= 0:
            raise ParameterError("noise variances must be > 0")
        if self.sigma2_an is None:
            # equal useful and AN energy per subcarrier under unit channel energy
            object.__setattr__(self, "sigma2_an", 1.0 / self.bor)
        elif self.sigma2_an <= 0:
            raise ParameterError("sigma2_an must be > 0")
        if self.mod_order != 4:
            raise ParameterError("only 4-QAM is supported")

    @classmethod
    def from_bor(cls, q_subcarriers: int, bor: int, **kwargs) -> "SystemParams":
        if bor < 1 or q_subcarriers % bor:
            raise ParameterError(f"bor={bor} does not divide q_subcarriers={q_subcarriers}")
        return cls(q_subcarriers=q_subcarriers, n_symbols=q_subcarriers // bor, bor=bor, **kwargs)

    def with_alpha(self, alpha: float) -> "SystemParams":
        return replace(self, alpha=alpha)

    def with_noise(self, sigma2: float) -> "SystemParams":
        return replace(self, sigma2_vb=sigma2, sigma2_ve=sigma2)


@dataclass(frozen=True)
class RngStream:
    """Keyed random stream: identical keys give identical draws.

    Backed by the counter-based Philox bit generator, keyed through a
    SeedSequence on ``(master_seed, stream_id, substream)``.  Nothing depends
    on the order in which streams are consumed, so parallel runs reproduce
    serial ones.
    """

    master_seed: int
    stream_id: int = 0

    def generator(self, substream: int = 0) -> np.random.Generator:
        seq = np.random.SeedSequence([int(self.master_seed), int(self.stream_id), int(substream)])
        return np.random.Generator(np.random.Philox(seq))


def as_generator(rng: RngStream | np.random.Generator, substream: int) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator(substream)
    return rng


@dataclass(frozen=True)
class SpreadingCode:
    """Diagonal +-1 entries of the spreading matrix, indexed by subcarrier.

    Entry ``n + i*N`` scales symbol ``n`` on its ``i``-th copy; the matrix
    itself carries the extra ``1/sqrt(U)`` normalization.
    """

    signs: np.ndarray
    n_symbols: int

    def __post_init__(self):
        signs = np.asarray(self.signs, dtype=float)
        if signs.ndim != 1 or signs.size % self.n_symbols:
            raise ParameterError("code length must be a multiple of n_symbols")
        if not np.all(np.abs(signs) == 1.0):
            raise ParameterError("spreading entries must be +-1")
        signs.setflags(write=False)
        object.__setattr__(self, "signs", signs)

    @property
    def bor(self) -> int:
        return self.signs.size // self.n_symbols

    def matrix(self) -> np.ndarray:
        """Dense Q x N spreading matrix (tests and small cases only)."""
        q, n = self.signs.size, self.n_symbols
        s = np.zeros((q, n))
        rows = np.arange(q)
        s[rows, rows % n] = self.signs / np.sqrt(self.bor)
        return s


@dataclass(frozen=True)
class ChannelRealization:
    gains: np.ndarray

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=complex)
        gains.setflags(write=False)
        object.__setattr__(self, "gains", gains)

    @property
    def energy(self) -> float:
        """Mean per-subcarrier power."""
        return float(np.mean(np.abs(self.gains) ** 2))


@dataclass(frozen=True)
class SymbolBlock:
    symbols: np.ndarray
    bits: np.ndarray


@dataclass(frozen=True)
class AnVector:
    w: np.ndarray
    pivots: np.ndarray = field(default=None, repr=False)


def gen_spreading_code(params: SystemParams, rng: RngStream | np.random.Generator) -> SpreadingCode:
    """Draw Q i.i.d. equiprobable +-1 entries (each diagonal block independent)."""
    gen = as_generator(rng, SUB_CODE)
    signs = 1.0 - 2.0 * gen.integers(0, 2, size=params.q_subcarriers)
    return SpreadingCode(signs, params.n_symbols)


def gen_rayleigh_channel(
    q_subcarriers: int, rng: RngStream | np.random.Generator, normalize: bool = True,
    substream: int = SUB_CHANNEL_BOB,
) -> ChannelRealization:
    """Uncorrelated Rayleigh subcarriers, CN(0, 1) each.

    With ``normalize`` the realization is scaled so its mean subcarrier power
    is exactly one.
    """
    gen = as_generator(rng, substream)
    h = (gen.standard_normal(q_subcarriers) + 1j * gen.standard_normal(q_subcarriers)) / _SQRT2
    if normalize:
        h = h / np.sqrt(np.mean(np.abs(h) ** 2))
    return ChannelRealization(h)


def qam4_modulate(bits) -> SymbolBlock:
    """Gray-mapped unit-energy 4-QAM; bit pairs along the last axis."""
    bits = np.asarray(bits, dtype=np.int8)
    if bits.shape[-1] % 2:
        raise ValueError("4-QAM needs an even number of bits")
    pairs = bits.reshape(*bits.shape[:-1], -1, 2)
    symbols = ((1 - 2 * pairs[..., 0]) + 1j * (1 - 2 * pairs[..., 1])) / _SQRT2
    return SymbolBlock(symbols, bits)


def qam4_demodulate(symbols) -> np.ndarray:
    """Quadrant hard decision; zero coordinates decode as bit 0."""
    symbols = np.asarray(symbols, dtype=complex)
    bits = np.empty(symbols.shape + (2,), dtype=np.int8)
    bits[..., 0] = symbols.real < 0
    bits[..., 1] = symbols.imag < 0
    return bits.reshape(*symbols.shape[:-1], -1) if symbols.ndim else bits


def ebn0_to_noise_variance(ebn0_db: float) -> float:
    """Per-subcarrier noise variance for a given Eb/N0.

    A block carries total energy N (whatever the power split) over 2N bits,
    so Eb = 1/2.
    """
    return 0.5 * 10.0 ** (-ebn0_db / 10.0)
