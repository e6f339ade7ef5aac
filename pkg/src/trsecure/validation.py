"""Self-checks behind ``trsecure validate``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import analytic
from .model import RngStream, SystemParams, gen_rayleigh_channel, gen_spreading_code, qam4_modulate
from .special import const_a, lah
from .waveform import apply_channel_awgn, assemble_tx, null_space_residual, precode, receive_bob, spread, synth_an


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    passed: bool


def check_consistency_identity(n: int = 1000, seed: int = 0) -> Check:
    """Rational T1..T4 form vs two-log form of the secrecy-rate bound."""
    gen = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        b = analytic.BoundInputs(
            bor=int(gen.integers(4, 17)),
            alpha=float(gen.uniform(0.0, 1.0)),
            sigma2_vb=float(10 ** gen.uniform(-3, 0)),
            sigma2_ve=float(10 ** gen.uniform(-3, 0)),
            sigma2_an=float(10 ** gen.uniform(-2, 0)),
        )
        direct = analytic.secrecy_rate_direct(b)
        rational = analytic.secrecy_rate_bound(b)
        worst = max(worst, abs(rational - direct) / max(abs(direct), 1e-300))
    return Check("sr_bound_consistency_rel", worst, 1e-12, worst <= 1e-12)


def check_lah_recurrence(max_l: int = 15) -> Check:
    bad = 0
    for l in range(1, max_l):
        for q in range(1, l + 1):
            if lah(l + 1, q) != (l + q) * lah(l, q) + lah(l, q - 1):
                bad += 1
    return Check("lah_recurrence_failures", bad, 0, bad == 0)


def check_moment_identity(bors=range(4, 17), terms: int = 20) -> Check:
    worst = max(abs(4.0 * const_a(u, terms) * u - 1.0) for u in bors)
    return Check("max_abs_4AU_minus_1", worst, 0.05, worst <= 0.05)


def check_null_space(n: int = 1000, seed: int = 0) -> Check:
    worst = 0.0
    for k in range(n):
        bor = (2, 4, 8)[k % 3]
        params = SystemParams.from_bor(64, bor)
        stream = RngStream(seed, k)
        code = gen_spreading_code(params, stream)
        h_b = gen_rayleigh_channel(params.q_subcarriers, stream)
        worst = max(worst, null_space_residual(code, h_b, synth_an(code, h_b, params, stream)))
    return Check("null_space_residual_inf", worst, 1e-10, worst < 1e-10)


def check_bob_an_immunity(seed: int = 0) -> Check:
    worst = 0.0
    for k, (bor, alpha) in enumerate((u, a) for u in (2, 4, 8) for a in (0.1, 0.5, 0.95)):
        params = SystemParams.from_bor(256, bor, alpha=alpha)
        stream = RngStream(seed, k)
        code = gen_spreading_code(params, stream)
        h_b = gen_rayleigh_channel(params.q_subcarriers, stream)
        block = qam4_modulate(stream.generator(3).integers(0, 2, 2 * params.n_symbols))
        tx = assemble_tx(alpha, precode(h_b, spread(code, block.symbols)), synth_an(code, h_b, params, stream))
        rx = apply_channel_awgn(h_b, tx, 0.0, stream)
        eq = receive_bob(code, h_b, rx, alpha).equalized
        worst = max(worst, float(np.max(np.abs(eq - block.symbols))))
    return Check("bob_noiseless_error_inf", worst, 1e-9, worst < 1e-9)


def run_all(seed: int = 0) -> list[Check]:
    return [
        check_consistency_identity(seed=seed),
        check_lah_recurrence(),
        check_moment_identity(),
        check_null_space(seed=seed),
        check_bob_an_immunity(seed=seed),
    ]


def all_passed(checks) -> bool:
    return all(c.passed and not math.isnan(c.value) for c in checks)
