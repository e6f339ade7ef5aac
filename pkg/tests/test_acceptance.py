"""Acceptance criteria at full scale (Q=256, 100 realizations x 300 blocks).

Each test records one PASS/FAIL line, repeated in the terminal summary.
"""

import math

import numpy as np
import pytest
from scipy import integrate, special

from trsecure import cli, validation
from trsecure.model import RngStream, SystemParams, gen_rayleigh_channel, gen_spreading_code
from trsecure.simkit import SimConfig, empirical_alpha_opt, sweep_ber_vs_alpha, sweep_sr_vs_alpha
from trsecure.special import const_a
from trsecure.waveform import focusing_gain

FULL = SimConfig()


@pytest.fixture(scope="module")
def sr_rows():
    rows = sweep_sr_vs_alpha(SimConfig(bors=(2, 4, 8), ebn0_db=20.0))
    return {(r.bor, round(r.alpha, 12)): r for r in rows}


@pytest.fixture(scope="module")
def ber_alpha_rows():
    return sweep_ber_vs_alpha(SimConfig(bors=(2, 4, 8)), ebn0_db=15.0)


def test_c01_null_space(criterion):
    c = validation.check_null_space(n=1000, seed=0)
    criterion(1, c.passed, f"max |S^H H_B W| = {c.value:.2e} over 1000 draws (< 1e-10)")


def test_c02_bob_an_immunity(criterion):
    c = validation.check_bob_an_immunity(seed=0)
    criterion(2, c.passed, f"max noiseless Bob error = {c.value:.2e} (< 1e-9)")


def test_c03_focusing_gain_moment(criterion):
    details, ok = [], True
    for bor in (4, 8):
        p = SystemParams.from_bor(256, bor)
        k = np.concatenate([
            focusing_gain(gen_spreading_code(p, RngStream(31, r)), gen_rayleigh_channel(256, RngStream(31, r)))
            for r in range(10_000 // p.n_symbols + 1)
        ])
        rel = abs(np.mean(k**2) / ((bor + 1) / bor) - 1)
        ok &= k.size >= 10_000 and rel < 0.02
        details.append(f"U={bor}: rel err {rel:.4f} ({k.size} symbols)")
    criterion(3, ok, "; ".join(details))


def test_c04_series_identity(criterion):
    worst = max(abs(4 * const_a(u, 20) * u - 1) for u in range(4, 17))
    quad_err = 0.0
    for u in range(4, 17):
        val, _ = integrate.quad(
            lambda r: r**2 * 4 * r**u / math.gamma(u) * special.kv(u - 1, 2 * r), 0, np.inf, limit=200
        )
        quad_err = max(quad_err, abs(val / u - 1))
    criterion(4, worst <= 0.05 and quad_err < 1e-6,
              f"max |4AU - 1| = {worst:.2e} (<= 0.05); quadrature moment oracle rel err {quad_err:.1e}")


def test_c05_closed_form_consistency(criterion):
    c = validation.check_consistency_identity(n=1000, seed=0)
    criterion(5, c.passed, f"max rel diff = {c.value:.2e} over 1000 inputs (<= 1e-12)")


@pytest.mark.slow
def test_c06_alpha_opt_agreement(criterion):
    res = empirical_alpha_opt(SimConfig(bors=(4, 8), ebn0_db=20.0, alpha_opt_step=0.02))
    ok = all(r.sr_emp_at_opt >= 0.95 * r.sr_max_emp for r in res)
    detail = "; ".join(
        f"U={r.bor}: sr_emp(alpha_opt={r.alpha_opt:.4f}) = {r.sr_emp_at_opt:.4f}, grid max {r.sr_max_emp:.4f}"
        for r in res
    )
    criterion(6, ok, detail)


@pytest.mark.slow
def test_c07_bound_ordering(criterion, sr_rows):
    bad = []
    for bor in (4, 8):
        for k in range(1, 10):
            r = sr_rows[bor, round(k / 10, 12)]
            if r.sinr_eve_bound > r.sinr_eve_emp + r.sinr_eve_emp_ci:
                bad.append(f"U={bor} a={r.alpha:g} eve bound {r.sinr_eve_bound:.4g} > emp {r.sinr_eve_emp:.4g}")
            if r.sr_bound < r.sr_emp - r.sr_emp_ci:
                bad.append(f"U={bor} a={r.alpha:g} sr bound {r.sr_bound:.4g} < emp {r.sr_emp:.4g}")
    criterion(7, not bad, "; ".join(bad) or "eve bound <= emp and sr bound >= emp at U=4,8, alpha=0.1..0.9 (2 sigma)")


@pytest.mark.slow
def test_c08_ber_extremes(criterion):
    rows = {r.alpha: r for r in sweep_ber_vs_alpha(SimConfig(bors=(4,), alphas=(0.95, 0.01)), ebn0_db=15.0)}
    hi, lo = rows[0.95], rows[0.01]
    ratio_ok = hi.eve_ber >= 10 * hi.bob_ber
    flat_ok = all(0.45 <= b <= 0.55 for b in (lo.bob_ber, lo.eve_ber))
    criterion(8, ratio_ok and flat_ok,
              f"alpha=0.95: eve {hi.eve_ber:.4g} vs bob {hi.bob_ber:.4g} (ratio {hi.eve_ber / hi.bob_ber:.1f} >= 10); "
              f"alpha=0.01: bob {lo.bob_ber:.4g}, eve {lo.eve_ber:.4g} (need both in [0.45, 0.55])")


@pytest.mark.slow
def test_c09_orderings(criterion, ber_alpha_rows, sr_rows):
    bad = []
    for bor in (2, 4, 8):
        # ascending AN fraction = descending alpha
        rs = sorted((r for r in ber_alpha_rows if r.bor == bor), key=lambda r: -r.alpha)
        for a, b in zip(rs, rs[1:]):
            if b.eve_ber < a.eve_ber - math.hypot(a.eve_ber_ci, b.eve_ber_ci):
                bad.append(f"U={bor}: eve_ber drops {a.eve_ber:.4g} -> {b.eve_ber:.4g} at alpha {b.alpha:g}")
    peaks = [max(r.sr_emp for (u, _), r in sr_rows.items() if u == bor) for bor in (2, 4, 8)]
    if not peaks[0] < peaks[1] < peaks[2]:
        bad.append(f"SR peaks not increasing in U: {peaks}")
    criterion(9, not bad, "; ".join(bad) or
              f"eve_ber nondecreasing in AN fraction for U=2,4,8; SR peaks {', '.join(f'{p:.3f}' for p in peaks)}")


REDUCED = """
realizations = 8
blocks = 20
alphas = 0.1, 0.5, 0.9
snr_alphas = 0.95, 0.5
ebn0_grid = 0, 10, 20
alpha_opt_step = 0.1
seed = 11
"""


@pytest.mark.slow
def test_c10_determinism(criterion, tmp_path):
    cfg = tmp_path / "reduced.cfg"
    cfg.write_text(REDUCED)
    bad = []
    for sub in cli.SUBCOMMANDS:
        outputs = []
        for tag, threads in (("a", "1"), ("b", "1"), ("c", "8")):
            out = tmp_path / f"{sub}-{tag}"
            assert cli.main([sub, "--config", str(cfg), "--out", str(out), "--threads", threads, "--no-plots"]) == 0
            outputs.append((out / f"{sub}.csv").read_bytes())
        if not outputs[0] == outputs[1] == outputs[2]:
            bad.append(sub)
    criterion(10, not bad, f"differing CSVs: {bad}" if bad else
              "all subcommands byte-identical across reruns and --threads 1 vs 8")
