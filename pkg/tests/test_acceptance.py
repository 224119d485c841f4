"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import math
import random
from pathlib import Path

import numpy as np

from gausspaths.arith import (
    EpsilonSignature,
    enumerate_family,
    enumerate_signatures,
    eps_signature,
    euler_phi,
    factorize,
    family_density_constant,
    jacobi,
    squarefree_one_mod_four,
)
from gausspaths.atlas import local_slope_probe
from gausspaths.cli import main
from gausspaths.expsums import (
    c_prime_plus,
    character_side,
    crt_split,
    cusp_constants,
    find_cusp_points,
    s_general,
    s_star,
    s_star_all,
    s_star_reduced,
    vanishes_by_order,
    vanishes_prime_power,
)
from gausspaths.moments import MomentOrder, empirical_moment, limit_moment
from gausspaths.paths import completed_tilde, family_values, tilde_path_eval
from gausspaths.random_model import estimate_deviation_prob, sample_limit_path, sample_multiplicative

SIGS5 = list(enumerate_signatures(5))
CUSP_SIG = EpsilonSignature.from_list([1, 1, -1])


def test_01_endpoint_normalization(acceptance):
    cs = enumerate_family(10_000)
    err = np.abs(family_values(cs, np.array([1.0]))[:, 0] - 1)
    ok = cs.size > 600 and err.max() <= 1e-6
    assert acceptance("1 endpoint", ok, f"{cs.size} moduli, max |G(1)-1| = {err.max():.2e}")


def test_02_density(acceptance):
    Q = 10**6
    ratio = enumerate_family(Q).size / Q
    target = family_density_constant()
    ok = abs(ratio - target) <= 0.01
    assert acceptance("2 density", ok, f"|D_Q|/Q = {ratio:.5f}, target {target:.5f}")


def test_03_completion_identity(acceptance):
    ts = [k / 10 for k in range(1, 10)]
    worst = 0.0
    cs = squarefree_one_mod_four(2, 500)
    for c in cs:
        for t in ts:
            worst = max(worst, abs(tilde_path_eval(int(c), t) - completed_tilde(int(c), t)))
    ok = worst <= 1e-9
    assert acceptance("3 completion", ok, f"{cs.size} moduli x 9 points, max diff {worst:.2e}")


def test_04_exponential_sum_algebra(acceptance):
    qs = [q for q in range(3, 201, 2) if len(factorize(q)) == 1 and math.gcd(q, 30) == 1]
    reduced = 0.0
    for sig in SIGS5:
        for q in qs:
            fast = s_star_all(q, sig)
            for a in range(1, q):
                if a % q and math.gcd(a, q) == 1:
                    reduced = max(reduced, abs(s_star_reduced(a, q, sig) - fast[a]))

    vanish, cases = 0.0, 0
    for sig in SIGS5:
        for m in range(3, 201):
            prime_power = m % 2 == 1 and len(factorize(m)) == 1
            if vanishes_by_order(m, sig) or (prime_power and vanishes_prime_power(m, sig)):
                units = [a for a in range(1, m) if math.gcd(a, m) == 1]
                cases += 1
                vanish = max(vanish, float(np.max(np.abs(s_star_all(m, sig)[units]))))
                if prime_power and math.gcd(m, 30) == 1:
                    vanish = max(vanish, max(abs(s_star_reduced(a, m, sig)) for a in units))

    rng = random.Random(20)
    units77 = [a for a in range(1, 77) if math.gcd(a, 77) == 1]
    sig = EpsilonSignature.from_list([1, -1, 1])
    norm = (2 * euler_phi(77)) ** 3
    crt = max(abs(crt_split(a, 7, 11, sig) - s_general(a, 77, sig)) / norm for a in rng.sample(units77, 20))

    chars = max(
        abs(character_side(a, 23, s, e) - (s_star(a, 23, s) + e * s_star(-a, 23, s)))
        for s in SIGS5
        for e in (1, -1)
        for a in range(1, 23)
    )
    ok = reduced <= 1e-10 and cases > 0 and vanish <= 1e-12 and crt <= 1e-10 and chars <= 1e-10
    detail = (
        f"reduced {reduced:.1e} on {len(qs)} moduli, vanishing {vanish:.1e} over {cases} cases, "
        f"crt {crt:.1e}, characters {chars:.1e}"
    )
    assert acceptance("4 exponential sums", ok, detail)


def test_05_q71(acceptance):
    sig = EpsilonSignature.from_list([1, 1, 1])
    err = max(
        abs(s_star(a, 71, sig) - (-1 + jacobi(a, 71) * math.sqrt(71) * 1j) / 70) for a in range(1, 71)
    )
    cpp = c_prime_plus(sig)
    ok = err <= 1e-10 and abs(cpp - 0.286) <= 1e-3
    assert acceptance("5 q=71", ok, f"max s* error {err:.1e}, c'+ = {cpp:.6f}")


def test_06_cusp_search(acceptance):
    hits = find_cusp_points(CUSP_SIG, 30)
    reports = [cusp_constants(a, 23, CUSP_SIG) for a in range(1, 23)]
    classes = {r.classification for r in reports}
    worst = max(abs(r.delta) for r in reports)
    ok = hits == [(23, True)] and classes == {"cusp"} and worst < 0.5
    assert acceptance("6 cusp search", ok, f"hits {hits}, classes {sorted(classes)}, max |delta| {worst:.4f}")


def test_07_local_slope_signs(acceptance):
    rep = cusp_constants(1, 23, CUSP_SIG)
    offsets = [1e-6, -1e-6, 1e-8, -1e-8]
    quot = local_slope_probe(CUSP_SIG, 1, 23, offsets, tol=1e-7).real
    pred = [rep.slope_plus, rep.slope_minus] * 2
    ok = all(np.sign(q) == np.sign(p) != 0 for q, p in zip(quot, pred))
    ok = ok and quot[0] * quot[1] < 0 and quot[2] * quot[3] < 0
    shown = ", ".join(f"{h:+.0e}: {q:+.4f}" for h, q in zip(offsets, quot))
    detail = f"{shown}; predicted {rep.slope_plus:+.4f} / {rep.slope_minus:+.4f}"
    assert acceptance("7 slope signs", ok, detail)


def test_08_moment_convergence(acceptance):
    order = MomentOrder.single(0.3, 1, 1)
    lim = limit_moment(order, Hmax=100_000).value
    Qs = [10**3, 10**4, 10**5]
    diffs = [abs(empirical_moment(order, Q) - lim) for Q in Qs]
    slope = float(np.polyfit(np.log(Qs), np.log(diffs), 1)[0])
    ok = diffs[0] > diffs[1] > diffs[2] and slope <= -0.2
    shown = ", ".join(f"{d:.2e}" for d in diffs)
    assert acceptance("8 moments", ok, f"|M_Q - M*| = {shown}, slope {slope:.3f}")


def test_09_monte_carlo_mean(acceptance):
    N, trials = 100_000, 500
    vals = np.empty(trials, dtype=np.complex128)
    exact_ends = True
    for k in range(trials):
        path = sample_limit_path(sample_multiplicative(N + 1, seed=9, stream=k), N, R=2)
        exact_ends &= path.values[0] == 0 and path.values[2] == 1
        vals[k] = path.values[1]
    lim = limit_moment(MomentOrder.single(0.5, 0, 1)).value
    mean = vals.mean()
    # Re G*(1/2) = 1/2 identically, so the real standard error is zero
    se_re = vals.real.std(ddof=1) / math.sqrt(trials)
    se_im = vals.imag.std(ddof=1) / math.sqrt(trials)
    ok = bool(exact_ends) and abs(mean.real - lim.real) <= 3 * se_re + 1e-12
    ok = ok and abs(mean.imag - lim.imag) <= 3 * se_im + 1e-12
    detail = f"mean {mean:.4f}, limit {lim:.4f}, se ({se_re:.4f}, {se_im:.4f}), exact endpoints {bool(exact_ends)}"
    assert acceptance("9 monte carlo", ok, detail)


def test_10_deviation_trend(acceptance):
    probs = []
    for Z in (5, 11, 19):
        rep = estimate_deviation_prob(eps_signature(17393, Z), 0.5, trials=200, seed=10)
        probs.append(rep.estimate)
    ok = probs[0] >= probs[1] >= probs[2]
    assert acceptance("10 deviation trend", ok, f"P(sup >= 0.5) at Z = 5, 11, 19: {probs}")


def test_11_atlas_determinism(acceptance, tmp_path):
    runs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["atlas", "--Z", "5", "--output-dir", str(out)]) == 0
        runs.append({p.name: p.read_bytes() for p in sorted(Path(out).iterdir()) if p.suffix in (".csv", ".svg")})
    n_csv = sum(name.endswith(".csv") for name in runs[0])
    n_svg = sum(name.endswith(".svg") for name in runs[0])
    ok = n_csv == 18 and n_svg == 18 and runs[0] == runs[1]
    assert acceptance("11 atlas determinism", ok, f"{n_csv} csv + {n_svg} svg, identical {runs[0] == runs[1]}")
