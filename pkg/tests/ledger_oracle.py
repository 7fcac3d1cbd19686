"""Second, arbitrary-precision evaluation of the closed-form bound ledger."""

import math

import mpmath

mpmath.mp.dps = 40

# ledger key -> oracle key, for the level-independent entries
FLAT_KEYS = {
    "thm31.c1": "c1",
    "lemma35.k0": "k0",
    "lemma35.eps0": "eps0",
    "thm31.k_p": "thm_k",
    "thm31.eps_p": "thm_eps",
    "lemma33.k_p": "tech_k",
    "lemma33.eps_p": "tech_eps",
    "cor42.radius": "cor42_radius",
    "cor42.tail": "cor42_tail",
    "cor43.radius": "cor43_radius",
    "cor43.tail": "cor42_tail",
    "lemmaA1.k": "a1_k",
    "lemmaA1.eps": "a1_eps",
    "cor32.eps": "cor32_eps",
    "cor32.tail": "cor32_tail",
}


def oracle(n, p, ell, alpha, ct, mu, alpha_prime=None, D=None, taylor=None, circuit=None):
    n, ell, alpha, ct, mu = map(mpmath.mpf, (n, ell, alpha, ct, mu))
    root = n ** mpmath.mpf(0.125) / mpmath.sqrt(2)
    out = {"c1": 40 * ell * ct}
    out["k0"] = 2 * n ** mpmath.mpf(0.75)
    out["eps0"] = 3 * mpmath.exp(-root)
    out["thm_k"] = out["c1"] ** p * n ** (1 - (1 - alpha) ** p / 4)
    out["thm_eps"] = 4 * mpmath.exp(-root)
    ks = [2 * (20 * ell * ct) ** j * n ** (1 - (1 - alpha) ** j / 4) for j in range(p + 1)]
    out["tech_k"] = ks[p]
    eps = 3 * mpmath.exp(-root)
    for j in range(1, p + 1):
        eps += 6 * mpmath.exp(-4 * (20 * ell) ** (j - 1) * ct**j * n ** (1 - (1 - alpha) ** j / 4) + mpmath.sqrt(n) + 2 * (j - 1) * mpmath.log(2 * n) * ks[j - 1])
    out["tech_eps"] = eps
    out["tech_log_tln"] = mpmath.log(2) + mpmath.sqrt(n) + 2 * p * mpmath.log(2 * n) * ks[p]
    k, e, lt = out["k0"], out["eps0"], mpmath.log(2) + mpmath.sqrt(n)
    for i in range(1, p + 1):
        big_c = 2 * (20 * ell * ct) ** (i - 1)
        g = n ** (1 - (1 - alpha) * (1 - alpha) ** (i - 1) / 4)
        k = 20 * ell * ct * big_c * g
        e = 3 * mpmath.exp(-4 * ct * big_c * g) * mpmath.exp(lt) + e
        lt = 2 * mpmath.log(2 * n) * k + lt
        out[f"lemma36.k.{i}"], out[f"lemma36.eps.{i}"], out[f"lemma36.log_tln.{i}"] = k, e, lt
    k, e, lt = out["k0"], out["eps0"], mpmath.log(2) + mpmath.sqrt(n)
    for i in range(1, p + 1):
        x = ct * n**alpha * k ** (1 - alpha)
        k_new = 2 * ell * mpmath.ceil(mu * mpmath.e * x) + k
        step = 3 * mpmath.exp(-(mu - 1) * mpmath.e * x) * mpmath.exp(lt)
        e = e + step
        lt = k_new * mpmath.log(2 * n) + mpmath.log(mpmath.exp(lt) + step)
        k = k_new
        out[f"lemmaA2.k.{i}"], out[f"lemmaA2.eps.{i}"], out[f"lemmaA2.log_tln.{i}"] = k, e, lt
    out["cor42_radius"] = out["thm_k"]
    out["cor42_tail"] = 128 * mpmath.exp(-mpmath.sqrt(2) * n ** mpmath.mpf(0.125))
    if alpha_prime is not None and D is not None:
        ap = mpmath.mpf(alpha_prime)
        out["cor43_radius"] = 2 * D * out["c1"] ** (p * (1 - ap)) * n ** (1 - (1 - alpha) ** p * (1 - ap) / 4)
    if taylor is not None:
        d, norm_h, k_o, norm_o = taylor
        out["a1_k"] = 2 * ell * d + k_o
        out["a1_eps"] = 3 * mpmath.exp(-(d - mpmath.e * norm_h)) * norm_o
    if circuit is not None:
        depth, kc = circuit
        out["cor32_eps"] = mpmath.mpf(2) ** (-mpmath.mpf(kc) ** 2 / (2 ** (2 * depth + 8) * n))
        out["cor32_tail"] = 4 * mpmath.mpf(2) ** (-mpmath.mpf(kc) ** 2 / (2 ** (2 * depth + 7) * n))
    return out


def as_float(b):
    return float(b) if mpmath.isfinite(b) and abs(b) < mpmath.mpf("1e308") else math.inf


def mismatches(values, ref, p, rel=1e-12):
    """Ledger keys whose value differs from the oracle beyond ``rel``."""
    pairs = [(key, ref[o]) for key, o in FLAT_KEYS.items() if o in ref and key in values]
    pairs.append((f"lemma33.log_tln.{p}", ref["tech_log_tln"]))
    for i in range(1, p + 1):
        for stem in ("lemma36", "lemmaA2"):
            for part in ("k", "eps", "log_tln"):
                key = f"{stem}.{part}.{i}"
                pairs.append((key, ref[key]))
    bad = []
    for key, want in pairs:
        got, want = values[key], as_float(want)
        if math.isinf(want) or math.isinf(got):
            ok = got == want
        else:
            ok = abs(got - want) <= rel * abs(want) + 1e-300
        if not ok:
            bad.append((key, got, want))
    return bad, len(pairs)
