"""Command-line interface: newform ingestion, verification suites, partial L-values."""

from __future__ import annotations

import json
import os
import random
import sys
import tempfile
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import click
import mpmath

from .algebra import ExactScalar, K, RatFnX, ScalarK
from .asai import (
    ArchWeightData, TripleLocalDatum, asai_lfactor, asai_lfactor_companion, critical_points,
    sym3_companion_check, sym3_factor_check,
)
from .gl2local import HeckePoly, SatakeGL2, satake_from_hecke
from .localfield import ShellFunction, is_prime
from .periods import KNOWN_IDENTITIES, arch_gamma_ratio_check, ledger_check, tate_epsilon
from .siegel import (
    SchwartzSym3, coefficient_table, det, holomorphy_precheck, is_positive_definite, sym_from_six,
)
from .zeta import (
    InternalConsistencyError, brute_force_case, build_phi, good_place_classify, nonvanishing_select,
    random_split_datum, verification_report,
)

DEFAULT_SEED = 20240917


# ---------------------------------------------------------------------------
# newform data
# ---------------------------------------------------------------------------

class NewformSchemaError(ValueError):
    pass


@dataclass(frozen=True)
class NewformData:
    label: str
    k: int
    N: int
    chi_modulus: int = 1
    chi_values: tuple = ()   # ((residue, value), ...); empty for the trivial character
    ap: tuple = ()           # ((p, a_p), ...)

    def chi(self, p: int) -> Fraction:
        if self.chi_modulus == 1 or not self.chi_values:
            return Fraction(1)
        table = dict(self.chi_values)
        r = p % self.chi_modulus
        if r not in table:
            raise NewformSchemaError(f"{self.label}: no character value for residue {r} mod {self.chi_modulus}")
        return table[r]

    def ap_dict(self) -> dict:
        return dict(self.ap)

    def hecke(self, p: int) -> HeckePoly:
        aps = self.ap_dict()
        if p not in aps:
            raise KeyError(f"{self.label}: a_p missing for p = {p}")
        return satake_from_hecke(aps[p], p, self.k, self.chi(p), self.N)


def _frac(x, what: str) -> Fraction:
    if isinstance(x, bool):
        raise NewformSchemaError(f"{what}: expected a rational number, got {x!r}")
    try:
        return Fraction(x) if not isinstance(x, float) else Fraction(str(x))
    except (TypeError, ValueError):
        raise NewformSchemaError(f"{what}: expected a rational number, got {x!r}") from None


def _int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise NewformSchemaError(f"{what}: expected an integer, got {x!r}")
    return x


def deligne_ok(ap: Fraction, p: int, k: int) -> bool:
    """|a_p| <= 2 p^((k-1)/2), decided exactly by squaring."""
    return ap * ap <= 4 * Fraction(p) ** (k - 1)


def parse_newform(doc: dict, source: str = "<data>") -> NewformData:
    if not isinstance(doc, dict):
        raise NewformSchemaError(f"{source}: top level must be an object")
    missing = [key for key in ("label", "k", "N", "chi", "ap") if key not in doc]
    if missing:
        raise NewformSchemaError(f"{source}: missing field(s) {', '.join(missing)}")
    label = str(doc["label"])
    k = _int(doc["k"], f"{source}: k")
    N = _int(doc["N"], f"{source}: N")
    if k < 1 or N < 1:
        raise NewformSchemaError(f"{source}: weight and level must be positive")
    chi = doc["chi"]
    modulus, values = 1, ()
    if chi != "trivial":
        if not isinstance(chi, dict) or "modulus" not in chi or "values" not in chi:
            raise NewformSchemaError(f"{source}: chi must be \"trivial\" or {{modulus, values}}")
        modulus = _int(chi["modulus"], f"{source}: chi.modulus")
        if modulus < 1 or N % modulus:
            raise NewformSchemaError(f"{source}: character modulus {modulus} must divide N = {N}")
        raw = chi["values"]
        if raw != "trivial":
            items = raw.items() if isinstance(raw, dict) else raw
            table = {}
            for entry in items:
                try:
                    r, v = entry
                except (TypeError, ValueError):
                    raise NewformSchemaError(f"{source}: chi.values entries are [residue, value] pairs") from None
                val = _frac(v, f"{source}: chi value at {r} (only rational values are supported)")
                if abs(val) != 1:
                    raise NewformSchemaError(f"{source}: chi value at {r} must be +1 or -1 for a rational character")
                table[int(r) % modulus] = val
            values = tuple(sorted(table.items()))
    aps = doc["ap"]
    if not isinstance(aps, list) or not aps:
        raise NewformSchemaError(f"{source}: ap must be a nonempty list of [p, a_p] pairs")
    seen = {}
    for entry in aps:
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise NewformSchemaError(f"{source}: ap entries are [p, a_p] pairs, got {entry!r}")
        p = _int(entry[0], f"{source}: prime")
        if not is_prime(p):
            raise NewformSchemaError(f"{source}: {p} is not prime")
        if N % p == 0:
            raise NewformSchemaError(f"{source}: p = {p} divides the level N = {N}")
        if p in seen:
            raise NewformSchemaError(f"{source}: duplicate entry for p = {p}")
        a = _frac(entry[1], f"{source}: a_{p}")
        if not deligne_ok(a, p, k):
            warnings.warn(f"{label}: a_{p} = {a} violates the Deligne bound 2 p^((k-1)/2)", stacklevel=2)
        seen[p] = a
    nf = NewformData(label, k, N, modulus, values, tuple(sorted(seen.items())))
    for p in seen:
        if modulus > 1 and values and p % modulus not in dict(values):
            raise NewformSchemaError(f"{source}: no character value for residue {p % modulus} mod {modulus}")
    return nf


def ingest_newform(path) -> NewformData:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise NewformSchemaError(f"{path}: not valid JSON ({exc})") from None
    return parse_newform(doc, str(path))


# ---------------------------------------------------------------------------
# Euler factor cache
# ---------------------------------------------------------------------------

class EulerCache:
    """Single JSON document keyed by 'labels|p|kind'; written by atomic replacement."""

    def __init__(self, path=None):
        self.path = Path(path) if path else None
        self._data: dict = {}
        self.hits = 0
        self.misses = 0
        if self.path and self.path.exists():
            self._data = json.loads(self.path.read_text())

    @staticmethod
    def key(labels, p: int, kind: str) -> str:
        return f"{','.join(labels)}|{p}|{kind}"

    def get_or_compute(self, labels, p: int, kind: str, compute) -> RatFnX:
        k = self.key(labels, p, kind)
        if k in self._data:
            self.hits += 1
            return RatFnX.parse(self._data[k])
        self.misses += 1
        value = compute()
        self._data[k] = value.serialize()
        return value

    def raw(self, labels, p: int, kind: str) -> str | None:
        return self._data.get(self.key(labels, p, kind))

    def flush(self) -> None:
        if not self.path:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=self.path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(self._data, fh, indent=1, sort_keys=True)
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


# ---------------------------------------------------------------------------
# configs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZetaVerifyConfig:
    variant: int = 1
    q: int = 3
    order: int = 10
    samples: int = 5
    seed: int = DEFAULT_SEED
    N: int = 40


@dataclass(frozen=True)
class GoodPlacesConfig:
    q: int = 3
    samples: int = 1000
    seed: int = DEFAULT_SEED
    w: int = 0


@dataclass(frozen=True)
class LValueConfig:
    s: Fraction = Fraction(2)
    prime_cut: int = 50
    prec: int = 128
    cache: str | None = None


@dataclass(frozen=True)
class EisensteinConfig:
    ell: int = 4
    phi: str = "1"
    q: int = 3
    Bs: tuple = ()


@dataclass(frozen=True)
class FECheckConfig:
    kappas: tuple = ((4, 4, 4),)
    w: int = 0
    epsilon: str = "displayed"


@dataclass
class Report:
    command: str
    ok: bool
    data: dict = field(default_factory=dict)
    lines: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# subcommand engines (pure functions returning reports)
# ---------------------------------------------------------------------------

def run_zeta_verify(cfg: ZetaVerifyConfig) -> Report:
    rng = random.Random(cfg.seed)
    rows, ok = [], True
    lines = [f"zeta-verify variant={cfg.variant} q={cfg.q} order={cfg.order} samples={cfg.samples} seed={cfg.seed}"]
    for i in range(cfg.samples):
        D = random_split_datum(rng, cfg.q)
        rep = verification_report(cfg.variant, D, cfg.order, cfg.N)
        rows.append(rep)
        ok &= rep["verdict"]
        lines.append(f"  sample {i}: reduced={'agree' if rep['agree_reduced'] else 'DISAGREE'} "
                     f"oracle={'agree' if rep['agree_oracle'] else 'DISAGREE'}")
    if not ok:
        lines.append("FAILED invariant: oracle = reduced = closed form")
    return Report("zeta-verify", ok, {"config": asdict(cfg), "samples": rows}, lines)


_SMALL = [Fraction(x) for x in (1, -1, 2, -2, 3, -3)] + [Fraction(1, 2), Fraction(-1, 3), Fraction(1, 3)]


def random_good_place_datum(rng: random.Random, q: int, w: int) -> TripleLocalDatum:
    """Random split datum biased towards the degenerate configurations of the dichotomy."""
    t = ScalarK.q_power(q, -w)
    mode = rng.random()
    sat = []
    for _ in range(3):
        a = K(rng.choice(_SMALL))
        if mode < 0.5 and rng.random() < 0.5:
            a = a * t
        b = K(rng.choice(_SMALL))
        if mode < 0.5 and rng.random() < 0.4:
            b = -a
        sat.append(SatakeGL2(a, b, q))
    if mode < 0.25:
        # force one product onto the target
        s1, s2, s3 = sat
        sat[0] = SatakeGL2(t / (s2.beta * s3.beta), s1.beta, q)
    return TripleLocalDatum("split", tuple(sat), q, w)


def run_goodplaces(cfg: GoodPlacesConfig) -> Report:
    rng = random.Random(cfg.seed)
    counts = {"case1": 0, "case2": 0, "precondition": 0}
    mismatches, selection_failures, ok = 0, 0, True
    m_choices = [Fraction(-cfg.w, 2), Fraction(1 - cfg.w, 2), Fraction(2 - cfg.w, 2)]
    for _ in range(cfg.samples):
        D = random_good_place_datum(rng, cfg.q, cfg.w)
        try:
            verdict = good_place_classify(D)
        except ValueError:
            counts["precondition"] += 1
            continue
        counts[f"case{verdict.case}"] += 1
        if verdict.case != brute_force_case(D):
            mismatches += 1
        if verdict.case == 1:
            try:
                nonvanishing_select(D, rng.choice(m_choices))
            except InternalConsistencyError:
                selection_failures += 1
    ok = mismatches == 0 and selection_failures == 0
    lines = [f"goodplaces q={cfg.q} w={cfg.w} samples={cfg.samples} seed={cfg.seed}",
             f"  case 1: {counts['case1']}  case 2: {counts['case2']}  skipped (omega = q^-w): {counts['precondition']}",
             f"  classifier vs exhaustive scan mismatches: {mismatches}",
             f"  vanishing selected products: {selection_failures}"]
    if not ok:
        lines.append("FAILED invariant: exactly one certified case, nonzero selected product")
    return Report("goodplaces", ok, {"config": asdict(cfg), "counts": counts, "mismatches": mismatches,
                                     "selection_failures": selection_failures}, lines)


def run_critical(kappas, w: int) -> Report:
    W = ArchWeightData(tuple(kappas), w)
    closed = sorted(critical_points(W, "closed-form"))
    poles = sorted(critical_points(W, "pole-based"))
    ok = closed == poles
    fmt = [str(x) for x in closed]
    lines = [f"critical points for kappa={list(map(list, kappas))}, w={w}: {{{', '.join(fmt)}}}"]
    if not ok:
        lines.append("FAILED invariant: closed-form and pole-based critical sets differ")
    return Report("critical", ok, {"closed_form": fmt, "pole_based": [str(x) for x in poles]}, lines)


def run_fe_check(cfg: FECheckConfig) -> Report:
    W = ArchWeightData(tuple(cfg.kappas), cfg.w)
    d = len(cfg.kappas)
    crit = sorted(critical_points(W, "pole-based"))
    rows, ok = [], True
    lines = [f"fe-check kappa={list(map(list, cfg.kappas))} w={cfg.w} epsilon={cfg.epsilon}"]
    for s in crit:
        m = int(s - Fraction(1, 2))
        eps = None
        if cfg.epsilon == "tate":
            if d != 1:
                raise click.UsageError("--epsilon tate is implemented for one real place")
            eps = tate_epsilon(cfg.kappas[0])
        v = arch_gamma_ratio_check(W, m, d, epsilon=eps)
        rows.append({"m": m, "exponent": str(v.exponent), "expected": v.expected,
                     "remainder": v.remainder.serialize(), "passed": v.passed})
        ok &= v.passed
        lines.append(f"  m={m}: (2 pi i)-exponent {v.exponent} (expected {v.expected}), "
                     f"remainder {v.remainder.serialize()} -> {'ok' if v.passed else 'FAIL'}")
    for ident in KNOWN_IDENTITIES:
        m = int(crit[0] - Fraction(1, 2)) if crit else 0
        v = ledger_check(ident, d=d, w=cfg.w, m=m, kappa=cfg.kappas[0])
        rows.append({"identity": ident, "passed": bool(v)})
        ok &= bool(v)
        lines.append(f"  ledger {ident}: {'ok' if v else 'FAIL'}")
    if not ok:
        lines.append("FAILED invariant: gamma ratio lies in (2 pi i)^(8dm+4dw) Q^x")
    return Report("fe-check", ok, {"config": asdict(cfg), "rows": rows}, lines)


# positive-definite, det 1; the first ten reduce mod 3 to the support of the variant-1 transform,
# the next two to the variant-2 one; the last three are not positive definite
DEFAULT_BS = (
    (2, -3, 0, 6, -2, 3), (2, -3, 0, 6, 2, 3), (2, 0, -3, 3, -2, 6), (2, 0, -3, 3, 2, 6),
    (2, 0, 3, 3, -2, 6), (2, 0, 3, 3, 2, 6), (2, 3, 0, 6, -2, 3), (2, 3, 0, 6, 2, 3),
    (5, -3, -3, 3, 4, 6), (5, -3, -3, 6, 4, 3),
    (3, -4, -4, 6, 5, 6), (3, 2, 4, 6, 1, 6),
    (1, 0, 0, 1, 0, -1), (0, 0, 0, 0, 0, 0), (1, 2, 0, 1, 0, 1),
)


def phi_for(name: str, q: int) -> SchwartzSym3:
    if name in ("1", "2"):
        return build_phi(int(name), q)
    if name == "unit":
        ball = ShellFunction.ball(q, 0)
        return SchwartzSym3.product({e: ball for e in ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))})
    raise click.BadParameter(f"unknown Schwartz function {name!r}")


def run_eisenstein(cfg: EisensteinConfig) -> Report:
    Phi = phi_for(cfg.phi, cfg.q)
    pre = holomorphy_precheck(Phi, cfg.ell, 3, (-1) ** cfg.ell)
    lines = [f"eisenstein ell={cfg.ell} phi={cfg.phi} q={cfg.q}",
             f"  holomorphy precheck: {'passes' if pre else 'fails: ' + '; '.join(pre.reasons)}"]
    if not pre:
        return Report("eisenstein", False, {"precheck": False, "reasons": list(pre.reasons)}, lines)
    Bs = cfg.Bs or DEFAULT_BS
    keep, rows = [], []
    for six in Bs:
        B = sym_from_six(six)
        dB = det(B)
        if dB != 0 and is_positive_definite(B):
            bad = [r for r in range(2, 50) if is_prime(r) and r != cfg.q and dB % r == 0]
            if bad:
                lines.append(f"  B={list(six)}: skipped (det divisible by {bad})")
                continue
        keep.append(B)
    table = coefficient_table(cfg.ell, keep, (cfg.q, Phi))
    for row in table:
        val = ExactScalar.parse(row["value"])
        E, rest = val.split_two_pi_i() if not val.is_zero() else (None, val)
        row["two_pi_i_exponent"] = None if E is None else str(E)
        row["rational_remainder"] = rest.serialize()
        rows.append(row)
        lines.append(f"  B={row['B']}: {row['value']}" + ("" if E is None else f"  [(2 pi i)^{E}]"))
    return Report("eisenstein", True, {"config": {**asdict(cfg), "Bs": [list(b) for b in Bs]}, "rows": rows}, lines)


def unitary_scales(forms, p: int):
    return tuple(ScalarK.q_power(p, -(f.k - 1)) for f in forms)


def triple_factor(forms, p: int, cache: EulerCache | None = None) -> RatFnX:
    labels = [f.label for f in forms]

    def compute():
        return asai_lfactor_companion([f.hecke(p) for f in forms], unitary_scales(forms, p))

    if cache is None:
        return compute()
    return cache.get_or_compute(labels, p, "triple-unitary", compute)


def unitary_moduli(P: HeckePoly) -> tuple[mpmath.mpf, mpmath.mpf, bool]:
    """(min, max) of |root| / p^((k-1)/2) and whether the answer is exact (both equal to 1)."""
    if P.discriminant <= 0 and P.det > 0:
        return mpmath.mpf(1), mpmath.mpf(1), True
    roots = mpmath.polyroots([1, -_mpf(P.trace), _mpf(P.det)], maxsteps=200, extraprec=200)
    scale = mpmath.mpf(P.p) ** (mpmath.mpf(P.weight - 1) / 2)
    mods = [abs(r) / scale for r in roots]
    return min(mods), max(mods), False


def ks_bound_check(forms, p: int) -> dict:
    """q^{-1/2} < |a1 a2 a3| < q^{1/2} for the unitary Satake products at p."""
    lo, hi, exact = mpmath.mpf(1), mpmath.mpf(1), True
    for f in forms:
        a, b, e = unitary_moduli(f.hecke(p))
        lo, hi, exact = lo * a, hi * b, exact and e
    bound = mpmath.sqrt(p)
    return {"p": p, "ok": bool(hi < bound and lo > 1 / bound), "exact": exact,
            "max_modulus": mpmath.nstr(hi, 12), "min_modulus": mpmath.nstr(lo, 12)}


def _mpf(x: Fraction) -> mpmath.mpf:
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def eval_ratfn(f: RatFnX, x: mpmath.mpf):
    dps = mpmath.mp.dps
    num = sum((c.to_mpc(dps) * x ** i for i, c in enumerate(f.num)), mpmath.mpc(0))
    den = sum((c.to_mpc(dps) * x ** i for i, c in enumerate(f.den)), mpmath.mpc(0))
    return num / den * x ** f.shift


def tail_bound(P: int, sigma: Fraction, theta: Fraction = Fraction(1, 2)) -> mpmath.mpf:
    """Bound for |log L - log L_P| from eight Satake products of size < p^theta at each p > P."""
    a = _mpf(sigma) - _mpf(theta)
    if a <= 1:
        raise ValueError("the point lies outside the range of absolute convergence guaranteed by the KS bound")
    Pm = mpmath.mpf(P)
    return 8 * Pm ** (1 - a) / ((a - 1) * (1 - Pm ** (-a)))


def partial_lvalue(forms, s: Fraction, P: int, cache: EulerCache | None = None):
    """prod over p <= P, p coprime to the levels, of the unitary triple Euler factors at s."""
    val = mpmath.mpc(1)
    used = []
    for p in range(2, P + 1):
        if not is_prime(p) or any(f.N % p == 0 for f in forms):
            continue
        for f in forms:
            if p not in f.ap_dict():
                raise KeyError(f"{f.label}: a_p missing for p = {p} (needed up to the prime cut {P})")
        x = mpmath.mpf(p) ** (-_mpf(s))
        val *= eval_ratfn(triple_factor(forms, p, cache), x)
        used.append(p)
    return val, used


def run_lvalue(forms, cfg: LValueConfig) -> Report:
    if len(forms) == 1:
        forms = forms * 3
    if len(forms) != 3:
        raise click.UsageError("give one newform (used three times) or three newforms")
    cache = EulerCache(cfg.cache)
    s, P = Fraction(cfg.s), cfg.prime_cut
    listed = set.intersection(*[set(f.ap_dict()) for f in forms])
    ks_rows = [ks_bound_check(forms, p) for p in sorted(listed)]
    ks_ok = all(r["ok"] for r in ks_rows)
    with mpmath.workprec(cfg.prec):
        tail = tail_bound(P, s)
        v1, used1 = partial_lvalue(forms, s, P, cache)
        v2, used2 = partial_lvalue(forms, s, 2 * P, cache)
        value_bound = abs(v1) * (mpmath.e ** tail - 1)
        diff = abs(v2 - v1)
        stable = bool(diff < value_bound)
        ndig = max(15, int(cfg.prec * 0.3))
        data = {
            "forms": [f.label for f in forms], "s": str(s), "prime_cut": P, "precision_bits": cfg.prec,
            "value": mpmath.nstr(v1.real, ndig), "value_imag": mpmath.nstr(v1.imag, 5),
            "value_doubled_cut": mpmath.nstr(v2.real, ndig), "difference": mpmath.nstr(diff, 8),
            "log_tail_bound": mpmath.nstr(tail, 8), "value_tail_bound": mpmath.nstr(value_bound, 8),
            "primes_used": used1, "ks": ks_rows, "ks_ok": ks_ok, "doubling_stable": stable,
            "cache": {"hits": cache.hits, "misses": cache.misses},
        }
    cache.flush()
    ok = ks_ok and stable
    lines = [f"lvalue {'x'.join(data['forms'])} at s={s}, primes <= {P} (coprime to the levels)",
             f"  Kim-Shahidi bound at {len(ks_rows)} listed primes: {'ok' if ks_ok else 'FAIL'}",
             f"  partial L-value: {data['value']}",
             f"  tail bound |L - L_P| <= {data['value_tail_bound']}",
             f"  prime cut {2 * P}: {data['value_doubled_cut']}  (difference {data['difference']}: "
             f"{'within' if stable else 'EXCEEDS'} the bound)"]
    if not ks_ok:
        lines.append("FAILED invariant: Kim-Shahidi bound")
    if not stable:
        lines.append("FAILED invariant: doubling the prime cut stays within the tail bound")
    return Report("lvalue", ok, data, lines)


def parse_satake(text: str, q: int) -> TripleLocalDatum:
    parts = [p for p in text.split(";") if p.strip()]
    if len(parts) != 3:
        raise click.BadParameter("expected three pairs 'a1,b1;a2,b2;a3,b3'")
    sat = []
    for part in parts:
        a, b = (Fraction(x.strip()) for x in part.split(","))
        sat.append(SatakeGL2(K(a), K(b), q))
    return TripleLocalDatum("split", tuple(sat), q)


def parse_kappa(values) -> tuple:
    out = []
    for v in values:
        ks = tuple(int(x) for x in v.split(","))
        if len(ks) != 3:
            raise click.BadParameter(f"weights come in triples, got {v!r}")
        out.append(ks)
    return tuple(out)


# ---------------------------------------------------------------------------
# click wiring
# ---------------------------------------------------------------------------

def _emit(report: Report, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps({"command": report.command, "ok": report.ok, **report.data},
                              indent=2, sort_keys=True, default=str))
    else:
        for line in report.lines:
            click.echo(line)
        click.echo("PASS" if report.ok else "FAIL")
    sys.exit(0 if report.ok else 1)


json_option = click.option("--json", "as_json", is_flag=True, help="Emit a machine-readable JSON report.")
seed_option = click.option("--seed", default=DEFAULT_SEED, show_default=True, help="Seed for randomized suites.")


@click.group()
def main():
    """Exact local factors, zeta integrals and L-value numerics for triple products."""


@main.command()
@click.option("--newform", "newforms", multiple=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--p", "p", type=int, help="Prime for the newform path.")
@click.option("--satake", help="Satake data 'a1,b1;a2,b2;a3,b3' (rational).")
@click.option("--q", type=int, default=3, show_default=True)
@click.option("--cache", type=click.Path(dir_okay=False))
@json_option
def lfactor(newforms, p, satake, q, cache, as_json):
    """Degree-8 local factor from Satake data or from Hecke polynomials."""
    if satake:
        D = parse_satake(satake, q)
        f = asai_lfactor(D)
        rep = Report("lfactor", True, {"q": q, "factor": f.serialize(), "degree": len(f.den) - 1},
                     [f"L(s) at q={q}: {f.serialize()}"])
    else:
        if not newforms or p is None:
            raise click.UsageError("give --satake, or --newform (once or three times) with --p")
        forms = [ingest_newform(x) for x in newforms]
        forms = forms * 3 if len(forms) == 1 else forms
        c = EulerCache(cache)
        f = triple_factor(forms, p, c)
        c.flush()
        rep = Report("lfactor", True, {"p": p, "factor": f.serialize(), "degree": len(f.den) - 1},
                     [f"unitary triple factor at p={p}: {f.serialize()}"])
    _emit(rep, as_json)


@main.command()
@click.option("--kappa", multiple=True, required=True, help="Weights 'k1,k2,k3' at one real place (repeatable).")
@click.option("--w", type=int, default=0, show_default=True)
@json_option
def critical(kappa, w, as_json):
    """Critical half-integers, by the closed form and by pole inspection."""
    _emit(run_critical(parse_kappa(kappa), w), as_json)


@main.command("zeta-verify")
@click.option("--variant", type=click.Choice(["1", "2"]), default="1", show_default=True)
@click.option("--q", type=int, default=3, show_default=True)
@click.option("--order", type=int, default=10, show_default=True)
@click.option("--samples", type=int, default=5, show_default=True)
@click.option("--trunc", "N", type=int, default=40, show_default=True, help="Shell range bound N.")
@seed_option
@json_option
def zeta_verify(variant, q, order, samples, N, seed, as_json):
    """Three-way agreement of the explicit local zeta integrals."""
    _emit(run_zeta_verify(ZetaVerifyConfig(int(variant), q, order, samples, seed, N)), as_json)


@main.command()
@click.option("--q", type=int, default=3, show_default=True)
@click.option("--w", type=int, default=0, show_default=True)
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--satake", help="Classify one datum 'a1,b1;a2,b2;a3,b3' instead of a random suite.")
@click.option("--m", "m", help="With --satake: also select the nonvanishing product at this m.")
@seed_option
@json_option
def goodplaces(q, w, samples, satake, m, seed, as_json):
    """Good-place dichotomy and nonvanishing selection."""
    if satake:
        D = parse_satake(satake, q)
        D = TripleLocalDatum("split", D.satake, q, w)
        v = good_place_classify(D)
        data = v.to_dict()
        lines = [f"case {v.case}" + (f", witness perm={list(v.witness[0])} swaps={list(v.witness[1])}" if v.witness else "")]
        if m is not None and v.case == 1:
            c = nonvanishing_select(D, Fraction(m))
            data.update({"product": c.which, "gamma": c.gamma, "value": c.value.serialize()})
            lines.append(f"  product {c.which} (gamma = {c.gamma}) = {c.value.serialize()}")
        _emit(Report("goodplaces", True, data, lines), as_json)
        return
    _emit(run_goodplaces(GoodPlacesConfig(q, samples, seed, w)), as_json)


@main.command()
@click.option("--ell", type=int, default=4, show_default=True)
@click.option("--phi", type=click.Choice(["1", "2", "unit"]), default="1", show_default=True)
@click.option("--q", type=int, default=3, show_default=True)
@click.option("--B", "Bs", multiple=True, help="Six entries 'b11,b12,b13,b22,b23,b33' (repeatable).")
@json_option
def eisenstein(ell, phi, q, Bs, as_json):
    """Fourier coefficients of the Siegel Eisenstein series at one ramified place."""
    six = tuple(tuple(Fraction(x) for x in b.split(",")) for b in Bs)
    _emit(run_eisenstein(EisensteinConfig(ell, phi, q, six)), as_json)


@main.command("fe-check")
@click.option("--kappa", multiple=True, default=("4,4,4",), show_default=True)
@click.option("--w", type=int, default=0, show_default=True)
@click.option("--epsilon", type=click.Choice(["displayed", "tate"]), default="displayed", show_default=True)
@json_option
def fe_check(kappa, w, epsilon, as_json):
    """Archimedean gamma-ratio and period-ledger bookkeeping."""
    _emit(run_fe_check(FECheckConfig(parse_kappa(kappa), w, epsilon)), as_json)


@main.command()
@click.option("--newform", "newforms", multiple=True, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--s", "s", default="2", show_default=True, help="Real rational point with s > 3/2.")
@click.option("--prime-cut", type=int, default=50, show_default=True)
@click.option("--prec", type=int, default=128, show_default=True, help="Binary precision.")
@click.option("--cache", type=click.Path(dir_okay=False))
@json_option
def lvalue(newforms, s, prime_cut, prec, cache, as_json):
    """Partial triple product L-value with a Kim-Shahidi tail bound."""
    forms = [ingest_newform(x) for x in newforms]
    _emit(run_lvalue(forms, LValueConfig(Fraction(s), prime_cut, prec, cache)), as_json)


@main.command()
@click.option("--newform", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--p", "p", type=int, required=True)
@click.option("--chi", "chi", default="1", show_default=True, help="Twist value chi(p) (rational).")
@click.option("--samples", type=int, default=8, show_default=True)
@seed_option
@json_option
def sym3(newform, p, chi, samples, seed, as_json):
    """Cube factorization of the triple factor of (f, f, f (x) chi)."""
    f = ingest_newform(newform)
    chi_v = Fraction(chi)
    comp = sym3_companion_check(f.hecke(p), chi_v)
    generic = sym3_factor_check(SatakeGL2(K(2), K(3), p), K(chi_v), samples, random.Random(seed))
    ok = comp.passed and generic.passed
    data = {"p": p, "degrees": [8, 4, 2], "companion": comp.passed, "identity": generic.passed,
            "triple": comp.triple.serialize(), "sym3": comp.sym3.serialize(), "twisted": comp.twisted.serialize()}
    lines = [f"sym3 {f.label} at p={p}, chi(p)={chi_v}",
             f"  degree 8 = 4 + 2*2 from the Hecke polynomial: {'holds' if comp.passed else 'FAILS'}",
             f"  polynomial identity on {samples} random specializations: {'holds' if generic.passed else 'FAILS'}"]
    if not ok:
        lines.append("FAILED invariant: triple factor = Sym^3 factor x twisted factor^2")
    _emit(Report("sym3", ok, data, lines), as_json)


if __name__ == "__main__":  # pragma: no cover
    main()
