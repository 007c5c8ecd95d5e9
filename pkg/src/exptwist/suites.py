"""Verification suites: grid construction, case evaluation and report emission.

A suite turns a GridConfig into a VerificationReport.  Every case is either
hard (its failure makes the run fail) or monitored (reported only).
"""

from __future__ import annotations

import configparser
import csv
import io
import itertools
import json
import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .arith import FactoredModulus, divisors, is_prime, units
from .bessel import SpectralParams, bessel_kernel
from .characters import character, primitive_characters
from .charsums import (
    CharSumInstance,
    CorrelationInstance,
    c1_bruteforce,
    c1_factored,
    c2_bruteforce,
    c2_factored,
    c_zero_bound,
    correlation_C,
    correlation_scan,
)
from .delta import STUBS, delta_eval, dfi_weight_for, rearrangement_check
from .errors import ConfigInvalid, InvariantViolation
from .expsums import (
    TraceFunctionParams,
    cancellation_rows,
    finite_fourier,
    l_hat_closed_form,
    l_table,
    plancherel_shift,
    z_definitional,
    z_transform,
)
from .transforms import (
    DecayConfig,
    OscParams,
    RIntegral,
    frak_J,
    gamma_pm,
    h_decay_scan,
    resonant_x,
    stationary_phase_psi0,
    toy_params,
    w_dagger,
    w_dagger_localization,
)
from .voronoi import gl2_voronoi_check, psi_asymptotic, psi_transform, voronoi_phi
from .weights import plateau

log = logging.getLogger(__name__)

SUITES = ("charsum", "delta", "cancellation", "voronoi-gl2", "decay", "transforms")

DEFAULT_PAIRS = ((3, 5), (5, 3), (5, 7), (7, 5), (11, 3), (3, 11))


# --- configuration --------------------------------------------------------------

@dataclass(frozen=True)
class GridConfig:
    prime_pairs: tuple = DEFAULT_PAIRS
    q_values: tuple = (1, 2, 4)
    r_values: tuple = (1, 2)
    n2_values: tuple = (1, 2, 3)
    m_values: tuple = (1, 2)
    char_pairs: tuple | None = None  # (j1, j2) primitive-root exponents; None means all primitive
    correlation: bool = True
    q1_values: tuple = (1, 2, 3)

    delta_Q: tuple = (10.0, 20.0, 31.0)
    n_range: tuple = (-20, 20)
    stubs: tuple = ("one", "rational", "dfi")
    delta_eval_Q: float = 40.0

    cancellation_moduli: tuple = tuple(p for p in range(5, 98) if is_prime(p))
    cancellation_tuples: int = 50
    degenerate_tuples: int = 3
    identity_moduli: tuple = (3, 5, 7, 11, 13)
    identity_tuples: int = 20
    soft_threshold: float = 10.0
    seed: int = 0

    voronoi_c_max: int = 5
    voronoi_N: tuple = (20.0, 30.0, 40.0, 50.0)
    coeff_budget: int = 20_000

    toy_N: float = 1e4
    toy_M1: int = 10
    toy_M2: int = 3
    toy_C: float = 4.0

    tolerance: float | None = None
    jobs: int = 1

    def tol(self, default: float) -> float:
        return default if self.tolerance is None else self.tolerance

    def validate(self) -> "GridConfig":
        problems: dict[str, str] = {}
        for M1, M2 in self.prime_pairs:
            if M1 == M2:
                problems["prime_pairs"] = f"M1 = M2 = {M1}; the two primes must be distinct"
            elif not (is_prime(M1) and is_prime(M2) and M1 > 2 and M2 > 2):
                problems["prime_pairs"] = f"({M1}, {M2}) must be odd primes"
        if self.char_pairs is not None:
            for j1, j2 in self.char_pairs:
                if j1 < 0 or j2 < 0:
                    problems["char_pairs"] = "character indices must be non-negative"
        for name in ("q_values", "r_values", "n2_values", "m_values", "q1_values"):
            if any(v < 1 for v in getattr(self, name)):
                problems[name] = "entries must be positive integers"
        lo, hi = self.n_range
        if lo > hi:
            problems["n_range"] = f"empty range {lo}:{hi}"
        if any(Q < 2 for Q in self.delta_Q) or self.delta_eval_Q < 2:
            problems["delta_Q"] = "Q must be at least 2"
        unknown = sorted(set(self.stubs) - set(STUBS))
        if unknown:
            problems["stubs"] = f"unknown stub(s) {unknown}; choose from {sorted(STUBS)}"
        bad = [p for p in self.cancellation_moduli + self.identity_moduli if not (is_prime(p) and p > 2)]
        if bad:
            problems["cancellation_moduli"] = f"not odd primes: {bad}"
        if self.cancellation_tuples < 1 or self.identity_tuples < 1 or self.degenerate_tuples < 0:
            problems["cancellation_tuples"] = "tuple counts must be positive"
        if self.voronoi_c_max < 1 or any(N <= 0 for N in self.voronoi_N):
            problems["voronoi"] = "need c_max >= 1 and N > 0"
        if not 1 <= self.coeff_budget <= 100_000:
            problems["coeff_budget"] = "must lie in [1, 100000]"
        try:
            p = self.toy_params()
            if not 5 <= p.Q / p.C <= 50:
                problems["toy"] = f"Q/C = {p.Q / p.C:.3g} must lie in [5, 50]"
        except ValueError as exc:
            problems["toy"] = str(exc)
        if self.tolerance is not None and not self.tolerance > 0:
            problems["tolerance"] = "must be positive"
        if self.jobs < 1:
            problems["jobs"] = "must be at least 1"
        if problems:
            raise ConfigInvalid(problems)
        return self

    def toy_params(self) -> OscParams:
        return toy_params(N=self.toy_N, M1=self.toy_M1, M2=self.toy_M2, C=self.toy_C)

    def echo(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = _plain(v)
        return out


def _plain(v):
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _parse_list(text: str, kind):
    text = text.strip()
    if not text:
        return ()
    return tuple(kind(x) for x in text.split(","))


def _parse_pairs(text: str) -> tuple:
    out = []
    for item in text.split(","):
        a, _, b = item.strip().partition(":")
        out.append((int(a), int(b)))
    return tuple(out)


def _parse_range(text: str) -> tuple:
    a, _, b = text.strip().partition(":")
    return (int(a), int(b))


def _parse_bool(text: str) -> bool:
    return configparser.ConfigParser.BOOLEAN_STATES[text.strip().lower()]


_PARSERS = {
    "prime_pairs": _parse_pairs,
    "char_pairs": _parse_pairs,
    "n_range": _parse_range,
    "stubs": lambda t: _parse_list(t, str.strip),
    "correlation": _parse_bool,
}


def _parser_for(name: str, default):
    if name in _PARSERS:
        return _PARSERS[name]
    if isinstance(default, tuple):
        kind = type(default[0]) if default else int
        return lambda t: _parse_list(t, kind)
    if isinstance(default, bool):
        return _parse_bool
    if isinstance(default, int):
        return int
    return float


def config_from_mapping(values: dict[str, str], base: GridConfig | None = None) -> GridConfig:
    """Apply string overrides (from a config file or flags) to a GridConfig."""
    base = GridConfig() if base is None else base
    known = {f.name: getattr(base, f.name) for f in fields(base)}
    updates, problems = {}, {}
    for key, text in values.items():
        name = key.strip().replace("-", "_")
        if name not in known:
            problems[name] = "unknown key"
            continue
        default = known[name]
        if default is None:
            default = {"char_pairs": (), "tolerance": 0.0}[name]
        try:
            updates[name] = _parser_for(name, default)(text)
        except (ValueError, KeyError) as exc:
            problems[name] = f"cannot parse {text!r}: {exc}"
    if problems:
        raise ConfigInvalid(problems)
    return replace(base, **updates)


def load_config(path: str | Path, suite: str | None = None) -> GridConfig:
    """INI file: the [grid] section, then the section named after the suite, override the defaults."""
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigInvalid({"config": str(exc)}) from exc
    merged: dict[str, str] = {}
    for section in ("grid", suite):
        if section and parser.has_section(section):
            merged.update(parser[section])
    return config_from_mapping(merged)


# --- reports ---------------------------------------------------------------------

def _num(x) -> float | int | bool | str | None:
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def make_case(check: str, inputs: dict, diff: float, tolerance: float, hard: bool = True,
              passed: bool | None = None, **values) -> dict:
    """A report row; complex values are split into _re/_im fields."""
    row = {"check": check, "inputs": inputs, "hard": hard, "tolerance": _num(tolerance), "diff": _num(diff)}
    for k, v in values.items():
        if isinstance(v, (complex, np.complexfloating)):
            row[f"{k}_re"], row[f"{k}_im"] = float(v.real), float(v.imag)
        else:
            row[k] = _num(v)
    row["pass"] = bool(diff <= tolerance) if passed is None else bool(passed)
    return row


@dataclass
class VerificationReport:
    suite: str
    config: dict
    cases: list = field(default_factory=list)
    skipped: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    numeric_failure: str | None = None

    @property
    def summary(self) -> dict:
        hard = [c for c in self.cases if c["hard"]]
        mon = [c for c in self.cases if not c["hard"]]
        return {
            "cases": len(self.cases),
            "hard": len(hard),
            "hard_failed": sum(not c["pass"] for c in hard),
            "monitored": len(mon),
            "monitored_flagged": sum(not c["pass"] for c in mon),
            "skipped": sum(self.skipped.values()),
        }

    @property
    def passed(self) -> bool:
        return self.numeric_failure is None and self.summary["hard_failed"] == 0

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "config": self.config,
            "summary": self.summary,
            "passed": self.passed,
            "numeric_failure": self.numeric_failure,
            "skipped": dict(sorted(self.skipped.items())),
            "notes": self.notes,
            "cases": self.cases,
        }


def _flatten(row: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v)
        else:
            out[key] = v
    return out


def render_report(reports: list[VerificationReport], fmt: str = "json") -> str:
    """Deterministic text for one or more suite reports."""
    if fmt == "json":
        body = reports[0].as_dict() if len(reports) == 1 else {
            "suites": {r.suite: r.as_dict() for r in reports},
            "passed": all(r.passed for r in reports),
        }
        return json.dumps(body, sort_keys=True, indent=1) + "\n"
    if fmt == "csv":
        rows = [{"suite": r.suite, **_flatten(c)} for r in reports for c in r.cases]
        header = sorted({k for row in rows for k in row})
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(reports: VerificationReport | list[VerificationReport], fmt: str, path: str | Path | None) -> str:
    if isinstance(reports, VerificationReport):
        reports = [reports]
    text = render_report(reports, fmt)
    if path is not None:
        Path(path).write_text(text)
    return text


def _pmap(fn, items: list, jobs: int) -> list:
    """Ordered map; results come back in input order whatever the degree of parallelism."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# --- charsum ------------------------------------------------------------------------

def _char_pairs(cfg: GridConfig, M1: int, M2: int):
    if cfg.char_pairs is None:
        return [(a, b) for a in primitive_characters(M1) for b in primitive_characters(M2)]
    return [(character(M1, j1), character(M2, j2)) for j1, j2 in cfg.char_pairs
            if j1 % (M1 - 1) and j2 % (M2 - 1)]


def _charsum_pair(args) -> tuple[list, Counter]:
    cfg, M1, M2 = args
    M = FactoredModulus(M1, M2)
    cases, skipped = [], Counter()
    tol = cfg.tol(1e-8)
    for chi1, chi2 in _char_pairs(cfg, M1, M2):
        for q, r in itertools.product(cfg.q_values, cfg.r_values):
            if math.gcd(q, M.M) != 1 or r >= min(M1, M2) or math.gcd(r, M.M) != 1:
                skipped["q or r not admissible for M"] += 1
                continue
            for n1 in divisors(q * r):
                if math.gcd(n1, M1) != 1:
                    skipped["gcd(n1, M1) > 1"] += 1
                    continue
                for n2, m, s_n, s_m in itertools.product(cfg.n2_values, cfg.m_values, (1, -1), (1, -1)):
                    try:
                        inst = CharSumInstance(n1, n2, m, q, r, M, chi1, chi2, s_n, s_m)
                    except InvariantViolation as exc:
                        skipped[str(exc)] += 1
                        continue
                    for name, brute, fact in (("c1-factorization", c1_bruteforce, c1_factored),
                                              ("c2-factorization", c2_bruteforce, c2_factored)):
                        b, f = brute(inst), fact(inst)
                        cases.append(make_case(name, inst.describe(), abs(b - f) / (1 + abs(b)), tol,
                                               brute=b, factored=f, abs_diff=abs(b - f)))
    return cases, skipped


def _correlation_pair(args) -> tuple[list, Counter]:
    cfg, M1, M2 = args
    M = FactoredModulus(M1, M2)
    cases, skipped = [], Counter()
    for chi1, chi2 in _char_pairs(cfg, M1, M2):
        for r in cfg.r_values:
            for q1, q2, q2p in itertools.product(cfg.q1_values, repeat=3):
                for n1 in divisors(q1 * r):
                    for m, mp, s_n, s_m in itertools.product(cfg.m_values, cfg.m_values, (1, -1), (1, -1)):
                        try:
                            ci = CorrelationInstance(M, chi1, chi2, n1, r, q1, q2, q2p, m, mp, 0, s_n, s_m)
                        except InvariantViolation as exc:
                            skipped[str(exc)] += 1
                            continue
                        cases.extend(_correlation_cases(cfg, ci))
    return cases, skipped


def _correlation_cases(cfg: GridConfig, ci: CorrelationInstance) -> list:
    d = correlation_scan(ci)
    M1, M2 = ci.M.M1, ci.M.M2
    inputs = ci.describe()
    inputs.pop("n2t")
    lhs = np.abs(d["C"])
    rhs = M1 * M1 * M2 * np.abs(d["C1"]) * np.abs(d["C2"])
    big = np.maximum(lhs, rhs)
    mask = (lhs > 1e-6) & (rhs > 1e-6)
    crt = float(np.max(np.abs(lhs - rhs)[mask] / big[mask])) if mask.any() else 0.0
    vanish = float(np.max(big[~mask])) if (~mask).any() else 0.0
    dl, dp = np.abs(d["D"]), d["D_pred"]
    dmask = np.maximum(dl, dp) > 1e-6
    dcrt = float(np.max(np.abs(dl - dp)[dmask] / np.maximum(dl, dp)[dmask])) if dmask.any() else 0.0
    route = max(float(np.max(np.abs(d["C2"] - d["C2_count"]))),
                float(np.max(np.abs(d["C2_star"] - d["C2_star_count"]))))
    trace = float(np.max(np.abs(d["C1"] - d["C1_trace"])))
    c20 = abs(d["C2"][0])
    out = [
        make_case("C2-route-equivalence", inputs, route, cfg.tol(1e-10)),
        make_case("C1-trace-route", inputs, trace, cfg.tol(1e-10)),
        # where one side is below 1e-6 the other must be too: both vanish together
        make_case("C-crt-factorization", inputs, max(crt, vanish if vanish > 1e-6 else 0.0), cfg.tol(1e-8),
                  rel_diff=crt, points=int(ci.period)),
        make_case("D-crt-factorization", inputs, dcrt, cfg.tol(1e-8)),
        make_case("periodicity", inputs, _period_gap(ci), cfg.tol(1e-12)),
    ]
    if ci.q2 != ci.q2p:
        out.append(make_case("C2-zero-frequency", inputs, c20, 1e-9, hard=False, abs_C2_0=c20))
    else:
        bound = c_zero_bound(ci)
        out.append(make_case("C2-zero-bound", inputs, c20 - bound, 1e-9, hard=False, abs_C2_0=c20, bound=bound))
    return out


def _period_gap(ci: CorrelationInstance) -> float:
    T = ci.period
    return max(abs(correlation_C(ci.with_n2t(k)) - correlation_C(ci.with_n2t(k + T))) for k in (1, 2))


def suite_charsum(cfg: GridConfig) -> VerificationReport:
    rep = VerificationReport("charsum", cfg.echo())
    pairs = [(cfg, M1, M2) for M1, M2 in cfg.prime_pairs]
    jobs = [(_charsum_pair, p) for p in pairs]
    if cfg.correlation:
        jobs += [(_correlation_pair, p) for p in pairs]
    skipped = Counter()
    for cases, sk in _pmap(_call, jobs, cfg.jobs):
        rep.cases.extend(cases)
        skipped.update(sk)
    rep.skipped = dict(skipped)
    exceptions = [c for c in rep.cases if c["check"] == "C2-zero-frequency" and not c["pass"]]
    if exceptions:
        rep.notes.append(f"{len(exceptions)} zero-frequency instances with q2 != q2' and C2(0) != 0")
    return rep


def _call(job):
    fn, arg = job
    return fn(arg)


# --- delta --------------------------------------------------------------------------

def _delta_task(args) -> list:
    cfg, M1, M2, Q, stub = args
    M = FactoredModulus(M1, M2)
    lo, hi = cfg.n_range
    n = np.arange(lo, hi + 1)
    lhs, rhs = rearrangement_check(n, Q, M, STUBS[stub](Q))
    tol = cfg.tol(1e-10)
    return [make_case("rearrangement", {"n": int(k), "Q": Q, "M1": M1, "M2": M2, "stub": stub},
                      abs(a - b), tol, lhs=complex(a), rhs=complex(b))
            for k, a, b in zip(n, lhs, rhs)]


def suite_delta(cfg: GridConfig) -> VerificationReport:
    rep = VerificationReport("delta", cfg.echo())
    tasks = [(cfg, M1, M2, float(Q), stub)
             for M1, M2 in cfg.prime_pairs for Q in cfg.delta_Q for stub in cfg.stubs]
    for cases in _pmap(_delta_task, tasks, cfg.jobs):
        rep.cases.extend(cases)
    Q = cfg.delta_eval_Q
    lo, hi = cfg.n_range
    tol = cfg.tol(1e-6)
    for n in range(lo, hi + 1):
        if abs(n) > Q * Q / 4:
            rep.skipped["|n| > Q^2/4"] = rep.skipped.get("|n| > Q^2/4", 0) + 1
            continue
        val = delta_eval(n, Q=Q)
        rep.cases.append(make_case("delta-symbol", {"n": n, "Q": Q}, abs(val - (n == 0)), tol, value=val))
    w = dfi_weight_for(Q)
    rep.notes.append(f"DFI weight: {w.params.bump.describe()}; normalization {w.normalization:.12g}")
    rep.notes.append("the zeta cutoff U is treated as part of the black-box weight")
    return rep


# --- cancellation -------------------------------------------------------------------

def _random_units(rng: np.random.Generator, p: int, k: int) -> list[int]:
    return [int(x) for x in rng.integers(1, p, size=k)]


def _identity_cases(cfg: GridConfig, p: int, rng: np.random.Generator) -> list:
    tol = cfg.tol(1e-10)
    out = []
    for chi in primitive_characters(p):
        for _ in range(cfg.identity_tuples):
            a, b, g, a2, b2, g2 = _random_units(rng, p, 6)
            eta = int(rng.integers(0, p))
            tp = TraceFunctionParams(chi, a, b, g, a2, b2, g2, eta)
            inputs = {"M1": p, "chi": list(chi.label), "alpha": a, "beta": b, "gamma": g,
                      "alpha2": a2, "beta2": b2, "gamma2": g2, "eta": eta}
            lhat = finite_fourier(l_table(a, b, p, chi))
            closed = np.array([l_hat_closed_form(a, b, v, chi) for v in range(p)])
            out.append(make_case("lhat-closed-form", inputs, float(np.max(np.abs(lhat - closed))), tol))
            z = z_transform(tp)
            out.append(make_case("z-closed-form", inputs, float(np.max(np.abs(z - z_definitional(tp)))), tol))
            lhs, rhs = plancherel_shift(tp)
            out.append(make_case("shifted-plancherel", inputs, abs(lhs - rhs), tol, lhs=lhs, rhs=rhs))
    return out


def _cancellation_modulus(args) -> tuple[list, list]:
    cfg, p = args
    rng = np.random.default_rng([cfg.seed, p])
    cases: list = []
    rows: list = []
    if p in cfg.identity_moduli:
        cases.extend(_identity_cases(cfg, p, rng))
    if p not in cfg.cancellation_moduli:
        return cases, rows
    chars = primitive_characters(p)
    made = 0
    while made < cfg.cancellation_tuples:
        chi = chars[int(rng.integers(0, len(chars)))]
        tp = TraceFunctionParams(chi, *_random_units(rng, p, 6))
        if tp.is_degenerate():
            continue
        made += 1
        rs = cancellation_rows(tp)
        worst = max(rs[1:], key=lambda row: row.ratio)
        rows.append(worst)
        cases.append(make_case("cancellation-ratio", _tuple_inputs(tp), worst.ratio, cfg.soft_threshold,
                               hard=False, eta=worst.eta, ratio=worst.ratio))
    for _ in range(cfg.degenerate_tuples):
        chi = chars[int(rng.integers(0, len(chars)))]
        a, b, g, b2 = _random_units(rng, p, 4)
        g2 = g * b * pow(b2, -1, p) % p
        tp = TraceFunctionParams(chi, a, b, g, a, b2, g2)
        rs = cancellation_rows(tp)
        rows.append(rs[0])
        size = abs(rs[0].value) / p
        cases.append(make_case("degenerate-magnitude", _tuple_inputs(tp), abs(math.log(size)) if size else math.inf,
                               math.log(3.0), hard=False, abs_over_M1=size))
    return cases, rows


def _tuple_inputs(tp: TraceFunctionParams) -> dict:
    return {"M1": tp.p, "chi": list(tp.chi1.label), "alpha": tp.alpha, "beta": tp.beta, "gamma": tp.gamma,
            "alpha2": tp.alpha2, "beta2": tp.beta2, "gamma2": tp.gamma2}


def suite_cancellation(cfg: GridConfig) -> tuple[VerificationReport, list]:
    """The report plus one row per tuple for the CSV export: the worst eta != 0 for
    generic tuples, eta = 0 for degenerate ones."""
    rep = VerificationReport("cancellation", cfg.echo())
    moduli = sorted(set(cfg.cancellation_moduli) | set(cfg.identity_moduli))
    rows: list = []
    for cases, rs in _pmap(_cancellation_modulus, [(cfg, p) for p in moduli], cfg.jobs):
        rep.cases.extend(cases)
        rows.extend(rs)
    ratios = [c["ratio"] for c in rep.cases if c["check"] == "cancellation-ratio"]
    if ratios:
        hist, edges = np.histogram(ratios, bins=[0, 1, 2, 3, 5, 10, np.inf])
        rep.notes.append({"max_ratio": max(ratios), "mean_ratio": float(np.mean(ratios)),
                          "histogram": {f"[{edges[i]:g},{edges[i + 1]:g})": int(h) for i, h in enumerate(hist)}})
    return rep, rows


def cancellation_csv(rows) -> str:
    from .expsums import CancellationRow

    return "\n".join([CancellationRow.CSV_HEADER] + [r.csv() for r in rows]) + "\n"


# --- voronoi ------------------------------------------------------------------------

def _voronoi_task(args) -> list:
    cfg, c, N = args
    tol = cfg.tol(1e-5)
    out = []
    for a in units(c) if c > 1 else [0]:
        res = gl2_voronoi_check(a, c, N=N, coeff_budget=cfg.coeff_budget, tolerance=tol)
        out.append(make_case("voronoi", {"a": a, "c": c, "N": N}, res.diff / (1 + abs(res.lhs)), tol,
                             lhs=res.lhs, rhs=res.rhs, dual_terms=res.terms,
                             truncation_estimate=res.truncation_estimate))
        mirror = gl2_voronoi_check(-a % c if c > 1 else 0, c, N=N, coeff_budget=cfg.coeff_budget, tolerance=tol)
        sym = max(abs(mirror.lhs - res.lhs.conjugate()), abs(mirror.rhs - res.rhs.conjugate()))
        out.append(make_case("voronoi-conjugation", {"a": a, "c": c, "N": N}, sym, cfg.tol(1e-10)))
    return out


def suite_voronoi(cfg: GridConfig) -> VerificationReport:
    rep = VerificationReport("voronoi-gl2", cfg.echo())
    tasks = [(cfg, c, float(N)) for c in range(1, cfg.voronoi_c_max + 1) for N in cfg.voronoi_N]
    for cases in _pmap(_voronoi_task, tasks, cfg.jobs):
        rep.cases.extend(cases)
    rep.notes.append(f"test function: {voronoi_phi().describe()}")
    return rep


# --- decay --------------------------------------------------------------------------

DECAY_CONFIGS = {
    "H(-,-)": DecayConfig(),
    "H(+,-)": DecayConfig(sign_I=1),
    "H(-,+)": DecayConfig(sign_J=1),
    "K(-,-)": DecayConfig(mirror=True, m=1, mp=1),
}


def _decay_task(args) -> list:
    cfg, name = args
    params = cfg.toy_params()
    rep = h_decay_scan(params, cfg=DECAY_CONFIGS[name])
    d = rep.as_dict()
    d.pop("samples")
    inputs = {"integral": name, **d.pop("config")}
    return [
        make_case("h-tail-ratio", inputs, rep.tail_ratio, cfg.tol(1e-3), **d),
        make_case("h-origin-size", inputs, rep.H0, rep.C_over_Q, hard=False, abs_H0=rep.H0),
    ]


def suite_decay(cfg: GridConfig) -> VerificationReport:
    rep = VerificationReport("decay", cfg.echo())
    for cases in _pmap(_decay_task, [(cfg, name) for name in DECAY_CONFIGS], cfg.jobs):
        rep.cases.extend(cases)
    loc = w_dagger_localization(50.0)
    rep.cases.append(make_case("w-dagger-localization", {"A": 50.0}, loc["off_window_ratio"], cfg.tol(1e-4),
                               passed=loc["off_window_ratio"] <= cfg.tol(1e-4) and loc["mass_in_window"] >= 0.999,
                               **loc))
    sp = SpectralParams.maass(1.0, 1)
    phi = plateau()
    for x in (25.0, 50.0, 100.0, 200.0, 400.0):
        v = complex(psi_transform(-1, x, phi, sp))
        rep.cases.append(make_case("psi-minus-decay", {"x": x, "mu": 1.0}, abs(v), cfg.tol(1e-6), value=v))
    return rep


# --- transforms -----------------------------------------------------------------------

def suite_transforms(cfg: GridConfig) -> VerificationReport:
    rep = VerificationReport("transforms", cfg.echo())
    cases = rep.cases
    params = cfg.toy_params()

    taus = np.linspace(5, 50, 46)
    s = -0.5 + 1j * taus
    big = np.maximum(np.abs(gamma_pm(1, s)), np.abs(gamma_pm(-1, s)))
    band = float(np.max(np.abs(np.log(big))))
    cases.append(make_case("gamma-band", {"tau": [5, 50]}, band, math.log(50.0), min=float(big.min()),
                           max=float(big.max())))
    mus = (0.3, -0.1, -0.2)
    pts = np.array([0.3 + 2j, -0.5 + 7j, 1.2 - 3j])
    refl = max(float(np.max(np.abs(gamma_pm(sg, np.conj(pts), mus) - np.conj(gamma_pm(-sg, pts, mus)))))
               for sg in (1, -1))
    cases.append(make_case("gamma-reflection", {"mus": list(mus)}, refl, cfg.tol(1e-10)))
    g = gamma_pm(1, -0.5, mus)
    cases.append(make_case("gamma-finite", {"mus": list(mus), "s": -0.5}, 0.0 if np.isfinite(g) else math.inf,
                           0.0, value=complex(g)))

    w0 = complex(w_dagger(0.0, 0.5, params.W))
    cases.append(make_case("w-dagger-origin", {"A": 0, "s": 0.5}, abs(w0.imag), 1e-12,
                           passed=w0.real > 0 and abs(w0.imag) <= 1e-12, value=w0))

    q, zeta = 3.0, 1.0
    B = params.B(q, zeta)
    thr = 1e-4
    for sign in (1, -1):
        for factor in (0.05, 0.2, 1.5, 4.0, 150.0):
            x = factor * B * B
            res, predicted = stationary_phase_psi0(x, params, zeta, q, sign)
            size = abs(complex(res))
            if predicted:
                # the main term is O(1) only when the stationary point x/B^2 sits inside supp V
                scaled_size = size * math.sqrt(x)
                inside = params.V.support[0] < factor < params.V.support[1]
                cases.append(make_case("stationary-phase-main", {"sign": sign, "x_over_B2": factor},
                                       abs(math.log10(scaled_size)), 2.0, hard=inside, scaled=scaled_size))
            else:
                cases.append(make_case("stationary-phase-negligible", {"sign": sign, "x_over_B2": factor},
                                       size / x ** -0.25, thr, value=complex(res)))

    x = resonant_x(params, q, zeta)
    # away from resonance both signs are well above the W-dagger noise floor
    for sign in (1, -1):
        J = frak_J(sign, x / 100, q, zeta, params)
        cases.append(make_case("J-refinement", {"sign": sign, "q": q, "zeta": zeta, "x": x / 100},
                               J.error / abs(J.value), 1e-6, value=J.value))
    main, off = frak_J(1, x, q, zeta, params), frak_J(-1, x, q, zeta, params)
    cases.append(make_case("J-refinement", {"sign": 1, "q": q, "zeta": zeta, "x": x},
                           main.error / abs(main.value), 1e-6, value=main.value))
    # the other sign is negligible here; its size sits at the noise floor of the W-dagger tail
    cases.append(make_case("J-negligible-branch", {"sign": -1, "q": q, "zeta": zeta, "x": x},
                           abs(off.value) / abs(main.value), 1e-6, value=off.value,
                           relative_refinement=off.error / abs(off.value)))
    y2 = np.array([0.5 * x, x])
    # each profile truncates its own tau-range; a deep cut keeps that below the check
    plus = RIntegral(params, q, 0.5, 1, 1, trunc=1e-15)
    minus = RIntegral(params, q, 2.0, -1, 1, trunc=1e-15)
    mixed = RIntegral(params, q, 0.5, 1, 1, trunc=1e-15,
                      I_slot=lambda v: plus.I_profile(v) + 2j * minus.I_profile(v))
    lin = np.abs(mixed(y2) - plus(y2) - 2j * minus(y2))
    scale = float(np.max(np.abs(plus(y2))))
    cases.append(make_case("R-linearity", {"q": q, "y2": y2.tolist()}, float(np.max(lin)) / scale,
                           cfg.tol(1e-10)))

    sp = SpectralParams.holomorphic(12)
    phi = plateau()
    num = complex(psi_transform(1, 100.0, phi, sp))
    asym = psi_asymptotic(100.0, phi, sp, 4)
    cases.append(make_case("psi-asymptotic", {"x": 100.0, "k": 12, "terms": 4}, abs(num - asym) / abs(num), 0.05,
                           numeric=num, asymptotic=asym))
    lin = abs(complex(psi_transform(1, 7.0, phi.scaled(2.0), sp)) - 2 * complex(psi_transform(1, 7.0, phi, sp)))
    cases.append(make_case("psi-linearity", {"x": 7.0}, lin, cfg.tol(1e-12)))
    z = complex(psi_transform(1, 0.0, phi, sp))
    cases.append(make_case("psi-origin", {"x": 0.0}, abs(z), 1e-15))

    xs = np.linspace(0.01, 1.0, 200)
    h = 1e-4
    f = lambda t: bessel_kernel(1, t, sp)
    d0 = np.abs(f(xs))
    d1 = np.abs(xs * (f(xs + h) - f(xs - h)) / (2 * h))
    d2 = np.abs(xs ** 2 * (f(xs + h) - 2 * f(xs) + f(xs - h)) / h ** 2)
    worst = float(max(d0.max(), d1.max(), d2.max()))
    cases.append(make_case("bessel-small-x", {"k": 12, "x": [0.01, 1.0]}, worst, 1.0, hard=False))
    return rep


# --- dispatch -----------------------------------------------------------------------

def run_suite(name: str, cfg: GridConfig) -> VerificationReport:
    cfg.validate()
    runners = {
        "charsum": suite_charsum,
        "delta": suite_delta,
        "cancellation": lambda c: suite_cancellation(c)[0],
        "voronoi-gl2": suite_voronoi,
        "decay": suite_decay,
        "transforms": suite_transforms,
    }
    if name not in runners:
        raise ConfigInvalid({"suite": f"unknown suite {name!r}"})
    return runners[name](cfg)
