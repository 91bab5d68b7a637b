"""Command-line front end.

Every verb reads a JSON run configuration, runs one suite of checks and
writes a JSON report. Exit status is 0 when every asserted check passes, 1
when one fails and 2 when the configuration is invalid. Checks with status
``recorded`` only report measurements and never change the exit status.

Off-shell Bethe vectors built by ``bethe-build`` are cached on disk under
``$BETHE_CACHE_DIR`` (default ``./.bethe-cache``), keyed by a hash of the
chain and the parameters.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import logging
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .bethe import (
    action_formula,
    as_chain,
    bethe_vector,
    build_bethe_alt,
    corner_action,
    gln_reduction_checks,
    o3_action,
    simple_root_action,
    strip_variants,
    vectors_agree,
    zero_mode_action,
    zero_mode_vector,
)
from .errors import BetheError, CentralityError, ConfigError, GenericityError, NoVacuumError, PoleError
from .linop import ChainVector, _serialize, commutator, site_labels
from .monodromy import (
    ChainSpec,
    apply_entry,
    check_central,
    check_lambda_rest,
    check_rtt,
    check_zero_mode_commutators,
    transfer_matrix,
)
from .partitions import BetheParams, WSets
from .rmatrix import ModelParams, check_unitarity, check_yang_baxter
from .scalarfield import Q, RationalFunction, format_rational, is_exact, to_complex
from .spectra import spectrum

log = logging.getLogger("orthobethe")

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
CACHE_VERSION = 1
_DENOMINATORS = (3, 5, 7, 11, 13, 17, 19, 23)


# ----------------------------------------------------------------------------
# Configuration


def _rational(value, name: str):
    if not isinstance(value, (str, int)) or isinstance(value, bool):
        raise ConfigError(f"field '{name}': expected a rational string such as \"3/7\", got {value!r}")
    try:
        return Q(value) if isinstance(value, int) else Q(value.strip())
    except (ValueError, ZeroDivisionError) as err:
        raise ConfigError(f"field '{name}': invalid rational {value!r} ({err})") from None


def _rational_list(value, name: str) -> tuple:
    if not isinstance(value, list):
        raise ConfigError(f"field '{name}': expected a list, got {type(value).__name__}")
    return tuple(_rational(x, f"{name}[{k}]") for k, x in enumerate(value))


def _integer(value, name: str, minimum: int | None = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"field '{name}': expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"field '{name}': must be at least {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class RunConfig:
    n: int
    L: int
    c: object
    xi: tuple
    chi: tuple
    t: tuple
    z: object
    seed: int = 0
    backend: str = "exact"
    cardinalities: tuple | None = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    FIELDS = ("n", "L", "c", "xi", "chi", "t", "z", "seed", "backend", "cardinalities")

    @classmethod
    def from_dict(cls, data: dict, backend: str | None = None) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        unknown = sorted(set(data) - set(cls.FIELDS))
        if unknown:
            raise ConfigError(f"field '{unknown[0]}': unknown configuration field")
        for name in ("n", "L", "xi", "z"):
            if name not in data:
                raise ConfigError(f"field '{name}': required")
        n = _integer(data["n"], "n", 1)
        L = _integer(data["L"], "L", 1)
        c = _rational(data.get("c", "1"), "c")
        if c == 0:
            raise ConfigError("field 'c': must be nonzero")
        xi = _rational_list(data["xi"], "xi")
        if len(xi) != L:
            raise ConfigError(f"field 'xi': expected {L} inhomogeneities, got {len(xi)}")
        chi = _rational_list(data.get("chi", []), "chi")
        if chi and len(chi) != n:
            raise ConfigError(f"field 'chi': expected {n} twist parameters, got {len(chi)}")
        if any(x == 0 for x in chi):
            raise ConfigError("field 'chi': twist parameters must be nonzero")
        t_raw = data.get("t", [])
        if not isinstance(t_raw, list) or len(t_raw) > n:
            raise ConfigError(f"field 't': expected a list of at most {n} lists")
        t = tuple(_rational_list(s, f"t[{k}]") for k, s in enumerate(t_raw))
        t = t + ((),) * (n - len(t))
        z = _rational(data["z"], "z")
        seed = _integer(data.get("seed", 0), "seed", 0)
        backend = backend or data.get("backend", "exact")
        if backend not in ("exact", "float"):
            raise ConfigError(f"field 'backend': expected 'exact' or 'float', got {backend!r}")
        card = data.get("cardinalities")
        if card is not None:
            if not isinstance(card, list) or not all(isinstance(r, list) and len(r) == n for r in card):
                raise ConfigError(f"field 'cardinalities': expected a list of length-{n} integer lists")
            card = tuple(tuple(_integer(x, f"cardinalities[{k}]", 0) for x in r) for k, r in enumerate(card))
        cfg = cls(n, L, c, xi, chi, t, z, seed, backend, card, raw=dict(data))
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path, backend: str | None = None) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError as err:
            raise ConfigError(f"cannot read config {path}: {err.strerror}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError(f"config {path} is not valid JSON: {err}") from None
        return cls.from_dict(data, backend)

    def validate(self) -> None:
        try:
            spec = self.spec
        except (GenericityError, ValueError) as err:
            name = "chi" if "twist" in str(err) else "xi"
            raise ConfigError(f"field '{name}': {err}") from None
        try:
            params = BetheParams(self.n, self.t, self.c)
        except GenericityError as err:
            raise ConfigError(f"field 't': {err}") from None
        try:
            WSets(params, self.z)
        except GenericityError as err:
            raise ConfigError(f"field 'z': {err}") from None
        for s in (self.z,) + tuple(x for level in self.t for x in level):
            for x in spec.xi:
                if s == x or s == x - spec.params.c_kappa:
                    raise ConfigError(f"field 'z' or 't': parameter {format_rational(s)} hits a pole of the monodromy")

    @property
    def spec(self) -> ChainSpec:
        return ChainSpec(ModelParams(self.n, self.c), self.xi, self.chi)

    @property
    def sets(self) -> tuple:
        """Bethe parameters in the scalar type of the backend."""
        if self.backend == "exact":
            return self.t
        return tuple(tuple(to_complex(x) for x in s) for s in self.t)

    @property
    def point(self):
        return self.z if self.backend == "exact" else to_complex(self.z)

    def echo(self) -> dict:
        out = {
            "n": self.n, "L": self.L, "c": format_rational(self.c),
            "xi": [format_rational(x) for x in self.xi],
            "chi": [format_rational(x) for x in self.chi],
            "t": [[format_rational(x) for x in s] for s in self.t],
            "z": format_rational(self.z), "seed": self.seed, "backend": self.backend,
        }
        if self.cardinalities is not None:
            out["cardinalities"] = [list(r) for r in self.cardinalities]
        return out


# ----------------------------------------------------------------------------
# Reports


def _json_scalar(x):
    # gmpy2 promotes mixed rational/complex products to mpc, which json cannot encode
    return _serialize(x if is_exact(x) else complex(x))


def _json_rf(f: RationalFunction) -> dict:
    return {"num": [format_rational(a) for a in f.num.coeffs], "den": [format_rational(a) for a in f.den.coeffs]}


@dataclass
class Report:
    command: str
    config: dict
    checks: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def add(self, name: str, status: str, counterexample=None, **detail) -> None:
        if status not in ("pass", "fail", "recorded"):
            raise ValueError(f"bad status {status!r}")
        entry = {"name": name, "status": status, **detail}
        if counterexample is not None:
            entry["counterexample"] = counterexample
        self.checks.append(entry)

    def assert_(self, name: str, ok: bool, counterexample=None, **detail) -> None:
        self.add(name, "pass" if ok else "fail", None if ok else counterexample, **detail)

    @property
    def status(self) -> str:
        return "fail" if any(c["status"] == "fail" for c in self.checks) else "pass"

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "status": self.status,
            "checks": self.checks,
            "counterexamples": [{"check": c["name"], **c["counterexample"]}
                                for c in self.checks if "counterexample" in c],
            "timings": self.timings,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


class _timed:
    def __init__(self, report: Report, name: str):
        self.report, self.name = report, name

    def __enter__(self):
        self.start = time.perf_counter()

    def __exit__(self, *exc):
        self.report.timings[self.name] = round(time.perf_counter() - self.start, 6)


# ----------------------------------------------------------------------------
# Cache


def cache_dir() -> Path:
    return Path(os.environ.get("BETHE_CACHE_DIR", "./.bethe-cache"))


def cache_key(spec: ChainSpec, sets, backend: str = "exact") -> str:
    """Content hash of the chain and the parameters (order inside each set is kept)."""
    payload = {
        "version": CACHE_VERSION,
        "n": spec.n,
        "c": format_rational(spec.c),
        "xi": [format_rational(x) for x in spec.xi],
        "chi": [format_rational(x) for x in spec.chi],
        "t": [[_serialize(x) for x in s] for s in sets],
        "backend": backend,
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def store_vector(key: str, vec: ChainVector, directory: Path | None = None) -> Path:
    directory = directory or cache_dir()
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{key}.json"
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps({"key": key, "n": vec.n, "sites": vec.sites, "records": vec.to_records()},
                              sort_keys=True))
    tmp.replace(path)
    return path


def load_vector(key: str, directory: Path | None = None) -> ChainVector | None:
    """Cached vector, or ``None`` on a miss. Corrupt entries count as misses and are logged."""
    path = (directory or cache_dir()) / f"{key}.json"
    if not path.exists():
        return None
    try:
        data = json.loads(path.read_text())
        if data["key"] != key:
            raise ValueError("key mismatch")
        return ChainVector.from_records(int(data["n"]), int(data["sites"]), data["records"])
    except (ValueError, KeyError, TypeError, IndexError, ZeroDivisionError) as err:
        log.warning("cache entry %s is corrupt (%s); recomputing", path.name, err)
        return None


def cached_bethe_vector(spec: ChainSpec, sets, backend: str = "exact", directory: Path | None = None) -> ChainVector:
    key = cache_key(spec, sets, backend)
    vec = load_vector(key, directory)
    if vec is not None and (vec.n, vec.sites) == (spec.n, spec.L):
        log.info("cache hit %s", key[:16])
        return vec
    log.info("cache miss %s", key[:16])
    vec = bethe_vector(spec, sets)
    store_vector(key, vec, directory)
    return vec


# ----------------------------------------------------------------------------
# Random sample points


def _random_rational(rng: random.Random):
    return Q(rng.randint(-40, 40), rng.choice(_DENOMINATORS))


def _sample(rng: random.Random, k: int, accept: Callable[[tuple], bool], tries: int = 200) -> tuple:
    for _ in range(tries):
        pts = tuple(_random_rational(rng) for _ in range(k))
        if accept(pts):
            return pts
    raise RuntimeError("could not draw a generic sample point")


def _distinct(pts, forbidden) -> bool:
    return all(a - b not in forbidden and b - a not in forbidden for a, b in itertools.combinations(pts, 2))


# ----------------------------------------------------------------------------
# Suites


def _yb_check(cfg: RunConfig, rep: Report, args) -> None:
    p = ModelParams(cfg.n, cfg.c)
    rng = random.Random(cfg.seed)
    samples = 20 if cfg.n == 1 else 5
    bad = {0, p.c_kappa}
    yb_fail = uni_fail = None
    for _ in range(samples):
        u1, u2, u3 = _sample(rng, 3, lambda x: _distinct(x, bad))
        if yb_fail is None and not check_yang_baxter(p, u1, u2, u3):
            yb_fail = {"u": [format_rational(x) for x in (u1, u2, u3)]}
        if uni_fail is None and not check_unitarity(p, u1, u2):
            uni_fail = {"u": format_rational(u1), "v": format_rational(u2)}
    rep.assert_("yang-baxter", yb_fail is None, yb_fail, samples=samples)
    rep.assert_("unitarity", uni_fail is None, uni_fail, samples=samples)


def _generic_points(spec: ChainSpec, rng: random.Random, k: int) -> tuple:
    ck = spec.params.c_kappa
    poles = set(spec.xi) | {x - ck for x in spec.xi}
    return _sample(rng, k, lambda x: _distinct(x, {0, ck}) and not poles.intersection(x))


def _rtt_check(cfg: RunConfig, rep: Report, args) -> None:
    spec = cfg.spec
    rng = random.Random(cfg.seed)
    fail = None
    pts = [_generic_points(spec, rng, 2) for _ in range(5)]
    for u, v in pts:
        res = check_rtt(spec, u, v)
        if not res:
            fail = {"u": format_rational(u), "v": format_rational(v), **(res.counterexample or {})}
            break
    rep.assert_("rtt", fail is None, fail, samples=len(pts))
    fail = None
    for u, v in pts:
        if commutator(transfer_matrix(spec, u), transfer_matrix(spec, v)):
            fail = {"u": format_rational(u), "v": format_rational(v)}
            break
    rep.assert_("transfer-commute", fail is None, fail, samples=len(pts))


def _vacuum(cfg: RunConfig, rep: Report, args) -> None:
    chain = as_chain(cfg.spec)
    try:
        vac = chain.vacuum_data
    except NoVacuumError as err:
        rep.assert_("vacuum", False, {"error": str(err)})
        return
    (idx,) = vac.vacuum.entries
    rep.assert_("vacuum", True, index=list(idx))
    rep.add("eigenvalues", "recorded", lambdas={str(i): _json_rf(vac.lambdas[i]) for i in site_labels(cfg.n)})


def _central(cfg: RunConfig, rep: Report, args) -> None:
    spec = cfg.spec
    chain = as_chain(spec)
    try:
        z = check_central(spec, u=cfg.z, monodromy=chain.monodromy)
    except CentralityError as err:
        rep.assert_("central", False, {"error": str(err)})
        return
    rep.assert_("central", True, point=format_rational(cfg.z))
    rep.add("central-element", "recorded", z=_json_rf(z))
    rest = check_lambda_rest(spec, chain)
    rep.add("lambda-rest", "recorded",
            rows=[{"j": r["j"], "forms_agree": r["forms_agree"], "mode": r["mode"], "ratio": _json_rf(r["ratio"])}
                  for r in rest["rows"]])


def _bethe_build(cfg: RunConfig, rep: Report, args) -> None:
    spec = cfg.spec
    vec = cached_bethe_vector(spec, cfg.sets, cfg.backend)
    rep.add("vector", "recorded", nonzero=len(vec.entries), records=vec.to_records())
    # the vector is symmetric inside each set; rebuilding with reversed order must agree
    flipped = tuple(tuple(reversed(s)) for s in cfg.sets)
    rep.assert_("symmetric", vectors_agree(vec, bethe_vector(spec, flipped)),
                {"reordered": [[_serialize(x) for x in s] for s in flipped]})


def _term_table(expansion) -> list:
    return [{"t": p.to_json(), "coefficient": _json_scalar(coef)} for coef, p in expansion.items]


def _action_job(cfg_data: dict, backend: str, i: int, j: int) -> dict:
    cfg = RunConfig.from_dict(cfg_data, backend)
    spec = cfg.spec
    chain = as_chain(spec)
    lhs = apply_entry(spec, cfg.point, i, j, bethe_vector(chain, cfg.sets))
    exp = action_formula(chain, i, j, cfg.point, cfg.sets)
    ok = vectors_agree(lhs, exp.assembled)
    entry = {"name": f"action({i},{j})", "status": "pass" if ok else "fail", "terms": _term_table(exp)}
    if not ok:
        entry["counterexample"] = {"i": i, "j": j, "lhs_nonzero": len(lhs.entries)}
    return entry


def _action_verify(cfg: RunConfig, rep: Report, args) -> None:
    n = cfg.n
    if (args.i is None) != (args.j is None):
        raise ConfigError("--i and --j must be given together")
    if args.i is not None:
        for flag, v in (("--i", args.i), ("--j", args.j)):
            if abs(v) > n:
                raise ConfigError(f"{flag}: index {v} outside [-{n}, {n}]")
        pairs = [(args.i, args.j)]
    else:
        pairs = [(i, j) for i in site_labels(n) for j in site_labels(n)]
    jobs = max(1, args.jobs)
    if jobs > 1 and len(pairs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_action_job, *zip(*[(cfg.raw, cfg.backend, i, j) for i, j in pairs])))
    else:
        results = [_action_job(cfg.raw, cfg.backend, i, j) for i, j in pairs]
    rep.checks.extend(results)


def _zero_modes(cfg: RunConfig, rep: Report, args) -> None:
    spec = cfg.spec
    chain = as_chain(spec)
    n = cfg.n
    rep.assert_("zero-mode-commutators", bool(res := check_zero_mode_commutators(spec, cfg.z, chain.monodromy)),
                res.counterexample)
    vec = bethe_vector(chain, cfg.sets)
    for j in range(n + 1):
        for i in range(j):
            lhs = zero_mode_vector(chain, j, i, vec)
            rep.assert_(f"zero-mode-action({j},{i})", vectors_agree(lhs, zero_mode_action(chain, j, i, cfg.sets).assembled),
                        {"j": j, "i": i})
    for i in range(n):
        lhs = zero_mode_vector(chain, i + 1, i, vec)
        rep.assert_(f"simple-root({i})", vectors_agree(lhs, simple_root_action(chain, i, cfg.sets).assembled),
                    {"i": i, "r": [len(s) for s in cfg.sets]})
    lhs = apply_entry(spec, cfg.point, -n, n, vec)
    rep.assert_("corner-action", vectors_agree(lhs, corner_action(chain, cfg.point, cfg.sets).assembled),
                {"z": _serialize(cfg.point)})


def _recursion_crosscheck(cfg: RunConfig, rep: Report, args) -> None:
    chain = as_chain(cfg.spec)
    col = bethe_vector(chain, cfg.sets)
    row = build_bethe_alt(chain, cfg.sets).vector
    rep.assert_("column-vs-row", vectors_agree(col, row), {"column_nonzero": len(col.entries), "row_nonzero": len(row.entries)})
    variants = strip_variants(chain, cfg.sets)
    bad = [k for k, v in enumerate(variants) if not vectors_agree(col, v)]
    rep.assert_("strip-choice", not bad, {"positions": bad}, variants=len(variants))


def _reduce_gln(cfg: RunConfig, rep: Report, args) -> None:
    if cfg.n < 2:
        raise ConfigError("field 'n': reduce-gln needs n >= 2")
    sets = ((),) + tuple(cfg.sets[1:])
    out = gln_reduction_checks(cfg.spec, cfg.point, sets)
    rep.assert_("gln-creation", out["creation"], {"t": [[_serialize(x) for x in s] for s in sets]}, first_set="emptied")
    for i, ok in sorted(out["zero_modes"].items()):
        rep.assert_(f"gln-zero-mode({i + 1},{i})", ok, {"i": i})


def _reduce_o3(cfg: RunConfig, rep: Report, args) -> None:
    chain = as_chain(cfg.spec)
    z = cfg.point
    if cfg.n == 1:
        vec = bethe_vector(chain, cfg.sets)
        for i in (-1, 0, 1):
            for j in (-1, 0, 1):
                direct = o3_action(chain, i, j, z, cfg.sets)
                general = action_formula(chain, i, j, z, cfg.sets)
                same = direct.terms == general.terms if cfg.backend == "exact" else vectors_agree(direct.assembled, general.assembled)
                ok = same and vectors_agree(apply_entry(cfg.spec, z, i, j, vec), direct.assembled)
                rep.assert_(f"o3-display({i},{j})", ok, {"i": i, "j": j}, terms=_term_table(direct))
        return
    # embedded rank-one block: only t^0 is populated
    sets = (tuple(cfg.sets[0]),) + ((),) * (cfg.n - 1)
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            low = action_formula(chain, i, j, z, sets, rank=1)
            full = action_formula(chain, i, j, z, sets)
            rep.assert_(f"rank-one-embedding({i},{j})", vectors_agree(low.assembled, full.assembled), {"i": i, "j": j})


def _default_cardinalities(n: int) -> list[tuple]:
    out = []
    for r in itertools.product(range(3), repeat=n):
        if sum(r) <= 2:
            out.append(r)
    return out


def _spectrum(cfg: RunConfig, rep: Report, args) -> None:
    card = cfg.cardinalities or _default_cardinalities(cfg.n)
    z = to_complex(cfg.z) + 0.21j
    res = spectrum(cfg.spec, card, z=z, rng_seed=cfg.seed)
    data = res.to_json()
    for k, state in enumerate(data["states"]):
        name = f"state[{k}] r={tuple(state['r'])}"
        if state["null"]:
            rep.add(name, "recorded", state=state)
        else:
            rep.assert_(name, state["ok"], {"r": state["r"], "roots": state["roots"]}, state=state)
    rep.add("spectrum", "recorded", z=data["z"], eigenvalues=data["eigenvalues"], unmatched=data["unmatched"])


VERBS: dict[str, Callable] = {
    "yb-check": _yb_check,
    "rtt-check": _rtt_check,
    "vacuum": _vacuum,
    "central": _central,
    "bethe-build": _bethe_build,
    "action-verify": _action_verify,
    "zero-modes": _zero_modes,
    "recursion-crosscheck": _recursion_crosscheck,
    "reduce-gln": _reduce_gln,
    "reduce-o3": _reduce_o3,
    "spectrum": _spectrum,
}


# ----------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orthobethe", description="Exact checks for o(2n+1) Bethe vectors.")
    sub = parser.add_subparsers(dest="command", required=True)
    for verb in VERBS:
        p = sub.add_parser(verb)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--jobs", type=int, default=1, help="maximum worker processes")
        p.add_argument("--backend", choices=("exact", "float"), help="override the config backend")
        if verb == "action-verify":
            p.add_argument("--i", type=int)
            p.add_argument("--j", type=int)
    return parser


def run(argv: list[str] | None = None) -> tuple[int, Report | None]:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config, args.backend)
        rep = Report(args.command, cfg.echo())
        with _timed(rep, "total"):
            VERBS[args.command](cfg, rep, args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG, None
    except (BetheError, PoleError) as err:
        print(f"error: {err}", file=sys.stderr)
        rep.assert_("run", False, {"error": f"{type(err).__name__}: {err}"})
    text = rep.dumps()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return (EXIT_PASS if rep.status == "pass" else EXIT_FAIL), rep


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s", stream=sys.stderr)
    code, rep = run(argv)
    if rep is not None:
        failed = [c["name"] for c in rep.checks if c["status"] == "fail"]
        if failed:
            print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
