"""Command-line harness: ``gamma237 <subcommand> [options]``.

Every subcommand writes deterministic JSON/CSV into ``--out`` (default
``out``) and prints a one-line summary.  Reports embed the effective
configuration (all of it except ``output_dir``) and the package version.
Exit codes: 0 success, 1 verification failure, 2 configuration error.

Configuration is an INI file (``--config``) with sections::

    [experiment]  seed, ball_radius, sample_size, output_dir
    [budget]      max_word_length, max_candidates
    [numerics]    max_bits

Command-line flags override file values.
"""
from __future__ import annotations

import argparse
import configparser
import json
import random
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from . import group as G
from . import numerics
from .orders import (
    InconsistentOracle,
    ProductIndex,
    abc_sign,
    cone_table,
    conjugate_order,
    fixed_point_oracle,
    free_oracle,
    in_neighborhood,
    oracle_from_descriptor,
    random_free_oracles,
)
from .realization import (
    blowup_defect,
    blowup_from_descriptors,
    build_realization,
    gap_stabilizer,
    orbit_order_mismatches,
)
from .search import (
    HypothesisViolated,
    SearchBudget,
    component_scan,
    find_conjugator,
)

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    seed: int = 0
    ball_radius: int = 3
    sample_size: int = 6
    max_word_length: int = 12
    max_candidates: int = 10 ** 6
    max_bits: int = 4096
    output_dir: str = "out"

    def validate(self) -> None:
        for name in ("sample_size", "max_word_length", "max_candidates", "max_bits"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        # radius 0 is allowed: it gives the empty table
        if self.seed < 0 or self.ball_radius < 0:
            raise ConfigError("seed and ball_radius must be nonnegative")
        if self.ball_radius > 12:
            raise ConfigError("ball_radius above 12 is not supported")

    def budget(self) -> SearchBudget:
        return SearchBudget(self.max_word_length, self.max_candidates, self.max_bits)


_FILE_KEYS = {
    "experiment": ("seed", "ball_radius", "sample_size", "output_dir"),
    "budget": ("max_word_length", "max_candidates"),
    "numerics": ("max_bits",),
}


def load_config(path: Optional[str], overrides: dict) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if path:
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for section in parser.sections():
            if section not in _FILE_KEYS:
                raise ConfigError(f"unknown config section [{section}]")
            for key, value in parser.items(section):
                if key not in _FILE_KEYS[section]:
                    raise ConfigError(f"unknown key {key} in [{section}]")
                setattr(cfg, key, _coerce(key, value))
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    cfg.validate()
    return cfg


def _coerce(key: str, value: str):
    if key == "output_dir":
        return value
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {value!r}") from None


# ---------------------------------------------------------------------------
# oracle descriptors on the command line
# ---------------------------------------------------------------------------

def parse_oracle(text: str):
    """``slope:3/7[:sheet]``, ``fixed:WORD[:left|right[:attracting|repelling]]``; a leading ``-`` reverses."""
    reverse = text.startswith("-")
    body = text[1:] if reverse else text
    parts = body.split(":")
    try:
        if parts[0] == "slope":
            o = free_oracle(Fraction(parts[1]), int(parts[2]) if len(parts) > 2 else 0)
        elif parts[0] == "fixed":
            word = G.parse_word(parts[1])
            side = parts[2] if len(parts) > 2 else "left"
            which = parts[3] if len(parts) > 3 else "attracting"
            o = fixed_point_oracle(word, side, which)
        else:
            raise ConfigError(f"unknown oracle kind {parts[0]!r}")
    except (IndexError, ValueError, ZeroDivisionError, G.NotHyperbolic) as exc:
        raise ConfigError(f"bad oracle descriptor {text!r}: {exc}") from exc
    return o.flipped() if reverse else o


def _domain(radius: int) -> list:
    return G.ball(radius, cap=max(radius, G.BALL_CAP)).without_identity()


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _dump(data) -> str:
    return json.dumps(data, indent=1, sort_keys=True, ensure_ascii=True) + "\n"


def _write(out: Path, name: str, text: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="utf-8")


def _envelope(command: str, cfg: ExperimentConfig, body: dict) -> dict:
    # the output location is not part of the experiment, so reports stay byte-identical across it
    config = {k: v for k, v in asdict(cfg).items() if k != "output_dir"}
    return {"command": command, "config": config, "version": __version__, **body}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def gen_check_report(radius: int = 3, exact: bool = False) -> dict:
    """Relations, centrality of abc on ball(radius) and translation numbers."""
    try:
        gens = G._build_generators((G.MATRIX_A, G.MATRIX_B, G.MATRIX_C))
    except G.ConstructionFailure as exc:
        return {"ok": False, "relation_failures": [str(exc)], "central_failures": [], "translation_numbers": {}}
    failures = G.check_relations(gens)
    t = G.central_element()
    central_bad = [G.display_word(g.word) for g in G.ball(radius, cap=max(radius, G.BALL_CAP))
                   if G.compose(g, t) != G.compose(t, g)]
    taus = {w: str(G.translation_number(G.element(w))) for w in ("a", "b", "c", "abc")}
    expected = {"a": "1/2", "b": "1/3", "c": "1/7", "abc": "1"}
    report = {
        "ok": not failures and not central_bad and taus == expected,
        "relation_failures": failures,
        "central_failures": central_bad,
        "translation_numbers": taus,
        "ball_radius": radius,
        "tower": G.TOWER.describe(),
    }
    if exact:
        report["matrices"] = {w: G.element(w).to_json(exact=True)["matrix"] for w in "abc"}
    return report


def cmd_gen_check(args, cfg: ExperimentConfig) -> int:
    rep = gen_check_report(cfg.ball_radius, args.exact_matrices)
    _write(Path(cfg.output_dir), "gen_check.json", _dump(_envelope("gen-check", cfg, rep)))
    print(f"gen-check: {'ok' if rep['ok'] else 'FAILED'} tau={rep['translation_numbers']}")
    return EXIT_OK if rep["ok"] else EXIT_VERIFY


def cmd_table(args, cfg: ExperimentConfig) -> int:
    o = parse_oracle(args.basepoint)
    F = G.ball(cfg.ball_radius, cap=max(cfg.ball_radius, G.BALL_CAP)).without_identity() if cfg.ball_radius else []
    table = cone_table(o, F)
    violations = table.check_axioms(ProductIndex.for_ball(cfg.ball_radius)) if F else []
    out = Path(cfg.output_dir)
    _write(out, "table.json", table.to_json() + "\n")
    _write(out, "table.csv", table.to_csv())
    _write(out, "table_validation.json", _dump(_envelope("table", cfg, {
        "oracle": o.describe(), "entries": len(table), "violations": [list(v) for v in violations]})))
    print(f"table: {len(table)} entries, {len(violations)} cone-axiom violations")
    if violations:
        raise InconsistentOracle(f"{len(violations)} cone-axiom violations")
    return EXIT_OK


def _sample_pair(cfg: ExperimentConfig):
    a, b = random_free_oracles(2, cfg.seed)
    return a, b


def cmd_approximate(args, cfg: ExperimentConfig) -> int:
    if args.target:
        o = parse_oracle(args.target)
    else:
        o = _sample_pair(cfg)[0]
    if args.plant:
        w = G.parse_word(args.plant)
        o_prime = conjugate_order(o, G.invert(G.element(w)))
    elif args.source:
        o_prime = parse_oracle(args.source)
    else:
        o_prime = _sample_pair(cfg)[1]
    F = _domain(cfg.ball_radius)
    try:
        rep = find_conjugator(o, o_prime, F, cfg.budget())
        body = {"target": o.describe(), "source": o_prime.describe(),
                "domain": {"ball_radius": cfg.ball_radius}, "report": rep.to_json()}
        if rep.found and args.exact_matrices:
            body["report"]["witness_element"] = rep.g.to_json(exact=True)
    except HypothesisViolated as exc:
        body = {"target": o.describe(), "source": o_prime.describe(),
                "domain": {"ball_radius": cfg.ball_radius},
                "report": {"found": False, "obstruction": str(exc)}}
    _write(Path(cfg.output_dir), "approximate.json", _dump(_envelope("approximate", cfg, body)))
    r = body["report"]
    print(f"approximate: found={r['found']} witness={r.get('witness')}")
    return EXIT_OK


def scan_sample(cfg: ExperimentConfig, with_reversed: bool = True) -> list:
    """Seeded sample: free basepoints, two fixed-point orders and (optionally) reversed copies."""
    rng = random.Random(cfg.seed)
    n_free = max(1, cfg.sample_size - 2)
    sample = random_free_oracles(n_free, cfg.seed)
    if cfg.sample_size > 1:
        hyp = [g.word for g in G.ball(4) if G.classify(g) == "hyperbolic"]
        word = rng.choice(hyp)
        sample.append(fixed_point_oracle(word, "left"))
        if cfg.sample_size > 2:
            sample.append(fixed_point_oracle(word, "right"))
    sample = sample[:cfg.sample_size]
    if with_reversed and len(sample) > 1:
        k = len(sample) // 2
        sample = sample[:k] + [o.flipped() for o in sample[k:]]
    return sample


def cmd_scan(args, cfg: ExperimentConfig) -> int:
    sample = scan_sample(cfg, not args.same_sign)
    F = _domain(cfg.ball_radius)
    res = component_scan(sample, F, cfg.budget())
    out = Path(cfg.output_dir)
    _write(out, "scan.json", _dump(_envelope("scan", cfg, res.to_json())))
    _write(out, "scan_matrix.csv", res.matrix_csv())
    _write(out, "scan_histogram.csv", res.histogram_csv())
    if args.svg:
        _write(out, "scan_histogram.svg", res.histogram_svg())
    print(f"scan: {len(sample)} orders, two-block={res.is_two_block()}, histogram={res.histogram()}")
    return EXIT_OK


def cmd_blowup(args, cfg: ExperimentConfig) -> int:
    rng = random.Random(cfg.seed)
    hyp = [g.word for g in G.ball(4) if G.classify(g) == "hyperbolic"]
    orbits = [{"fixed_point": rng.choice(hyp)}, {"slope": str(Fraction(rng.randint(-20, 20), rng.randint(1, 20)))}]
    bmap = blowup_from_descriptors(orbits)
    words = G.ball(3).words()
    samples = []
    for _ in range(cfg.sample_size * 10):
        if rng.random() < 0.5:
            samples.append(bmap.orbit_point(rng.randrange(len(orbits)), rng.choice(words),
                                            Fraction(rng.randint(0, 16), 16)))
        else:
            samples.append(bmap.lift(G.CoverPoint.from_slope(Fraction(rng.randint(-200, 200), rng.randint(1, 50)))))
    F = list(G.ball(3))
    defect = blowup_defect(bmap, samples, F)
    mism = orbit_order_mismatches(bmap, bmap.orbit_point(0, "", Fraction(1, 3)), F)
    st = gap_stabilizer(bmap, 0)
    body = {
        "blowup": bmap.export(8),
        "samples": len(samples),
        "defect": str(defect),
        "orbit_order_mismatches": len(mism),
        "gap_stabilizer": {"kind": st.kind, "generator": None if st.generator is None
                           else G.display_word(st.generator.word)},
    }
    _write(Path(cfg.output_dir), "blowup.json", _dump(_envelope("blowup", cfg, body)))
    ok = defect == 0 and not mism
    print(f"blowup: defect={defect} orbit-order mismatches={len(mism)} gap stabilizer={st.kind}")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_realize(args, cfg: ExperimentConfig) -> int:
    o = parse_oracle(args.basepoint) if args.basepoint else _sample_pair(cfg)[0]
    n = cfg.ball_radius
    real = build_realization(o, n)
    F = G.ball(max(n - 1, 0)).without_identity()
    same = real.cone_table(F) == cone_table(o, F)
    out = Path(cfg.output_dir)
    _write(out, "realization.csv", real.to_csv())
    _write(out, "realize.json", _dump(_envelope("realize", cfg, {
        "oracle": o.describe(), "stage": n, "round_trip": same,
        "equivariance_defects": len(real.equivariance_defects())})))
    print(f"realize: stage {n}, round trip {'ok' if same else 'FAILED'}")
    return EXIT_OK if same else EXIT_VERIFY


def verify_report(data: dict) -> tuple:
    """Re-check every witness in an approximate or scan report; returns (checked, failures)."""
    checked, failures = 0, []
    if data.get("command") == "approximate":
        r = data["report"]
        if r.get("found"):
            o, op = oracle_from_descriptor(data["target"]), oracle_from_descriptor(data["source"])
            F = _domain(data["domain"]["ball_radius"])
            checked += 1
            if not in_neighborhood(conjugate_order(op, _witness(r)), o, F):
                failures.append(r["witness"])
    elif data.get("command") == "scan":
        oracles = [oracle_from_descriptor(s) for s in data["oracles"]]
        F = _domain(data["config"]["ball_radius"])
        for p in data["pairs"]:
            o, op = oracles[p["target"]], oracles[p["source"]]
            if p["status"] == "found":
                checked += 1
                g = G.element(G.parse_word(p["witness"]))
                if not in_neighborhood(conjugate_order(op, g), o, F):
                    failures.append((p["target"], p["source"], p["witness"]))
            elif p["status"] == "obstructed" and abc_sign(o) == abc_sign(op):
                failures.append((p["target"], p["source"], "spurious obstruction"))
    else:
        raise ConfigError("report is neither an approximate nor a scan report")
    return checked, failures


def _witness(r: dict):
    g = G.element(G.parse_word(r["witness"]))
    if "winding" in r and r["winding"] is not None and g.winding != r["winding"]:
        raise ConfigError("witness winding does not match its word")
    return g


def cmd_verify(args, cfg: ExperimentConfig) -> int:
    try:
        data = json.loads(Path(args.report).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read report: {exc}") from exc
    checked, failures = verify_report(data)
    print(f"verify: {checked} witnesses checked, {len(failures)} failures")
    return EXIT_VERIFY if failures else EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--seed", type=int)
    common.add_argument("--radius", type=int, dest="ball_radius", help="ball radius for domains and tables")
    common.add_argument("--budget-length", type=int, dest="max_word_length", help="maximum witness word length")
    common.add_argument("--exact-matrices", action="store_true", help="include exact matrix coordinates")
    common.add_argument("--out", dest="output_dir", help="output directory")

    p = argparse.ArgumentParser(prog="gamma237", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("gen-check", parents=[common], help="verify relations and translation numbers")
    t = sub.add_parser("table", parents=[common], help="positive-cone table on a ball")
    t.add_argument("--basepoint", required=True, help="oracle descriptor, e.g. slope:3/7 or fixed:aBC:left")
    a = sub.add_parser("approximate", parents=[common], help="search for a conjugator")
    a.add_argument("--target", help="oracle descriptor of the target order")
    a.add_argument("--source", help="oracle descriptor of the order to conjugate")
    a.add_argument("--plant", help="use the target conjugated by the inverse of this word as source")
    s = sub.add_parser("scan", parents=[common], help="pairwise conjugator scan of a seeded sample")
    s.add_argument("--same-sign", action="store_true", help="do not include reversed orders")
    s.add_argument("--svg", action="store_true", help="also render the histogram as SVG")
    sub.add_parser("blowup", parents=[common], help="blow-up construction and semi-conjugacy check")
    r = sub.add_parser("realize", parents=[common], help="finite dynamical realization")
    r.add_argument("--basepoint", help="oracle descriptor")
    v = sub.add_parser("verify", parents=[common], help="re-verify witnesses in a report")
    v.add_argument("report", help="approximate.json or scan.json")
    return p


COMMANDS = {
    "gen-check": cmd_gen_check, "table": cmd_table, "approximate": cmd_approximate,
    "scan": cmd_scan, "blowup": cmd_blowup, "realize": cmd_realize, "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    overrides = {k: getattr(args, k) for k in ("seed", "ball_radius", "max_word_length", "output_dir")}
    try:
        cfg = load_config(args.config, overrides)
        numerics.set_max_bits(cfg.max_bits)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InconsistentOracle, numerics.PrecisionExhausted) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
