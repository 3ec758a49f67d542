"""``pirlab`` command line: rate planning, simulation, verification, worked examples.

Server labels in config files and reports are 1-based; file indices are
0-based.  Exit codes: 0 success, 1 usage/config error, 2 infeasible plan,
3 privacy failure, 4 internal-consistency error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from pirlab.codes import CodeError, GrsSpec, LinearCode, grs_code, repetition
from pirlab.collusion import (
    CollusionPattern,
    PatternError,
    PlanError,
    is_disconnected,
    naive_rate,
    pattern_from_maximal,
    plan_rate,
)
from pirlab.field import FieldError, PrimeField
from pirlab.matrix import SingularSystemError
from pirlab.schemes import SCHEME_KINDS, RetrievalScheme, SchemeError, build_scheme, describe
from pirlab.simulator import (
    ReconstructionError,
    SimulationError,
    encode_storage,
    random_files,
    run_retrieval,
)
from pirlab.verifier import DEFAULT_ORACLE_CAP, ConsistencyError, verify_scheme

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_PRIVACY = 3
EXIT_INTERNAL = 4

CONFIG_FIELDS = {"p", "n", "k", "stripes", "code", "m", "files", "pattern"}
CODE_FIELDS = {
    "grs": {"kind", "eval_points", "multipliers"},
    "repetition": {"kind"},
    "matrix": {"kind", "generator"},
}


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass
class SystemConfig:
    p: int
    n: int
    k: int
    stripes: int | None
    code: dict
    m: int
    files: Any  # explicit nested symbol lists, or {"seed": int}
    pattern: list[list[int]]  # 1-based maximal sets

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.p)

    def storage_code(self) -> LinearCode:
        kind = self.code["kind"]
        if kind == "grs":
            return grs_code(GrsSpec(self.field, self.n, self.k, self.code.get("eval_points"), self.code.get("multipliers")))
        if kind == "repetition":
            return repetition(self.field, self.n)
        return LinearCode.from_generator(self.field, self.code["generator"], self.n)

    def collusion_pattern(self, extra: list[list[int]] = ()) -> CollusionPattern:
        return pattern_from_maximal(self.n, [[j - 1 for j in s] for s in list(self.pattern) + list(extra)])

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "k": self.k,
            "stripes": self.stripes,
            "code": dict(sorted(self.code.items())),
            "m": self.m,
            "files": self.files,
            "pattern": sorted(sorted(s) for s in self.pattern),
        }


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def parse_config(raw: Any) -> SystemConfig:
    """Validate a config mapping; every problem is reported with its field path."""
    problems: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(["$: config must be a JSON object"])
    for key in sorted(set(raw) - CONFIG_FIELDS):
        problems.append(f"$.{key}: unknown field")
    for key in ("p", "n", "k", "m"):
        if key not in raw:
            problems.append(f"$.{key}: missing")
        elif not _is_int(raw[key]):
            problems.append(f"$.{key}: must be an integer")
    if problems:
        raise ConfigError(problems)
    p, n, k, m = raw["p"], raw["n"], raw["k"], raw["m"]
    try:
        PrimeField(p)
    except FieldError as exc:
        problems.append(f"$.p: {exc}")
    if n < 2:
        problems.append("$.n: need at least 2 servers")
    if not 1 <= k < max(n, 2):
        problems.append("$.k: need 1 <= k < n")
    if m < 1:
        problems.append("$.m: need at least one file")
    stripes = raw.get("stripes")
    if stripes is not None and (not _is_int(stripes) or stripes < 1):
        problems.append("$.stripes: must be a positive integer or null")

    code = raw.get("code", {"kind": "grs"})
    if not isinstance(code, dict) or code.get("kind") not in CODE_FIELDS:
        problems.append(f"$.code.kind: must be one of {sorted(CODE_FIELDS)}")
    else:
        for key in sorted(set(code) - CODE_FIELDS[code["kind"]]):
            problems.append(f"$.code.{key}: unknown field for kind {code['kind']!r}")
        for key in ("eval_points", "multipliers"):
            val = code.get(key)
            if val is not None and (not isinstance(val, list) or len(val) != n or not all(_is_int(v) for v in val)):
                problems.append(f"$.code.{key}: must be a list of {n} integers")
        if code["kind"] == "repetition" and k != 1:
            problems.append("$.k: repetition storage code has k = 1")
        if code["kind"] == "matrix":
            gen = code.get("generator")
            if not isinstance(gen, list) or len(gen) != k or not all(
                isinstance(r, list) and len(r) == n and all(_is_int(v) for v in r) for r in gen
            ):
                problems.append(f"$.code.generator: must be {k} rows of {n} integers")

    files = raw.get("files", {"seed": 0})
    if isinstance(files, dict):
        if set(files) != {"seed"} or not _is_int(files["seed"]):
            problems.append("$.files: object form must be exactly {\"seed\": <int>}")
    elif isinstance(files, list):
        if len(files) != m:
            problems.append(f"$.files: expected {m} files, got {len(files)}")
        for i, f in enumerate(files):
            if not isinstance(f, list) or not f or not all(
                isinstance(s, list) and len(s) == k and all(_is_int(v) for v in s) for s in f
            ):
                problems.append(f"$.files[{i}]: must be a list of stripes, each {k} integers")
            elif stripes is not None and len(f) != stripes:
                problems.append(f"$.files[{i}]: has {len(f)} stripes, config says {stripes}")
    else:
        problems.append("$.files: must be a list of files or {\"seed\": <int>}")

    pattern = raw.get("pattern", [])
    if not isinstance(pattern, list):
        problems.append("$.pattern: must be a list of server sets")
        pattern = []
    for idx, s in enumerate(pattern):
        if not isinstance(s, list) or not s or not all(_is_int(j) for j in s):
            problems.append(f"$.pattern[{idx}]: must be a nonempty list of server labels")
        elif any(not 1 <= j <= n for j in s):
            problems.append(f"$.pattern[{idx}]: server labels must lie in 1..{n}")
    if problems:
        raise ConfigError(problems)
    cfg = SystemConfig(p, n, k, stripes, code, m, files, [list(s) for s in pattern])
    try:
        cfg.storage_code()
    except (CodeError, ValueError) as exc:
        raise ConfigError([f"$.code: {exc}"]) from exc
    return cfg


def load_config(path: str | Path) -> SystemConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError([f"{path}: {exc.strerror}"]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: invalid JSON ({exc})"]) from exc
    return parse_config(raw)


def rate_json(rate: Fraction | None) -> dict | None:
    if rate is None:
        return None
    return {"num": rate.numerator, "den": rate.denominator, "decimal": float(rate)}


def _fmt(rate: Fraction | None) -> str:
    return "infeasible" if rate is None else f"{rate} ({float(rate):.4f})"


def build_system(cfg: SystemConfig, scheme: RetrievalScheme):
    stripes = scheme.blocks
    if cfg.stripes is not None and cfg.stripes != stripes:
        raise ConfigError([f"$.stripes: scheme {scheme.kind!r} needs {stripes} stripes, config says {cfg.stripes}"])
    if isinstance(cfg.files, dict):
        files = random_files(cfg.field, cfg.m, cfg.k, stripes, cfg.files["seed"])
    else:
        files = cfg.files
        if any(len(f) != stripes for f in files):
            raise ConfigError([f"$.files: scheme {scheme.kind!r} needs {stripes} stripes per file"])
    return encode_storage(files, scheme.storage_code, stripes)


def _partition_rates(cfg: SystemConfig, code: LinearCode, pattern: CollusionPattern) -> dict:
    out = {}
    if is_disconnected(pattern) is None:
        return out
    for kind in ("partition", "striped"):
        try:
            out[kind] = build_scheme(kind, code, pattern).rate
        except SchemeError as exc:
            out[kind] = None
            out[kind + "_reason"] = str(exc)
    return out


def rate_report(cfg: SystemConfig) -> tuple[dict, list[str], int]:
    code = cfg.storage_code()
    pattern = cfg.collusion_pattern()
    lines = [f"storage code [{cfg.n},{cfg.k}] over F_{cfg.p}; pattern {_pattern_str(pattern)}"]
    report: dict[str, Any] = {"rate": None, "plan": None}
    status = EXIT_OK
    try:
        plan = plan_rate(pattern, cfg.k)
    except PlanError as exc:
        lines.append(f"information-set plan: {exc}")
        status = EXIT_INFEASIBLE
        plan = None
    if plan is not None:
        lines.append("  t  |I~_t|  rate")
        for c in plan.candidates:
            lines.append(f"  {c.t:<2} {c.i_tilde_size:<6} {c.rate}")
        lines.append(
            f"chosen: t={plan.t}, I={[j + 1 for j in plan.info_set]}, "
            f"retained servers={[j + 1 for j in plan.retained_servers]}, rate {_fmt(plan.rate)}"
        )
        report["rate"] = rate_json(plan.rate)
        report["plan"] = {
            "t": plan.t,
            "info_set": [j + 1 for j in plan.info_set],
            "retained_servers": [j + 1 for j in plan.retained_servers],
            "rate": rate_json(plan.rate),
            "candidates": [
                {"t": c.t, "i_tilde_size": c.i_tilde_size, "rate": rate_json(c.rate)} for c in plan.candidates
            ],
        }
    naive = naive_rate(pattern, cfg.k)
    lines.append(f"naive t-PIR (t = largest colluding set): {_fmt(naive)}")
    report["naive"] = rate_json(naive)
    parts = _partition_rates(cfg, code, pattern)
    if parts:
        report["partition"] = {k: (rate_json(v) if not k.endswith("_reason") else v) for k, v in parts.items()}
        lines.append(f"repetition partition scheme: {_fmt(parts.get('partition'))}")
        lines.append(f"repetition striped scheme: {_fmt(parts.get('striped'))}")
    return report, lines, status


def _pattern_str(pattern: CollusionPattern) -> str:
    sets = ", ".join("{" + ",".join(str(j + 1) for j in sorted(s)) + "}" for s in pattern.maximal_sets)
    return f"<{sets}>"


def _write(report: dict, out: str | None):
    text = json.dumps(report, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_rate(args) -> int:
    cfg = load_config(args.config)
    report, lines, status = rate_report(cfg)
    print("\n".join(lines))
    if args.out or args.json:
        _write(report, args.out)
    return status


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if not 0 <= args.file_index < cfg.m:
        print(f"error: --file-index must lie in 0..{cfg.m - 1}", file=sys.stderr)
        return EXIT_USAGE
    scheme = build_scheme(args.scheme, cfg.storage_code(), cfg.collusion_pattern())
    system = build_system(cfg, scheme)
    transcript = run_retrieval(system, scheme, args.file_index, args.seed)
    report = {
        "rate": rate_json(scheme.rate),
        "scheme": describe(scheme),
        "transcript": transcript.to_json(),
    }
    _write(report, args.out)
    print(
        f"{scheme.kind}: {len(transcript.rounds)} round(s), {transcript.downloaded} responses, "
        f"{transcript.information_symbols} information symbols, rate {scheme.rate}; "
        f"reconstruction {'matched' if transcript.matched else 'MISMATCH'}",
        file=sys.stderr,
    )
    return EXIT_OK if transcript.matched else EXIT_INTERNAL


def _parse_set(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated server labels, got {text!r}")


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    for s in args.add_set:
        if not s or any(not 1 <= j <= cfg.n for j in s):
            raise ConfigError([f"--add-set {s}: server labels must lie in 1..{cfg.n}"])
    scheme = build_scheme(args.scheme, cfg.storage_code(), cfg.collusion_pattern())
    target = cfg.collusion_pattern(args.add_set)
    report = verify_scheme(scheme, target, cap=args.oracle_cap, m=cfg.m)
    out = {"rate": rate_json(scheme.rate), "scheme": describe(scheme), "privacy": report.to_json()}
    _write(out, args.out)
    verdict = "secure" if report.overall else f"INSECURE against {out['privacy']['failing_sets']}"
    print(f"{scheme.kind} vs {_pattern_str(target)}: {verdict}", file=sys.stderr)
    return EXIT_OK if report.overall else EXIT_PRIVACY


DEMOS: dict[str, dict] = {
    "two-server": {
        "config": {"p": 5, "n": 2, "k": 1, "stripes": None, "code": {"kind": "repetition"}, "m": 3,
                   "files": {"seed": 1}, "pattern": [[1], [2]]},
        "scheme": "partition",
        "expected_rate": Fraction(1, 2),
        "expect_insecure": [[1, 2]],
    },
    "grs-5-2": {
        "config": {"p": 5, "n": 5, "k": 2, "stripes": None,
                   "code": {"kind": "matrix", "generator": [[1, 0, 4, 3, 2], [0, 1, 2, 3, 4]]}, "m": 2,
                   "files": {"seed": 1},
                   "pattern": [list(s) for s in itertools.combinations(range(1, 6), 2)] + [[3, 4, 5]]},
        "scheme": "infoset",
        "expected_rate": Fraction(2, 5),
        "expect_insecure": [[1, 2, 3]],
    },
    "infoset-6-2": {
        "config": {"p": 7, "n": 6, "k": 2, "stripes": None, "code": {"kind": "grs"}, "m": 2,
                   "files": {"seed": 1}, "pattern": [[1, 2], [3, 4, 5, 6]]},
        "scheme": "infoset",
        "expected_rate": Fraction(2, 5),
        "expected_naive": Fraction(1, 6),
    },
    "partition-6-3": {
        "config": {"p": 7, "n": 6, "k": 3, "stripes": None, "code": {"kind": "grs"}, "m": 2,
                   "files": {"seed": 1}, "pattern": [[1, 2, 3], [4, 5, 6]]},
        "scheme": "partition",
        "expected_rate": Fraction(1, 2),
    },
    "stripe-9-3": {
        "config": {"p": 11, "n": 9, "k": 3, "stripes": None, "code": {"kind": "grs"}, "m": 2,
                   "files": {"seed": 1}, "pattern": [[1, 2, 3], [4, 5, 6], [7, 8, 9]]},
        "scheme": "striped",
        "expected_rate": Fraction(2, 3),
    },
}


def run_demo(name: str, seeds: int = 10, cap: int = DEFAULT_ORACLE_CAP) -> tuple[bool, list[str]]:
    """Plan, simulate and verify one built-in example; returns (passed, log lines)."""
    demo = DEMOS[name]
    cfg = parse_config(demo["config"])
    lines = [f"demo {name}"]
    checks = []
    if demo["scheme"] == "infoset":
        _, rate_lines, _ = rate_report(cfg)
        lines += ["  " + line for line in rate_lines]
    if "expected_naive" in demo:
        naive = naive_rate(cfg.collusion_pattern(), cfg.k)
        checks.append(("naive rate", naive == demo["expected_naive"], f"{naive} (expected {demo['expected_naive']})"))
    scheme = build_scheme(demo["scheme"], cfg.storage_code(), cfg.collusion_pattern())
    checks.append(("rate", scheme.rate == demo["expected_rate"], f"{scheme.rate} (expected {demo['expected_rate']})"))
    system = build_system(cfg, scheme)
    ok = all(run_retrieval(system, scheme, i, s).matched for i in range(cfg.m) for s in range(seeds))
    checks.append(("reconstruction", ok, f"{cfg.m} files x {seeds} seeds"))
    report = verify_scheme(scheme, cfg.collusion_pattern(), cap=cap, m=cfg.m)
    enumerated = [v.oracle for v in report.sets if v.oracle.equal is not None]
    skipped = [v.oracle for v in report.sets if v.oracle.equal is None]
    detail = f"{len(report.sets)} maximal sets, {len(enumerated)} enumerated"
    if enumerated:
        detail += f" ({max(o.states for o in enumerated)} states/round)"
    if skipped:
        detail += f", {len(skipped)} algebraic only: {skipped[0].reason}"
    checks.append(("privacy", report.overall, detail))
    for extra in demo.get("expect_insecure", []):
        leaky = verify_scheme(scheme, cfg.collusion_pattern([extra]), cap=cap, m=cfg.m)
        checks.append((f"leaks to {extra}", not leaky.overall, f"failing sets {leaky.to_json()['failing_sets']}"))
    for label, passed, detail in checks:
        lines.append(f"  [{'PASS' if passed else 'FAIL'}] {label}: {detail}")
    return all(c[1] for c in checks), lines


def cmd_demo(args) -> int:
    names = list(DEMOS) if args.name == "all" else [args.name]
    status = EXIT_OK
    for name in names:
        passed, lines = run_demo(name, cap=args.oracle_cap)
        print("\n".join(lines))
        if not passed:
            status = EXIT_INTERNAL
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pirlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="plan the best information-set rate for a config")
    p.add_argument("--config", required=True)
    p.add_argument("--json", action="store_true", help="also print the JSON report")
    p.add_argument("--out", help="write the JSON report to this file")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("simulate", help="run one retrieval end to end")
    p.add_argument("--config", required=True)
    p.add_argument("--scheme", required=True, choices=SCHEME_KINDS)
    p.add_argument("--file-index", type=int, default=0, help="0-based index of the wanted file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="transcript JSON path (default: stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="certify privacy of a scheme")
    p.add_argument("--config", required=True)
    p.add_argument("--scheme", required=True, choices=SCHEME_KINDS)
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_ORACLE_CAP)
    p.add_argument("--add-set", type=_parse_set, action="append", default=[],
                   help="extra colluding set to check against, e.g. 1,2,3 (repeatable)")
    p.add_argument("--out", help="privacy report JSON path (default: stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo", help="reproduce a worked example")
    p.add_argument("--name", required=True, choices=list(DEMOS) + ["all"])
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_ORACLE_CAP)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_USAGE
    except (PlanError, SchemeError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CodeError, PatternError, FieldError, SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConsistencyError, ReconstructionError, SingularSystemError, AssertionError) as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
