"""Command-line front end: ``heegner-lab <verb> [flags]``."""

from __future__ import annotations

import argparse
import io
import json
import sys
from contextlib import redirect_stderr, redirect_stdout
from dataclasses import dataclass, field

from .discform import default_budget, discriminant_form, enumerate_isometries
from .errors import HeegnerLabError, ValidationError
from .hk import SCHEMA, analyze, normality
from .hperp import disc_group_omega1, hperp_report, make_polarization, perp_gram
from .lattice import parse_lattice_description
from .reflections import SymbolicPerpVector, classify_reflection, enumerate_ramification_classes

VERBS = ("lattice", "disc-form", "normality", "classify", "enumerate", "analyze", "verify-paper")

# flag defaults that apply when neither the command line nor a config file sets them
DEFAULTS = {"format": "table", "jobs": 1, "scale": 1, "quick": False, "group": False}


@dataclass
class Command:
    verb: str
    params: dict = field(default_factory=dict)
    format: str = "table"
    budget: int = 20000


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}", rule="cli_usage")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("table", "json"), default=None)
    common.add_argument("--json", dest="format", action="store_const", const="json")
    common.add_argument("--budget", type=int, default=None, help="max |A| for exhaustive enumeration")
    common.add_argument("--config", default=None, help="JSON file with flag values; flags win")

    p = _Parser(prog="heegner-lab", description="Exact lattice tools for polarized hyperkahler period spaces.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("lattice", parents=[common], help="Gram matrix and invariants of a block sum")
    s.add_argument("--desc", default=None, help='e.g. "U+U+E8(-1)+Z(-2)" or {"blocks": [...]}')

    s = sub.add_parser("disc-form", parents=[common], help="discriminant form of a lattice or of h-perp")
    s.add_argument("--desc", default=None)
    for flag in ("--t", "--d", "--gamma", "--c"):
        s.add_argument(flag, type=int, default=None)
    s.add_argument("--group", action="store_const", const=True, default=None, help="also enumerate O(A)")

    s = sub.add_parser("normality", parents=[common], help="is the monodromy group normal in O(h-perp)")
    for flag in ("--t", "--d", "--gamma", "--c"):
        s.add_argument(flag, type=int, default=None)

    s = sub.add_parser("classify", parents=[common], help="Galois label of one reflection vector")
    s.add_argument("--t", type=int, default=None)
    s.add_argument("--d", type=int, default=None)
    s.add_argument("--beta", default=None, help="a,msq,b,c")

    s = sub.add_parser("enumerate", parents=[common], help="ramification classes for divisibility 1")
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--d", type=int, default=None)
    s.add_argument("--jobs", type=int, default=None)
    s.add_argument("--scale", type=int, default=None, help="box scale factor (2 = doubled box)")

    s = sub.add_parser("analyze", parents=[common], help="normality, Galois group and divisor reports")
    for flag in ("--m", "--d", "--gamma", "--c", "--jobs"):
        s.add_argument(flag, type=int, default=None)

    s = sub.add_parser("verify-paper", parents=[common], help="run the named reproducibility checks")
    s.add_argument("--quick", action="store_const", const=True, default=None, help="skip the long sweeps")
    return p


def parse_command(argv: list[str]) -> Command:
    ns = vars(build_parser().parse_args(argv))
    verb = ns.pop("verb")
    config_path = ns.pop("config")
    config = {}
    if config_path:
        try:
            with open(config_path, encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {config_path}: {exc}", rule="cli_config") from exc
        if not isinstance(config, dict):
            raise ValidationError("config must be a JSON object", rule="cli_config")
        unknown = set(config) - set(ns)
        if unknown:
            raise ValidationError(f"unknown config keys for {verb}: {sorted(unknown)}", rule="cli_config")
    params = {}
    for key, val in ns.items():
        if val is None:
            val = config.get(key, DEFAULTS.get(key))
        params[key] = val
    fmt = params.pop("format")
    budget = params.pop("budget")
    if budget is None:
        budget = default_budget()
    if not isinstance(budget, int) or budget < 1:
        raise ValidationError("--budget must be a positive integer", rule="cli_usage")
    if fmt not in ("table", "json"):
        raise ValidationError(f"unknown format {fmt!r}", rule="cli_usage")
    return Command(verb, params, fmt, budget)


def _require(params: dict, *names: str) -> list:
    missing = [n for n in names if params.get(n) is None]
    if missing:
        raise ValidationError("missing required flag(s): " + ", ".join("--" + n for n in missing), rule="cli_usage")
    return [params[n] for n in names]


# --- verbs --------------------------------------------------------------------


def do_lattice(cmd: Command) -> dict:
    (desc,) = _require(cmd.params, "desc")
    L = parse_lattice_description(desc)
    A = discriminant_form(L)
    return {
        "rank": L.rank,
        "det": L.det,
        "gram": [list(r) for r in L.gram],
        "disc_orders": [n for n in A.orders if n > 1],
    }


def do_disc_form(cmd: Command) -> dict:
    p = cmd.params
    if p.get("desc") is not None:
        A = discriminant_form(parse_lattice_description(p["desc"]))
        out = {"source": "lattice", "form": A.to_json()}
    else:
        t, d, gamma = _require(p, "t", "d", "gamma")
        pol = make_polarization(t, d, gamma, p.get("c"))
        A = disc_group_omega1(pol) if pol.omega == 1 else discriminant_form(perp_gram(pol, 0).block)
        out = {"source": "hperp", "hperp": hperp_report(pol), "form": A.to_json()}
    if p.get("group"):
        out["O_A_order"] = len(enumerate_isometries(A, cmd.budget))
    return out


def do_normality(cmd: Command) -> dict:
    t, d, gamma = _require(cmd.params, "t", "d", "gamma")
    pol = make_polarization(t, d, gamma, cmd.params.get("c"))
    verdict = normality(t, d, gamma, pol.c, cmd.budget)
    return {"polarization": pol.to_json(), "normality": verdict.to_json()}


def do_classify(cmd: Command) -> dict:
    t, d, text = _require(cmd.params, "t", "d", "beta")
    if t < 1 or d < 1:
        raise ValidationError("t and d must be positive")
    beta = SymbolicPerpVector.parse(text)
    return {"t": t, "d": d, "class": classify_reflection(t, d, beta).to_json()}


def do_enumerate(cmd: Command) -> dict:
    m, d = _require(cmd.params, "m", "d")
    jobs, scale = cmd.params["jobs"], cmd.params["scale"]
    if jobs < 1 or scale < 1:
        raise ValidationError("--jobs and --scale must be positive", rule="cli_usage")
    enum = enumerate_ramification_classes(m, d, budget=cmd.budget, jobs=jobs, scale=scale)
    # jobs is deliberately left out so output does not depend on it
    return {
        "m": m,
        "d": d,
        "gamma": 1,
        "scale": scale,
        "classes": [c.to_json() for c in enum.classes],
        "unrealized_squares": list(enum.unrealized_squares),
    }


def do_analyze(cmd: Command) -> dict:
    m, d, gamma = _require(cmd.params, "m", "d", "gamma")
    if m < 2:
        raise ValidationError("m must be at least 2")
    pol = make_polarization(m - 1, d, gamma, cmd.params.get("c"))  # several admissible c need an explicit --c
    return analyze(m, d, gamma, pol.c, cmd.budget, cmd.params["jobs"])


def do_verify(cmd: Command) -> dict:
    from .checks import run_checks

    results = run_checks(full=not cmd.params.get("quick"))
    return {"checks": [r.to_json() for r in results], "passed": all(r.passed for r in results)}


HANDLERS = {
    "lattice": do_lattice,
    "disc-form": do_disc_form,
    "normality": do_normality,
    "classify": do_classify,
    "enumerate": do_enumerate,
    "analyze": do_analyze,
    "verify-paper": do_verify,
}


# --- rendering ----------------------------------------------------------------


def dumps(payload: dict) -> str:
    return json.dumps({"schema": SCHEMA, **payload}, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _table(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for k in sorted(value):
            v = value[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_table(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, dict):
                sub = _table(item, indent + 1)
                lines.append(f"{pad}- " + sub[0].strip())
                lines.extend(sub[1:])
            else:
                lines.append(f"{pad}- {_inline(item)}")
    else:
        lines.append(pad + _inline(value))
    return lines


def _flat(v) -> bool:
    if isinstance(v, dict):
        return False
    return all(not isinstance(x, dict) and (not isinstance(x, list) or all(not isinstance(y, (list, dict)) for y in x)) for x in v)


def _inline(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    return str(v)


def render(cmd: Command, payload: dict) -> str:
    if cmd.format == "json":
        return dumps(payload)
    if cmd.verb == "verify-paper":
        lines = [f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}: {c['detail']}" for c in payload["checks"]]
        lines.append("all checks passed" if payload["passed"] else "SOME CHECKS FAILED")
        return "\n".join(lines) + "\n"
    return "\n".join(_table(payload)) + "\n"


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    argv = sys.argv[1:] if argv is None else list(argv)
    as_json = "--json" in argv or any(a == "json" and i and argv[i - 1] == "--format" for i, a in enumerate(argv))
    try:
        if any(a in ("-h", "--help") for a in argv):
            try:
                build_parser().parse_args(argv)
            except SystemExit as exc:
                return int(exc.code or 0)
        cmd = parse_command(argv)
        payload = HANDLERS[cmd.verb](cmd)
    except HeegnerLabError as exc:
        if as_json:
            out.write(dumps({"error": {"rule": exc.rule, "message": str(exc), "exit_code": exc.exit_code}}))
        print(f"error [{exc.rule}]: {exc}", file=err)
        return exc.exit_code
    out.write(render(cmd, payload))
    if cmd.verb == "verify-paper" and not payload["passed"]:
        return 1
    return 0


def run_capture(argv: list[str]) -> tuple[int, str, str]:
    """Run in-process and capture (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
