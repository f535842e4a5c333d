"""Command line interface.

Exit codes: 0 success, 1 a verification failed, 2 usage error,
3 a computation exceeded its enumeration budget under --strict.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction

import click

from .diagram_core import (
    DiagramError,
    LegKind,
    LinComb,
    SpaceTag,
    lincomb_from_json_obj,
    lincomb_to_json_obj,
    parse,
    serialize,
)
from . import checks as _checks
from . import enumerative as en
from . import maps
from . import operator_calc as oc
from . import quotient as qt

BUDGET_EXIT = 3

_SPACES = {t.value: t for t in SpaceTag}
_KINDS = {k.value: k for k in LegKind}


def _fail(msg: str) -> None:
    raise click.ClickException(msg)


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, indent=2, sort_keys=True, default=str))


def _read_lincomb(text: str, space: SpaceTag = None) -> LinComb:
    """Parse either a diagram literal or a JSON linear combination."""
    text = text.strip()
    if text.startswith("{"):
        return lincomb_from_json_obj(json.loads(text))
    d = parse(text, space)
    return LinComb.of(d)


def _lincomb_out(x: LinComb, fmt: str) -> None:
    if fmt == "json":
        _echo_json(lincomb_to_json_obj(x))
    else:
        if x.is_zero():
            click.echo("0")
        for d, c in sorted(x.terms.items(), key=lambda kv: serialize(kv[0])):
            click.echo(f"{c}  {serialize(d)}")


@click.group()
def main() -> None:
    """Exact-arithmetic engine for a graded diagram calculus."""


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


@main.command()
@click.option("--checks", "names", default=None,
              help="Comma separated check names (default: all).")
@click.option("--list", "list_only", is_flag=True, help="List check names.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text")
@click.option("--strict", is_flag=True,
              help="Exit 3 when an enumeration budget is exceeded.")
def verify(names, list_only, fmt, strict):
    """Run named verification checks."""
    if list_only:
        for name, spec in _checks.CHECKS.items():
            click.echo(f"{name:28s} [{spec.criteria}] {spec.description}")
        return
    if names:
        wanted = [n.strip() for n in names.split(",") if n.strip()]
        unknown = [n for n in wanted if n not in _checks.CHECKS]
        if unknown:
            _fail("unknown checks: " + ", ".join(unknown))
    else:
        wanted = list(_checks.CHECKS)
    results = []
    for name in wanted:
        try:
            r = _checks.run_check(name)
        except qt.BudgetExceeded as exc:
            if strict:
                click.echo(f"BUDGET {name}: {exc}", err=True)
                sys.exit(BUDGET_EXIT)
            r = _checks.CheckResult(name, False, {"budget_exceeded": str(exc)})
        results.append(r)
        if fmt == "text":
            status = "PASS" if r.passed else "FAIL"
            click.echo(f"{status} {name} ({r.elapsed:.2f}s)")
    if fmt == "json":
        _echo_json([r.to_json_obj() for r in results])
    if not all(r.passed for r in results):
        sys.exit(1)


# ---------------------------------------------------------------------------
# map
# ---------------------------------------------------------------------------

_MAPS = {
    "chi_B": maps.chi_B,
    "upsilon": maps.upsilon,
    "chi_W": maps.chi_W,
    "pi_hat": maps.pi_hat,
    "fat_to_F": maps.fat_to_F,
    "phi_A": maps.phi_A,
    "lambda": maps.lambda_map,
    "chi_wedge": maps.chi_wedge,
    "d_omega": maps.d_omega,
    "main-lhs": maps.main_lhs,
    "main-rhs": maps.main_rhs,
}


@main.command("map")
@click.option("--name", required=True, type=click.Choice(sorted(_MAPS)))
@click.option("--input", "text", default="-",
              help="Diagram literal or JSON lincomb ('-' reads stdin).")
@click.option("--space", default=None, type=click.Choice(sorted(_SPACES)),
              help="Space tag for a bare diagram literal.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text")
def map_cmd(name, text, space, fmt):
    """Apply one of the structure maps to a vector."""
    if text == "-":
        text = sys.stdin.read()
    try:
        x = _read_lincomb(text, _SPACES[space] if space else None)
        y = _MAPS[name](x)
    except DiagramError as exc:
        _fail(str(exc))
    _lincomb_out(y, fmt)


# ---------------------------------------------------------------------------
# reduce
# ---------------------------------------------------------------------------


@main.command("reduce")
@click.option("--input", "text", default="-",
              help="Diagram literal or JSON lincomb ('-' reads stdin).")
@click.option("--space", default=None, type=click.Choice(sorted(_SPACES)))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text")
@click.option("--strict", is_flag=True)
def reduce_cmd(text, space, fmt, strict):
    """Reduce a vector to quotient-space normal form."""
    if text == "-":
        text = sys.stdin.read()
    try:
        x = _read_lincomb(text, _SPACES[space] if space else None)
        y = qt.reduce(x)
    except DiagramError as exc:
        _fail(str(exc))
    except qt.BudgetExceeded as exc:
        click.echo(f"BUDGET {exc}", err=True)
        sys.exit(BUDGET_EXIT if strict else 1)
    _lincomb_out(y, fmt)


# ---------------------------------------------------------------------------
# op-product
# ---------------------------------------------------------------------------


@main.command("op-product")
@click.option("--mode", type=click.Choice(["vdash", "sharp"]), default="vdash")
@click.option("--left", required=True, help="Diagram literal or JSON lincomb.")
@click.option("--right", required=True, help="Diagram literal or JSON lincomb.")
@click.option("--space", default=None, type=click.Choice(sorted(_SPACES)))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text")
def op_product(mode, left, right, space, fmt):
    """Multiply two operator vectors."""
    try:
        tag = _SPACES[space] if space else None
        x = _read_lincomb(left, tag)
        y = _read_lincomb(right, tag)
        if mode == "vdash":
            z = oc.vdash(x, y)
        else:
            from .diagram_core import juxtapose
            z = juxtapose(x, y)
    except DiagramError as exc:
        _fail(str(exc))
    _lincomb_out(z, fmt)


# ---------------------------------------------------------------------------
# enum
# ---------------------------------------------------------------------------


@main.command("enum")
@click.option("--family", required=True, type=click.Choice(list(en.FAMILIES)))
@click.option("--n", "size", required=True, type=int)
@click.option("--count-only", is_flag=True)
@click.option("--limit", default=None, type=int,
              help="Print at most this many elements.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text")
def enum_cmd(family, size, count_only, limit, fmt):
    """Enumerate an arrow family, or just count it."""
    closed = en.family_cardinality(family, size)
    if count_only:
        obj = {"family": family, "n": size, "cardinality": str(closed)}
        _echo_json(obj) if fmt == "json" else click.echo(closed)
        return
    shown = []
    total = 0
    for w in en.enumerate_family(family, size):
        if limit is None or total < limit:
            shown.append(str(w))
        total += 1
    obj = {"family": family, "n": size, "count": total,
           "closed_form": closed, "elements": shown}
    if fmt == "json":
        _echo_json(obj)
    else:
        for s in shown:
            click.echo(s)
        click.echo(f"# total {total} (closed form {closed})")


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------

_SERIES = {
    "tanh": en.series_tanh,
    "logcosh": en.series_logcosh,
    "psi": en.series_psi,
    "wheels": en.series_wheels,
}


@main.command("series")
@click.option("--name", required=True, type=click.Choice(sorted(_SERIES)))
@click.option("--order", default=8, type=int)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text")
def series_cmd(name, order, fmt):
    """Print an exact power series through the given order."""
    s = _SERIES[name](order)
    coeffs = {k: s.coefficient(k) for k in range(order + 1)}
    if fmt == "json":
        _echo_json({"name": name, "order": order,
                    "coefficients": {str(k): str(v) for k, v in coeffs.items()}})
    else:
        for k, v in coeffs.items():
            click.echo(f"x^{k}: {v}")


# ---------------------------------------------------------------------------
# contrib
# ---------------------------------------------------------------------------


@main.command("contrib")
@click.option("--which", required=True,
              type=click.Choice(list(en.CONTRIBUTION_KEYS)))
@click.option("--max-n", default=4, type=int)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text")
def contrib_cmd(which, max_n, fmt):
    """Brute-force connected contributions of one class vs closed form."""
    rep = en.connected_contributions(max_n)
    rows = rep[which]
    if fmt == "json":
        _echo_json({"which": which, "rows": rows})
    else:
        for r in rows:
            mark = "ok" if r["match"] else "MISMATCH"
            click.echo(f"n={r['n']}: brute={r['brute']} closed={r['closed']} {mark}")
    if not all(r["match"] for r in rows):
        sys.exit(1)


# ---------------------------------------------------------------------------
# dump-basis
# ---------------------------------------------------------------------------


@main.command("dump-basis")
@click.option("--space", required=True, type=click.Choice(sorted(_SPACES)))
@click.option("--internal", default=0, type=int)
@click.option("--legs", default="",
              help="Comma separated kind:count, e.g. 'p1:2,F:1'.")
@click.option("--circles", default=0, type=int)
@click.option("--reduce", "do_reduce", is_flag=True,
              help="Also print the quotient dimension of the slice.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text")
@click.option("--strict", is_flag=True)
def dump_basis(space, internal, legs, circles, do_reduce, fmt, strict):
    """List the canonical diagrams of one graded slice."""
    leg_spec = {}
    if legs:
        for part in legs.split(","):
            kind, _, num = part.partition(":")
            if kind not in _KINDS:
                _fail(f"unknown leg kind {kind!r}")
            leg_spec[_KINDS[kind]] = int(num or "1")
    try:
        slc = qt.GradedSlice.make(_SPACES[space], internal, leg_spec, circles)
        ds = qt.enumerate_slice(slc, qt.DEFAULT_BUDGET)
        dim = qt.dim(slc) if do_reduce else None
    except DiagramError as exc:
        _fail(str(exc))
    except qt.BudgetExceeded as exc:
        click.echo(f"BUDGET {exc}", err=True)
        sys.exit(BUDGET_EXIT if strict else 1)
    if fmt == "json":
        obj = {"space": space, "internal": internal, "circles": circles,
               "legs": {k.value: v for k, v in leg_spec.items()},
               "count": len(ds), "diagrams": [serialize(d) for d in ds]}
        if dim is not None:
            obj["quotient_dim"] = dim
        _echo_json(obj)
    else:
        for d in ds:
            click.echo(serialize(d))
        click.echo(f"# {len(ds)} spanning diagrams")
        if dim is not None:
            click.echo(f"# quotient dimension {dim}")


if __name__ == "__main__":
    main()
