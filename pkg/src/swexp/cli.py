"""Thin command-line client of the exponent service.

Every command marshals its arguments into a service request and renders the
response (CSV for curves, JSON for everything else).  By default the service
runs in-process; ``--server URL`` targets a remote instance instead, with
identical request and response schemas.

Rates are read and written in nats unless ``--bits`` is given, which converts
command-line rates from bits and renders outputs in bits; the service itself
always works in nats.
"""

from __future__ import annotations

import json
import math
import sys

import click
import httpx


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _fail(resp) -> None:
    try:
        detail = resp.json().get("detail", resp.text)
    except Exception:
        detail = resp.text
    detail = detail if isinstance(detail, str) else json.dumps(detail)
    click.echo(f"error: {detail}", err=True)
    sys.exit(2 if "enumeration limit" in detail else 1)


def _post(server: str | None, path: str, payload: dict) -> dict:
    with _client(server) as client:
        try:
            resp = client.post(path, json=payload)
        except httpx.HTTPError as exc:
            click.echo(f"error: cannot reach service: {exc}", err=True)
            sys.exit(1)
        if resp.status_code != 200:
            _fail(resp)
        return resp.json()


def _source_payload(source: str | None, p: float | None, tau: float | None) -> dict:
    if source is not None:
        if p is not None or tau is not None:
            raise click.UsageError("give either --source or the --p/--tau preset, not both")
        with open(source) as fh:
            doc = json.load(fh)
        return {k: doc[k] for k in ("alphabet_x", "alphabet_y", "joint")}
    if p is None or tau is None:
        raise click.UsageError("need a source: --source FILE or both --p and --tau")
    return {"preset": {"p": p, "tau": tau}}


def _write_json(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        from .curves import write_atomic

        write_atomic(text, out)


source_opts = [
    click.option("--source", type=click.Path(exists=True, dir_okay=False), default=None,
                 help="JSON file with alphabet_x, alphabet_y, joint."),
    click.option("--p", type=float, default=None, help="Preset backward crossover in (0, 1/2)."),
    click.option("--tau", type=float, default=None, help="Preset side-information bias in (0, 1/2]."),
]


def add_opts(opts):
    def deco(fn):
        for opt in reversed(opts):
            fn = opt(fn)
        return fn

    return deco


@click.group()
def main() -> None:
    """Reliability-function toolkit: curves, thresholds, and simulations."""


@main.command()
@add_opts(source_opts)
@click.option("--r-min", type=float, required=True, help="Sweep start (nats; bits with --bits).")
@click.option("--r-max", type=float, required=True, help="Sweep end.")
@click.option("--points", type=int, default=200, show_default=True)
@click.option("--quantities", type=str, default=None,
              help="Comma-separated subset of the curve columns.")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="CSV output path.")
@click.option("--bits", is_flag=True, help="Read rates and write the CSV in bits instead of nats.")
@click.option("--server", type=str, default=None, help="Remote service URL (default: in-process).")
def curve(source, p, tau, r_min, r_max, points, quantities, out, bits, server) -> None:
    """Sweep the fixed- and variable-rate exponent curves to a CSV file."""
    from .curves import QUANTITY_COLUMNS, SwCurvePoint, curve_csv_text, write_atomic

    scale = math.log(2.0) if bits else 1.0
    qlist = tuple(q.strip() for q in quantities.split(",")) if quantities else QUANTITY_COLUMNS
    payload = {
        "source": _source_payload(source, p, tau),
        "sweep": {"r_min": r_min * scale, "r_max": r_max * scale, "points": points,
                  "quantities": list(qlist)},
    }
    doc = _post(server, "/curve", payload)

    def back(v):
        if v is None:
            return None
        if v == "inf":
            return math.inf
        return float(v)

    pts = []
    names = doc["columns"][1:-1]
    for row in doc["rows"]:
        fields = dict(zip(names, (back(v) for v in row[1:-1])))
        pts.append(SwCurvePoint(
            rate=float(row[0]),
            fixed_sp=fields.get("fixed_sp", math.nan),
            fixed_rc=fields.get("fixed_rc", math.nan),
            fixed_ex=fields.get("fixed_ex", math.nan),
            fixed_correct=fields.get("fixed_correct", math.nan),
            var_lower=fields.get("var_lower", math.nan),
            var_upper_sp=fields.get("var_upper_sp", math.nan),
            var_upper_sl=fields.get("var_upper_sl"),
            var_upper_env=fields.get("var_upper_env"),
            var_exact=None,
            flag=row[-1],
        ))
    write_atomic(curve_csv_text(pts, tuple(names), bits=bits), out)
    click.echo(f"wrote {len(pts)} rows to {out}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="JSON simulation config: source, n, rate, trials, seed, mode.")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="JSON result path.")
@click.option("--server", type=str, default=None)
def simulate(config_path, out, server) -> None:
    """Run one Monte Carlo (or exact-accounting) simulation to a JSON file."""
    with open(config_path) as fh:
        cfg = json.load(fh)
    missing = [k for k in ("source", "n", "rate", "trials", "seed", "mode") if k not in cfg]
    if missing:
        raise click.UsageError(f"config is missing fields: {', '.join(missing)}")
    doc = _post(server, "/simulate", cfg)
    _write_json(doc, out)
    click.echo(f"wrote result to {out}")


@main.command()
@add_opts(source_opts)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Optional JSON output path.")
@click.option("--server", type=str, default=None)
def thresholds(source, p, tau, out, server) -> None:
    """Rate landmarks: capacity, floors, critical and crossover rates, windows."""
    doc = _post(server, "/thresholds", {"source": _source_payload(source, p, tau)})
    _write_json(doc, out)


@main.command("second-order")
@add_opts(source_opts)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--server", type=str, default=None)
def second_order(source, p, tau, out, server) -> None:
    """Curvature of the variable-rate reliability at the Slepian-Wolf limit."""
    doc = _post(server, "/second-order", {"source": _source_payload(source, p, tau)})
    _write_json(doc, out)


@main.command()
@add_opts(source_opts)
@click.option("--rate", type=float, required=True, help="Coding rate (nats; bits with --bits).")
@click.option("--bits", is_flag=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--server", type=str, default=None)
def pcmax(source, p, tau, rate, bits, out, server) -> None:
    """Largest achievable correct-decoding probability at or below the limit."""
    scale = math.log(2.0) if bits else 1.0
    doc = _post(server, "/pcmax", {"source": _source_payload(source, p, tau), "rate": rate * scale})
    _write_json(doc, out)


if __name__ == "__main__":
    main()
