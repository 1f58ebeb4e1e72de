"""Command-line front end: ``ddservices <command> --scenario file.json``.

Reports are JSON with sorted keys; non-integral numbers are written as
exact ``"p/q"`` strings so committed reports are byte-stable. Exit status
is 0 on success, 1 on a validation error and 2 on an infeasible instance.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from .adequacy import (
    InadequateSupplyError,
    count_interruptions,
    is_adequate,
    is_exactly_adequate,
    llf_allocate,
    local_minima,
)
from .dayahead import TwoStagePrices, minimize_dayahead
from .demand import duration_vector
from .majorization import first_tail_violation, sort_desc, tail_sums
from .market import (
    CONCAVE,
    InfeasibleAllocationError,
    MarketPreconditionError,
    check_equilibrium,
    efficiency_gap,
    equilibrium,
    social_welfare_optimum,
    spot_simulate,
    welfare,
)
from .procurement import oracle_purchase, runtime_purchase, shortfall
from .rate import RateSpec, UnservableSpecError, decompose, split_allocation
from .scenario import Scenario, ScenarioError, read_scenario

CONCAVE_NOTE = (
    "k_star is the largest k with U(k) - U(k-1) >= c_da; every consumer "
    "receives k_star slots"
)

INFEASIBLE = (
    UnservableSpecError,
    InadequateSupplyError,
    MarketPreconditionError,
    InfeasibleAllocationError,
)


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str, path: str = ""):
        super().__init__(message)
        self.code, self.kind, self.path = code, kind, path


def jsonable(obj):
    """Convert library values to plain JSON, rationals as ints or "p/q"."""
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _supply_rows(d, p):
    p_desc = sort_desc(p)
    rows = []
    for t, (dt, pt, dtail, ptail) in enumerate(
        zip(d, p_desc, tail_sums(d), tail_sums(p_desc)), start=1
    ):
        rows.append({"slot": t, "demand_duration": dt, "supply_sorted": pt,
                     "demand_tail": dtail, "supply_tail": ptail})
    return rows


def cmd_adequacy(sc: Scenario):
    sc.require("loads", "supply")
    d = tuple(duration_vector(sc.durations()))
    p = sc.supply
    report = {
        "d": d,
        "supply": p,
        "adequate": is_adequate(p, d),
        "exact": is_exactly_adequate(p, d),
        "first_violation": first_tail_violation(d, p),
        "shortfall": shortfall(p, d),
    }
    return report, _supply_rows(d, p)


def cmd_allocate(sc: Scenario):
    sc.require("loads", "supply")
    h = sc.durations()
    A = llf_allocate(sc.supply, h)
    used = A.sum(axis=0)
    report = {
        "durations": h.durations,
        "supply": sc.supply,
        "allocation": A,
        "used": used,
        "unused": np.asarray(sc.supply, dtype=np.int64) - used,
        "interruptions": [count_interruptions(row) for row in A],
        "supply_local_minima": local_minima(sc.supply),
    }
    d = tuple(duration_vector(h))
    rows = _supply_rows(d, sc.supply)
    for row, t in zip(rows, range(sc.horizon)):
        row["supply"] = sc.supply[t]
        row["used"] = int(used[t])
    return report, rows


def cmd_procure(sc: Scenario):
    sc.require("loads", "supply", "c_rt")
    d = tuple(duration_vector(sc.durations()))
    p, c = sc.supply, sc.c_rt
    oracle = oracle_purchase(p, d, c)
    runtime, A = runtime_purchase(d, p, c)
    report = {
        "d": d,
        "supply": p,
        "unit_price": c,
        "shortfall": shortfall(p, d),
        "closed_form_cost": c * shortfall(p, d),
        "oracle": {"purchases": oracle.purchases, "cost": oracle.total_cost},
        "runtime": {"purchases": runtime.purchases, "cost": runtime.total_cost,
                    "allocation": A},
    }
    rows = [{"slot": t + 1, "supply": p[t], "oracle": oracle.purchases[t],
             "runtime": runtime.purchases[t]} for t in range(sc.horizon)]
    return report, rows


def cmd_dayahead(sc: Scenario):
    sc.require("loads", "distribution", "c_da", "c_rt")
    d = tuple(duration_vector(sc.durations()))
    prices = TwoStagePrices(sc.c_da, sc.c_rt)
    res = minimize_dayahead(d, sc.distribution, prices, y_cap=sc.y_cap)
    report = {
        "d": d,
        "y": res.y,
        "cost": res.cost,
        "y_cap": res.y_cap,
        "at_cap": res.at_cap,
        "method": res.method,
    }
    rows = [{"slot": t + 1, "demand_duration": d[t], "y": res.y[t]} for t in range(sc.horizon)]
    return report, rows


def _market_rows(sc, d, y):
    r_desc = sort_desc(sc.supply)
    return [{"slot": t + 1, "renewable_sorted": r_desc[t], "d": d[t], "y": y[t]}
            for t in range(sc.horizon)]


def cmd_welfare(sc: Scenario):
    sc.require("supply", "consumers", "utility", "c_da")
    opt = social_welfare_optimum(sc.supply, sc.consumers, sc.utility, sc.c_da)
    report = {
        "curvature": sc.utility.curvature,
        "k_star": opt.k_star,
        "d": tuple(opt.d),
        "durations": opt.h.durations,
        "y": opt.y,
        "welfare": opt.welfare,
    }
    if sc.utility.curvature == CONCAVE:
        report["note"] = CONCAVE_NOTE
    return report, _market_rows(sc, tuple(opt.d), opt.y)


def cmd_equilibrium(sc: Scenario):
    sc.require("supply", "consumers", "utility", "c_da")
    out = equilibrium(sc.supply, sc.consumers, sc.utility, sc.c_da)
    check = check_equilibrium(out, sc.supply, sc.utility, sc.c_da)
    d = tuple(duration_vector(out.demand))
    report = {
        "curvature": sc.utility.curvature,
        "k_star": out.k_star,
        "prices": out.prices,
        "production": out.production,
        "durations": out.demand.durations,
        "d": d,
        "y": out.dayahead_purchase,
        "welfare": welfare(out.demand, out.dayahead_purchase, sc.supply, sc.utility, sc.c_da),
        "verified": bool(check),
        "checks": {
            "consumer_surplus": check.consumer_surplus,
            "profit_max": check.profit_max,
            "market_clearing": check.market_clearing,
            "exhaustive": check.exhaustive,
        },
    }
    if sc.utility.curvature == CONCAVE:
        report["note"] = CONCAVE_NOTE
    return report, _market_rows(sc, d, out.dayahead_purchase)


def _spot_price(sc: Scenario):
    if sc.c_rt is None and sc.c_da is None:
        raise ScenarioError("prices.c_rt or prices.c_da is required for this command", "prices")
    if sc.c_rt is not None and sc.c_da is not None and sc.c_rt != sc.c_da:
        raise ScenarioError("this command needs c_da == c_rt", "prices")
    return sc.c_rt if sc.c_rt is not None else sc.c_da


def cmd_spot(sc: Scenario):
    sc.require("supply", "consumers", "utility", "c_rt")
    tr = spot_simulate(sc.supply, sc.consumers, sc.utility, sc.c_rt)
    report = {
        "prices": tr.prices,
        "topups": tr.topups,
        "purchases": tr.purchases,
        "holdings": tr.holdings,
        "payments": tr.payments,
        "utilities": tr.utilities,
        "consumer_net": tr.consumer_net,
        "supplier_profit": tr.supplier_profit,
        "topup_cost": tr.topup_cost,
        "welfare": tr.welfare,
    }
    rows = [{"slot": t + 1, "renewable": sc.supply[t], "price": jsonable(tr.prices[t]),
             "topup": tr.topups[t]} for t in range(sc.horizon)]
    return report, rows


def cmd_compare(sc: Scenario):
    sc.require("supply", "consumers", "utility")
    price = _spot_price(sc)
    gap = efficiency_gap(sc.supply, sc.consumers, sc.utility, price)
    report = {"forward": gap.forward, "spot": gap.spot, "gap": gap.gap, "price": price}
    tr = spot_simulate(sc.supply, sc.consumers, sc.utility, price)
    rows = [{"slot": t + 1, "renewable": sc.supply[t], "spot_price": jsonable(tr.prices[t]),
             "topup": tr.topups[t]} for t in range(sc.horizon)]
    return report, rows


def cmd_decompose(sc: Scenario):
    sc.require("loads")
    items, rows = [], []
    for index, spec in sc.rate_specs:
        k, r = spec.split()
        h = decompose(spec)
        items.append({"load": index, "energy": spec.energy, "max_rate": spec.max_rate,
                      "k": k, "r": r, "durations": h.durations})
        for unit, dur in enumerate(h.durations):
            rows.append({"load": index, "unit": unit, "duration": dur})
    report = {"decompositions": items, "durations": sc.durations().durations}
    if sc.supply is not None:
        # serve the unit loads, then fold them back into per-spec rates
        A = llf_allocate(sc.supply, sc.durations())
        rates, row = [], 0
        for item in sc.loads:
            width = item.max_rate if isinstance(item, RateSpec) else 1
            rates.append(A[row:row + width].sum(axis=0))
            if isinstance(item, RateSpec):
                split_allocation(rates[-1], item)  # round-trip sanity check
            row += width
        report["rate_allocation"] = rates
    return report, rows


COMMANDS: dict[str, Callable] = {
    "adequacy": cmd_adequacy,
    "allocate": cmd_allocate,
    "procure": cmd_procure,
    "dayahead": cmd_dayahead,
    "welfare": cmd_welfare,
    "equilibrium": cmd_equilibrium,
    "spot": cmd_spot,
    "compare": cmd_compare,
    "decompose": cmd_decompose,
}

HELP = {
    "adequacy": "test whether the supply can serve the loads",
    "allocate": "least-laxity-first allocation matrix",
    "procure": "minimum supplemental purchase, oracle and run-time",
    "dayahead": "optimal day-ahead purchase under scenario uncertainty",
    "welfare": "social-welfare-optimal durations",
    "equilibrium": "competitive equilibrium prices and production",
    "spot": "simulate the myopic spot market",
    "compare": "forward versus spot welfare",
    "decompose": "split rate-limited loads into unit-rate loads",
}


def render_json(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2) + "\n"


def render_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["field", "value"])
    for key, value in sorted(jsonable(report).items()):
        if isinstance(value, (list, dict)):
            value = json.dumps(value, sort_keys=True, separators=(",", ":"))
        elif isinstance(value, bool):
            value = "true" if value else "false"
        w.writerow([key, "" if value is None else value])
    return buf.getvalue()


def write_plot_data(path: str, rows: list[dict]) -> None:
    fields: list[str] = []
    for row in rows:
        fields.extend(k for k in row if k not in fields)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: jsonable(v) for k, v in row.items()})


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(1, "usage", message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, metavar="PATH", help="scenario JSON file")
    common.add_argument("--emit-plot-data", metavar="PATH", help="write CSV series for plotting")
    common.add_argument("--seed", type=int, help="recorded in the report; no computation is random")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    parser = _Parser(prog="ddservices", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ddservices {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=HELP[name])
    return parser


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        try:
            sc = read_scenario(args.scenario)
            body, rows = COMMANDS[args.command](sc)
        except INFEASIBLE as exc:
            raise CliError(2, "infeasible", str(exc)) from exc
        except ScenarioError as exc:
            raise CliError(1, "validation", str(exc), exc.path) from exc
        except ValueError as exc:
            raise CliError(1, "validation", str(exc)) from exc
    except CliError as exc:
        error = {"error": {"kind": exc.kind, "message": str(exc), "path": exc.path},
                 "version": __version__}
        stdout.write(render_json(error))
        return exc.code
    seed = args.seed if args.seed is not None else sc.seed
    report = {"command": args.command, "version": __version__,
              "input_digest": sc.digest, "seed": seed, **body}
    if sc.name is not None:
        report["scenario"] = sc.name
    stdout.write(render_json(report) if args.format == "json" else render_csv(report))
    if args.emit_plot_data:
        write_plot_data(args.emit_plot_data, rows)
    return 0


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))
