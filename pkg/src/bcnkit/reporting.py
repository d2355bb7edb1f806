"""Machine- and human-readable analysis reports for a cascade.

The report bundles the constant-input equilibrium tables (per component
and combined with outputs) with observability and reconstructibility
verdicts for both components and the flattened system.  The JSON form
is versioned and deterministic so golden-file comparisons stay stable.
"""

from __future__ import annotations

from typing import Any

from .network import Bcn, Cascade
from .observability import (
    indistinguishable_pairs,
    is_reconstructible,
    is_weakly_observable,
)
from .reachability import equilibrium_table

FORMAT_VERSION = 1

_MAX_LISTED_PAIRS = 12


def build_report(cascade: Cascade, max_horizon: int = 16) -> dict[str, Any]:
    """Assemble the full analysis report as a JSON-ready dictionary."""
    table = equilibrium_table(cascade)
    report: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "model": {
            "upstream": _dims(cascade.upstream),
            "downstream": _dims(cascade.downstream),
            "channels": [
                {"name": n, "dim": d}
                for n, d in zip(cascade.channels, cascade.channel_dims)
            ],
        },
        "component_equilibria": [
            {
                "condition": g.condition,
                "pairs": [list(p) for p in g.pairs],
                "combinations": len(g.rows),
            }
            for g in table.grouped_by_pairs()
        ],
        "combined_table": [
            {
                "condition": g.condition,
                "pairs": [list(p) for p in g.pairs],
                "outputs": list(g.outputs),
                "combinations": len(g.rows),
            }
            for g in table.grouped_by_outputs()
        ],
    }
    flat = cascade.flatten()
    report["observability"] = {
        name: _observability_entry(model)
        for name, model in (
            ("upstream", cascade.upstream),
            ("downstream", cascade.downstream),
            ("flattened", flat),
        )
    }
    report["reconstructibility"] = {
        name: _reconstructibility_entry(model, max_horizon)
        for name, model in (
            ("upstream", cascade.upstream),
            ("downstream", cascade.downstream),
            ("flattened", flat),
        )
    }
    return report


def _dims(b: Bcn) -> dict[str, int]:
    return {"N": b.n_states, "M": b.n_inputs, "P": b.n_outputs}


def _observability_entry(b: Bcn) -> dict[str, Any]:
    result = indistinguishable_pairs(b)
    cap = max(1, 2 * b.n_states * b.n_states)
    weak = is_weakly_observable(b, cap)
    return {
        "observable": result.observable,
        "indistinguishable_pairs": sorted(list(p) for p in result.pairs),
        "weakly_observable": weak.weakly_observable,
    }


def _reconstructibility_entry(b: Bcn, max_horizon: int) -> dict[str, Any]:
    verdict = is_reconstructible(b, max_horizon)
    return {
        "reconstructible": verdict.reconstructible,
        "horizon": verdict.horizon,
        "horizon_capped": verdict.horizon_capped,
    }


def render_report(report: dict[str, Any]) -> str:
    """Fixed-layout text rendering of a report dictionary."""
    lines: list[str] = []
    model = report["model"]
    channels = ", ".join(f"{c['name']}({c['dim']})" for c in model["channels"])
    lines.append(f"cascade report (format {report['format_version']})")
    lines.append(
        "upstream: N={N} M={M} P={P}".format(**model["upstream"])
        + "  downstream: N={N} M={M} P={P}".format(**model["downstream"])
    )
    lines.append(f"external channels: {channels}")
    lines.append("")
    lines.append("component equilibria under constant inputs")
    for g in report["component_equilibria"]:
        pairs = " ".join(f"({u},{d})" for u, d in g["pairs"])
        lines.append(
            f"  {g['condition']:<24} -> pairs {pairs}"
            f"  [{g['combinations']} combination(s)]"
        )
    lines.append("")
    lines.append("combined equilibria and constant outputs")
    for i, g in enumerate(report["combined_table"], start=1):
        pairs = " ".join(f"({u},{d})" for u, d in g["pairs"])
        outs = ",".join(str(o) for o in g["outputs"])
        lines.append(
            f"  case {i}: {g['condition']:<24} -> pairs {pairs}; output {outs}"
            f"  [{g['combinations']} combination(s)]"
        )
    lines.append("")
    lines.append("observability")
    for name in ("upstream", "downstream", "flattened"):
        entry = report["observability"][name]
        pairs = entry["indistinguishable_pairs"]
        if pairs and len(pairs) <= _MAX_LISTED_PAIRS:
            detail = " pairs " + " ".join(f"({i},{j})" for i, j in pairs)
        elif pairs:
            detail = f" {len(pairs)} indistinguishable pairs"
        else:
            detail = ""
        lines.append(
            f"  {name}: observable={_yesno(entry['observable'])} "
            f"weakly_observable={_yesno(entry['weakly_observable'])}{detail}"
        )
    lines.append("")
    lines.append("reconstructibility")
    for name in ("upstream", "downstream", "flattened"):
        entry = report["reconstructibility"][name]
        if not entry["reconstructible"]:
            verdict = "no"
        elif entry["horizon"] is not None:
            verdict = f"yes, horizon <= {entry['horizon']}"
        else:
            verdict = "yes, horizon undetermined at cap"
        lines.append(f"  {name}: {verdict}")
    return "\n".join(lines) + "\n"


def _yesno(value: bool | None) -> str:
    if value is None:
        return "undetermined"
    return "yes" if value else "no"
