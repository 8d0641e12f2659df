"""Deterministic report documents.

Reports are JSON with every float rendered at 17 significant digits, so
identical inputs produce byte-identical documents on any platform with
IEEE-754 doubles.  Infinities (Hoelder exponents) are rendered as the
strings "inf"/"-inf" since JSON has no literal for them.
"""

from __future__ import annotations

import math

SCHEMA_VERSION = "flowcert-report/1"


def _render(value, indent: int) -> str:
    pad = "  " * indent
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value):
            return '"inf"' if value > 0 else '"-inf"'
        if math.isnan(value):
            raise ValueError("refusing to serialize NaN into a report")
        return format(value, ".17g")
    if isinstance(value, str):
        import json

        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        inner = ",\n".join(
            f'{pad}  "{key}": {_render(val, indent + 1)}'
            for key, val in value.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        inner = ",\n".join(
            f"{pad}  {_render(item, indent + 1)}" for item in value
        )
        return "[\n" + inner + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(value).__name__} into a report")


def render_document(doc: dict) -> str:
    """Render a report dict as deterministic JSON text."""
    return _render(doc, 0) + "\n"


def certificate_document(report) -> dict:
    """Report dict for a CertificateReport."""
    detail = None
    if report.bolognani_detail is not None:
        detail = [
            {
                "p": entry.p,
                "product": entry.product,
                "ok": entry.ok,
                "weighted_product": entry.weighted_product,
                "weighted_ok": entry.weighted_ok,
            }
            for entry in report.bolognani_detail
        ]
    return {
        "schema": SCHEMA_VERSION,
        "kind": "certificate",
        "xi_s": report.xi_s,
        "xi_s_hat": report.xi_s_hat,
        "xi_delta_s": report.xi_delta_s,
        "u_min": report.u_min,
        "delta": report.delta,
        "rho": report.rho,
        "theorem_ok": report.theorem_ok,
        "corollary_ok": report.corollary_ok,
        "bolognani_ok": report.bolognani_ok,
        "improved_ok": report.improved_ok,
        "bolognani_detail": detail,
    }


def solve_document(result, net) -> dict:
    """Report dict for a converged SolveResult, voltages included."""
    return {
        "schema": SCHEMA_VERSION,
        "kind": "solve",
        "converged": True,
        "iterations": result.iterations,
        "final_step": result.final_step,
        "residual": result.residual,
        "certified": result.certified,
        "contained_in_d": result.contained_in_d,
        "voltages": [
            {
                "bus": bus.id,
                "re": float(result.v[i].real),
                "im": float(result.v[i].imag),
                "magnitude": float(abs(result.v[i])),
            }
            for i, bus in enumerate(net.load_buses)
        ],
    }


def failed_solve_document(error, net) -> dict:
    """Report dict for a solve that ran out of iterations or collapsed."""
    doc = {
        "schema": SCHEMA_VERSION,
        "kind": "solve",
        "converged": False,
        "error": str(error),
    }
    iterations = getattr(error, "iterations", None)
    last_step = getattr(error, "last_step", None)
    if iterations is not None:
        doc["iterations"] = iterations
    if last_step is not None:
        doc["final_step"] = float(last_step)
    iterate = getattr(error, "iterate", None)
    if iterate is not None:
        doc["voltages"] = [
            {
                "bus": bus.id,
                "re": float(iterate[i].real),
                "im": float(iterate[i].imag),
                "magnitude": float(abs(iterate[i])),
            }
            for i, bus in enumerate(net.load_buses)
        ]
    return doc
