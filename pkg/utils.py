"""
Utility functions for the hidden orbits engine: console logging, the event
log, germ-file I/O and report rendering
"""
import json
import sys
from datetime import datetime
from typing import Any, Dict, List

from config import config
from engine.jet import GermMap, dumps_germ, format_germ, loads_germ
from engine.reports import ConsistencyReport, DoldReport, NumericCount, ScanReport, VerdictB


def debug_print(message: str):
    """Print a debug line when DEBUG is on"""
    if config.DEBUG:
        print(f"🔍 {message}")


def log_event(kind: str, **fields: Any):
    """
    Log an engine event

    Args:
        kind: short event name, e.g. "escalation"
        fields: event payload (JSON-serializable)
    """
    if config.VERBOSE_LOGGING:
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        payload = " ".join(f"{key}={value}" for key, value in fields.items())
        print(f"[{timestamp}] {kind.upper()}: {payload}", file=sys.stderr)
    save_event_log(kind, fields)


def save_event_log(kind: str, fields: Dict[str, Any]):
    """
    Append an event to the JSONL event log (DEBUG only)

    Args:
        kind: event name
        fields: event payload
    """
    if not config.DEBUG:
        return

    log_entry = {"timestamp": datetime.now().isoformat(), "event": kind, **fields}

    try:
        with open(config.EVENT_LOG_FILE, "a") as f:
            f.write(json.dumps(log_entry, default=str) + "\n")
    except Exception as e:
        print(f"Error saving event log: {e}", file=sys.stderr)


def log_escalation(period: int, old_degree: int, new_degree: int, reason: str):
    """Truncation escalations always go to stderr with the old and new D"""
    print(
        f"⚠️  escalating truncation for f^{period}: D {old_degree} -> {new_degree} ({reason})",
        file=sys.stderr,
    )
    log_event("escalation", period=period, old_degree=old_degree, new_degree=new_degree, reason=reason)


def load_germ(path: str) -> GermMap:
    """Read a germ file"""
    with open(path, "r") as f:
        germ = loads_germ(f.read())
    debug_print(f"Loaded germ from {path}: {format_germ(germ)}")
    return germ


def save_germ(germ: GermMap, path: str):
    """Write a germ file (byte-stable)"""
    with open(path, "w") as f:
        f.write(dumps_germ(germ))
    debug_print(f"Saved germ to {path}")


def format_periods(periods: List[int]) -> str:
    return "{" + ", ".join(str(p) for p in periods) + "}"


def render_dold_table(report: DoldReport) -> str:
    """Aligned text table of mu, P and O for every divisor of M"""
    lines = [
        f"M = {report.period}   L = {report.zeta_order}   D = {report.truncation}",
        f"eigenvalue orders: {report.eigenvalue_orders}   admissible periods: {format_periods(report.admissible_periods)}",
        "",
        f"{'m':>6} {'mu(f^m)':>9} {'P_m':>7} {'O_m':>6}  {'admissible':<10} method",
    ]
    for row in report.rows:
        lines.append(
            f"{row.period:>6} {row.mu:>9} {row.dold:>7} {row.orbits:>6}  "
            f"{'yes' if row.admissible else 'no':<10} {row.method}"
        )
    status = "✅ consistent" if report.consistent else "❌ inconsistent"
    lines.append("")
    lines.append(
        f"mu(f^{report.period}) = {report.mu_total}, sum of admissible P_m = {report.admissible_sum}: {status}"
    )
    return "\n".join(lines)


def render_consistency(report: ConsistencyReport) -> str:
    lines = [render_dold_table(report.table), ""]
    lines.append(
        f"independent mu(f^{report.period}) = {report.recomputed_mu} ({report.recomputed_method})"
    )
    if report.off_admissible:
        off = ", ".join(f"P_{m} = {p}" for m, p in sorted(report.off_admissible.items()))
        lines.append(f"off the admissible set: {off}")
    lines.append("✅ index consistency holds" if report.consistent else "❌ index consistency FAILED")
    return "\n".join(lines)


def render_verdict(verdict: VerdictB) -> str:
    return verdict.describe()


def render_scan(report: ScanReport) -> str:
    """Pass/fail matrix, one line per (cell, M)"""
    lines = [
        f"theorem scan: max lcm {report.max_lcm}, {report.samples} samples, seed {report.seed}"
        f"{', Galois-reduced' if report.reduced else ''}",
        "",
        f"{'cell':<22} {'M':>4}  {'verdict':<30} {'observed':<24} result",
    ]
    for cell in report.cells:
        observed = ", ".join(
            f"{check.quantity}={check.value if check.value is not None else '?'}" for check in cell.checks
        )
        if len(observed) > 24:
            observed = observed[:21] + "..."
        verdict = cell.verdict.outcome + (f" ({cell.verdict.case})" if cell.verdict.case else "")
        lines.append(
            f"{cell.cell_id:<22} {cell.period:>4}  {verdict:<30} {observed:<24} "
            f"{'PASS' if cell.passed else 'FAIL'}"
        )
    lines.append("")
    if report.passed:
        lines.append(f"all cells PASS ({len(report.cells)} cells)")
    else:
        lines.append(f"{len(report.failures)} of {len(report.cells)} cells FAIL")
        for cell in report.failures:
            for check in cell.checks:
                if not check.passed:
                    lines.append(f"  ❌ {cell.cell_id} M={cell.period} {check.germ}: {check.error or check.quantity}")
                    if check.germ_document is not None:
                        lines.append("     " + json.dumps(check.germ_document, sort_keys=True))
    return "\n".join(lines)


def render_numeric(count: NumericCount) -> str:
    lines = [f"numeric search for period {count.period} (embedding error {count.embedding_error:.2e})"]
    for eps, orbits, points, bad in zip(count.epsilons, count.counts, count.points, count.uncertified):
        lines.append(f"  eps={eps:g}: {orbits} orbits from {points} period points, {bad} uncertified")
    lines.append(f"  max residual: {count.max_residual:.2e}")
    if count.agree:
        lines.append(f"✅ decades agree: O_{count.period} = {count.count}")
    else:
        lines.append("❌ decades disagree")
    if count.exact is not None:
        verdict = "matches" if count.count == count.exact else "does NOT match"
        lines.append(f"exact engine O_{count.period} = {count.exact} ({verdict})")
    return "\n".join(lines)
