"""CSV and aligned-table rendering of :class:`MajorantReport` objects.

CSV columns (one row per level and mode, plus an ``all`` row per level when
the problem has more than one mode)::

    problem,level,mode,r1,r2,majorant_semi,majorant_norm,exact_error,eff_index,e_n

Numbers use ``%.6e``; missing values (no exact solution, ``e_n`` on mode
rows) are empty fields.
"""
from __future__ import annotations

import csv
import io
from typing import Iterable

from .majorant import MajorantReport

CSV_COLUMNS = ("problem", "level", "mode", "r1", "r2", "majorant_semi", "majorant_norm",
               "exact_error", "eff_index", "e_n")

TABLE_NOTE = ("# iteration counts come from MINRES/CG with an exact factorization "
              "preconditioner and are not comparable to AMLI-based figures")


def _num(v) -> str:
    return "" if v is None else f"{v:.6e}"


def _rows(report: MajorantReport):
    for m in report.modes:
        yield {
            "problem": report.problem, "level": str(report.level), "mode": str(m.k),
            "r1": _num(m.r1), "r2": _num(m.r2),
            "majorant_semi": _num(m.majorant_semi), "majorant_norm": _num(m.majorant_norm),
            "exact_error": _num(m.error_semi), "eff_index": _num(m.eff_index), "e_n": "",
        }
    if len(report.modes) > 1:
        yield {
            "problem": report.problem, "level": str(report.level), "mode": "all",
            "r1": _num(report.r1), "r2": _num(report.r2),
            "majorant_semi": _num(report.majorant_semi),
            "majorant_norm": _num(report.majorant_norm),
            "exact_error": _num(report.error_semi), "eff_index": _num(report.eff_index),
            "e_n": _num(report.E_N),
        }


def failure_row(problem: str, level: int, mode, message: str) -> dict:
    """Diagnostic row for a level whose solve aborted."""
    row = dict.fromkeys(CSV_COLUMNS, "")
    row.update(problem=problem, level=str(level), mode=str(mode), r1=f"FAILED: {message}")
    return row


def to_csv(reports: Iterable[MajorantReport], extra_rows=()) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerows(_rows(r))
    writer.writerows(extra_rows)
    return buf.getvalue()


def _constants_line(report: MajorantReport) -> str:
    c = report.constants
    ck = ", ".join(f"{v:.6g}" for v in c.c_k)
    return (f"# C_F={c.C_F:.6g} mu1={c.mu1:.6g} mu1_tilde={c.mu1_tilde:.6g} "
            f"c0={c.c0_semi:.6g} c_k=[{ck}]")


def to_table(reports: Iterable[MajorantReport], timings: bool = False,
             failures=()) -> str:
    """Human-readable layout: one block per level, one line per mode."""
    reports = list(reports)
    header = ["mode", "iter", "||R1||", "||R2||", "M_semi", "M_norm", "error", "I_eff", "E_N"]
    if timings:
        header.insert(2, "t_sec")
    lines = [TABLE_NOTE]
    for rep in reports:
        lines.append("")
        lines.append(f"{rep.problem}  {rep.level} x {rep.level}")
        lines.append(_constants_line(rep))
        body = []
        for m in rep.modes:
            row = [str(m.k), str(m.iterations), _num(m.r1), _num(m.r2),
                   _num(m.majorant_semi), _num(m.majorant_norm), _num(m.error_semi),
                   "" if m.eff_index is None else f"{m.eff_index:.3f}", ""]
            if timings:
                row.insert(2, f"{m.seconds:.2f}")
            body.append(row)
        if len(rep.modes) > 1:
            row = ["all", "", _num(rep.r1), _num(rep.r2), _num(rep.majorant_semi),
                   _num(rep.majorant_norm), _num(rep.error_semi),
                   "" if rep.eff_index is None else f"{rep.eff_index:.3f}", _num(rep.E_N)]
            if timings:
                row.insert(2, f"{rep.seconds:.2f}")
            body.append(row)
        widths = [max(len(h), *(len(r[i]) for r in body)) for i, h in enumerate(header)]
        lines.append("  ".join(h.rjust(w) for h, w in zip(header, widths)))
        for r in body:
            lines.append("  ".join(v.rjust(w) for v, w in zip(r, widths)))
    for f in failures:
        lines.append("")
        lines.append(f"{f['problem']}  {f['level']} x {f['level']}  {f['r1']}")
    return "\n".join(lines) + "\n"
